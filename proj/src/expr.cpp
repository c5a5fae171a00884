#include "wavesel/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace wavesel {

namespace {

enum class NodeKind { Const, VarX, Param, Add, Sub, Mul, Div, Pow, Neg, Exp, Log, Sin, Cos };

struct Node {
    NodeKind kind;
    double value = 0.0;   // Const
    int param = 0;        // Param, zero-based
    int lhs = -1;
    int rhs = -1;
};

// Flat expression tree: nodes reference children by index, the last node is
// the root. Shared immutably by every closure the compiled model hands out.
struct Program {
    std::vector<Node> nodes;
    int arity = 0;

    double eval(int at, double x, const std::vector<double>& beta) const {
        const Node& n = nodes[static_cast<std::size_t>(at)];
        switch (n.kind) {
            case NodeKind::Const: return n.value;
            case NodeKind::VarX: return x;
            case NodeKind::Param: return beta[static_cast<std::size_t>(n.param)];
            case NodeKind::Add: return eval(n.lhs, x, beta) + eval(n.rhs, x, beta);
            case NodeKind::Sub: return eval(n.lhs, x, beta) - eval(n.rhs, x, beta);
            case NodeKind::Mul: return eval(n.lhs, x, beta) * eval(n.rhs, x, beta);
            case NodeKind::Div: return eval(n.lhs, x, beta) / eval(n.rhs, x, beta);
            case NodeKind::Pow: return std::pow(eval(n.lhs, x, beta), eval(n.rhs, x, beta));
            case NodeKind::Neg: return -eval(n.lhs, x, beta);
            case NodeKind::Exp: return std::exp(eval(n.lhs, x, beta));
            case NodeKind::Log: return std::log(eval(n.lhs, x, beta));
            case NodeKind::Sin: return std::sin(eval(n.lhs, x, beta));
            case NodeKind::Cos: return std::cos(eval(n.lhs, x, beta));
        }
        return 0.0;
    }

    double operator()(double x, const std::vector<double>& beta) const {
        return eval(static_cast<int>(nodes.size()) - 1, x, beta);
    }
};

class Parser {
public:
    explicit Parser(const std::string& text) : text_(text) {}

    Program parse() {
        Program prog;
        const int root = expression(prog);
        skip_space();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        (void)root;
        return prog;
    }

private:
    const std::string& text_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw std::invalid_argument("expression error at position " + std::to_string(pos_ + 1) +
                                    ": " + what);
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool consume(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_space();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    static int push(Program& prog, Node node) {
        prog.nodes.push_back(node);
        return static_cast<int>(prog.nodes.size()) - 1;
    }

    int expression(Program& prog) {
        int left = term(prog);
        for (;;) {
            if (consume('+')) {
                left = push(prog, {NodeKind::Add, 0, 0, left, term(prog)});
            } else if (consume('-')) {
                left = push(prog, {NodeKind::Sub, 0, 0, left, term(prog)});
            } else {
                return left;
            }
        }
    }

    int term(Program& prog) {
        int left = factor(prog);
        for (;;) {
            if (consume('*')) {
                left = push(prog, {NodeKind::Mul, 0, 0, left, factor(prog)});
            } else if (consume('/')) {
                left = push(prog, {NodeKind::Div, 0, 0, left, factor(prog)});
            } else {
                return left;
            }
        }
    }

    int factor(Program& prog) {
        if (consume('-')) return push(prog, {NodeKind::Neg, 0, 0, factor(prog), -1});
        if (consume('+')) return factor(prog);
        return power(prog);
    }

    int power(Program& prog) {
        const int base = atom(prog);
        if (consume('^')) {
            // Right associative: 2^3^2 = 2^(3^2).
            return push(prog, {NodeKind::Pow, 0, 0, base, factor(prog)});
        }
        return base;
    }

    int atom(Program& prog) {
        skip_space();
        if (pos_ >= text_.size()) fail("expected a value");
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            const int inner = expression(prog);
            if (!consume(')')) fail("expected ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number(prog);
        if (std::isalpha(static_cast<unsigned char>(c))) return word(prog);
        fail(std::string("unexpected character '") + c + "'");
    }

    int number(Program& prog) {
        const char* begin = text_.c_str() + pos_;
        char* end = nullptr;
        const double value = std::strtod(begin, &end);
        if (end == begin) fail("malformed number");
        pos_ += static_cast<std::size_t>(end - begin);
        return push(prog, {NodeKind::Const, value, 0, -1, -1});
    }

    int word(Program& prog) {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
            ++pos_;
        }
        const std::string name = text_.substr(start, pos_ - start);
        if (name == "x") return push(prog, {NodeKind::VarX, 0, 0, -1, -1});
        if (name.size() >= 2 && name[0] == 'b' &&
            name.find_first_not_of("0123456789", 1) == std::string::npos) {
            const int index = std::atoi(name.c_str() + 1);
            if (index < 1) fail("parameter indices start at b1");
            prog.arity = std::max(prog.arity, index);
            return push(prog, {NodeKind::Param, 0, index - 1, -1, -1});
        }
        if (name == "pow") {
            if (!consume('(')) fail("pow expects '('");
            const int base = expression(prog);
            if (!consume(',')) fail("pow expects two arguments");
            const int exponent = expression(prog);
            if (!consume(')')) fail("expected ')'");
            return push(prog, {NodeKind::Pow, 0, 0, base, exponent});
        }
        NodeKind kind;
        if (name == "exp") {
            kind = NodeKind::Exp;
        } else if (name == "log") {
            kind = NodeKind::Log;
        } else if (name == "sin") {
            kind = NodeKind::Sin;
        } else if (name == "cos") {
            kind = NodeKind::Cos;
        } else {
            fail("unknown name '" + name + "'");
        }
        if (!consume('(')) fail(name + " expects '('");
        const int arg = expression(prog);
        if (!consume(')')) fail("expected ')'");
        return push(prog, {kind, 0, 0, arg, -1});
    }
};

}  // namespace

NlsModel compile_expression(const std::string& id, const std::string& text) {
    if (id.empty()) throw std::invalid_argument("compile_expression: empty model id");
    auto program = std::make_shared<const Program>(Parser(text).parse());
    if (program->arity < 1) {
        throw std::invalid_argument("expression for '" + id + "' uses no parameters (b1, b2, ...)");
    }
    NlsModel model;
    model.id = id;
    model.arity = program->arity;
    model.f = [program](double x, const std::vector<double>& beta) { return (*program)(x, beta); };
    const int arity = program->arity;
    model.start_heuristic = [arity](const std::vector<double>&, const std::vector<double>&,
                                    std::string* warning) {
        if (warning) *warning = "expression models start from all ones";
        return std::vector<double>(static_cast<std::size_t>(arity), 1.0);
    };
    model.domain_note = "user expression: " + text;
    return model;
}

std::vector<NlsModel> load_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open model file '" + path + "'");
    std::vector<NlsModel> models;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                        ": expected 'id = expression'");
        }
        std::string id = line.substr(0, eq);
        id.erase(0, id.find_first_not_of(" \t"));
        id.erase(id.find_last_not_of(" \t") + 1);
        if (id.empty()) {
            throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": empty model id");
        }
        for (const auto& existing : models) {
            if (existing.id == id) {
                throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                            ": duplicate model id '" + id + "'");
            }
        }
        try {
            models.push_back(compile_expression(id, line.substr(eq + 1)));
        } catch (const std::invalid_argument& err) {
            throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": " + err.what());
        }
    }
    return models;
}

}  // namespace wavesel
