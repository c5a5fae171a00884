#pragma once

#include "wavesel/nls.hpp"

#include <string>
#include <vector>

namespace wavesel {

/**
 * Compile a curve definition written in a small arithmetic grammar into an
 * NlsModel usable everywhere a builtin is. Vocabulary:
 *
 *   variable    x
 *   parameters  b1, b2, ... (arity = highest index mentioned)
 *   operators   + - * / ^ and unary minus
 *   functions   exp(e), log(e), sin(e), cos(e), pow(base, exponent)
 *   numbers     decimal literals, parentheses for grouping
 *
 * The resulting model uses finite-difference derivatives and an all-ones
 * start (overridable per fit). Malformed input throws std::invalid_argument
 * with the offending position.
 */
NlsModel compile_expression(const std::string& id, const std::string& text);

/**
 * Read model definitions from a text file, one `id = expression` per line;
 * blank lines and lines starting with '#' are skipped. Duplicate ids or parse
 * failures throw std::invalid_argument naming the line.
 */
std::vector<NlsModel> load_model_file(const std::string& path);

}  // namespace wavesel
