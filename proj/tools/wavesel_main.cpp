#include "wavesel/csv.hpp"
#include "wavesel/expr.hpp"
#include "wavesel/report.hpp"
#include "wavesel/selector.hpp"
#include "wavesel/simulate.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace wavesel;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitComputation = 3;
constexpr int kExitDegenerate = 4;

std::vector<std::string> split_list(const std::string& spec, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream stream(spec);
    while (std::getline(stream, item, sep)) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

/// Spec grammar: comma list of builtin curve ids, "glm:FAMILY:LINK" pairs,
/// and "file:PATH" expression-model files.
std::vector<CandidateModel> parse_candidates_spec(const std::string& spec) {
    std::vector<CandidateModel> candidates;
    const std::vector<std::string> tokens = split_list(spec, ',');
    if (tokens.empty()) throw std::invalid_argument("empty candidate specification");
    for (const std::string& token : tokens) {
        if (token.rfind("glm:", 0) == 0) {
            const std::vector<std::string> parts = split_list(token, ':');
            if (parts.size() != 3) {
                throw std::invalid_argument("expected glm:FAMILY:LINK, got '" + token + "'");
            }
            const Family family = parse_family(parts[1]);
            const Link link = parse_link(parts[2]);
            if (!link_supported(family, link)) {
                throw std::invalid_argument("link " + parts[2] + " is not supported for family " +
                                            parts[1]);
            }
            candidates.push_back(make_glm_candidate(family, link));
        } else if (token.rfind("file:", 0) == 0) {
            for (NlsModel& model : load_model_file(token.substr(5))) {
                candidates.push_back(make_nls_candidate(std::move(model)));
            }
        } else if (token == "f24") {
            candidates.push_back(make_reciprocal_line_candidate());
        } else {
            candidates.push_back(make_nls_candidate(builtin_model(token)));
        }
    }
    return candidates;
}

struct SelectArgs {
    std::string input;
    std::string y_col;
    std::vector<std::string> x_cols;
    std::string candidates = "f1,f2,f3,f4,f24";
    std::string criteria = "both";
    std::string out = "selection_report.json";
    std::string basis = "daub2";
    std::string threshold = "soft";
    int j0 = 2;
    std::uint64_t seed = 0;
    bool fixed_timestamp = false;
};

int cmd_select(const SelectArgs& args) {
    try {
        const CsvTable table = read_csv(args.input);
        const Dataset data = make_dataset(table, args.y_col, args.x_cols);
        if (data.y.size() < 16) {
            std::cerr << "error: need at least 16 complete rows, found " << data.y.size() << " ("
                      << data.dropped_rows << " dropped)\n";
            return kExitInput;
        }
        const std::vector<CandidateModel> candidates = parse_candidates_spec(args.candidates);
        WaveletOptions wavelet;
        wavelet.basis = args.basis;
        wavelet.coarse_level = args.j0;
        wavelet.rule = parse_shrink_rule(args.threshold);
        if (args.criteria != "rmse" && args.criteria != "mae" && args.criteria != "both") {
            std::cerr << "error: --criteria must be rmse, mae, or both\n";
            return kExitInput;
        }

        SelectionReport report;
        try {
            report = wp_select(data.X, data.y, candidates, wavelet);
        } catch (const DegeneratePredictorError& err) {
            std::cerr << "error: " << err.what() << '\n';
            return kExitDegenerate;
        }

        if (report.winner_rmse.empty()) {
            std::cerr << "error: no candidate produced a usable fit\n";
            for (const CandidateScore& cs : report.scores) {
                std::cerr << "  " << cs.id << ": " << cs.error << '\n';
            }
            return kExitComputation;
        }

        std::vector<const CandidateScore*> ranked;
        for (const CandidateScore& cs : report.scores) ranked.push_back(&cs);
        const bool rank_by_mae = args.criteria == "mae";
        std::sort(ranked.begin(), ranked.end(),
                  [&](const CandidateScore* a, const CandidateScore* b) {
                      if (a->fit_ok != b->fit_ok) return a->fit_ok;
                      const double va = rank_by_mae ? a->mae : a->rmse;
                      const double vb = rank_by_mae ? b->mae : b->rmse;
                      if (va != vb) return va < vb;
                      return a->id < b->id;
                  });
        std::cout << "candidate ranking (" << (rank_by_mae ? "mae" : "rmse") << "):\n";
        for (const CandidateScore* cs : ranked) {
            std::cout << "  " << cs->id << "  ";
            if (cs->fit_ok) {
                if (args.criteria != "mae") std::cout << "rmse=" << format_double(cs->rmse) << "  ";
                if (args.criteria != "rmse") std::cout << "mae=" << format_double(cs->mae) << "  ";
                std::cout << "ok\n";
            } else {
                std::cout << "failed: " << cs->error << '\n';
            }
        }
        if (args.criteria != "mae") std::cout << "winner (rmse): " << report.winner_rmse << '\n';
        if (args.criteria != "rmse") std::cout << "winner (mae): " << report.winner_mae << '\n';
        if (data.dropped_rows > 0) {
            std::cout << "dropped rows with missing values: " << data.dropped_rows << '\n';
        }

        SelectionDocument doc;
        doc.meta.seed = args.seed;
        std::ostringstream canonical;
        canonical << "select|" << args.input << '|' << args.y_col << '|';
        for (const std::string& x : args.x_cols) canonical << x << ';';
        canonical << '|' << args.candidates << '|' << args.criteria << '|' << args.basis << '|'
                  << args.j0 << '|' << args.threshold << '|' << args.seed;
        doc.meta.config_hash = config_digest(canonical.str());
        doc.meta.timestamp = report_timestamp(args.fixed_timestamp);
        if (data.X.cols() == 2) {
            doc.x.assign(data.X.col(1).data(), data.X.col(1).data() + data.X.rows());
        } else {
            doc.x = report.eta_scaled;
        }
        doc.y = data.y;
        doc.report = report;
        write_selection_document(args.out, doc);
        std::cout << "report: " << args.out << '\n';
        return kExitOk;
    } catch (const std::invalid_argument& err) {
        std::cerr << "error: " << err.what() << '\n';
        return kExitInput;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return kExitComputation;
    }
}

struct SimulateArgs {
    std::string config;
    std::string out_dir = ".";
    bool fixed_timestamp = false;
};

std::string blank_unless(bool applicable, const std::string& value) {
    return applicable ? value : std::string{};
}

int cmd_simulate(const SimulateArgs& args) {
    SimulationPlan plan;
    try {
        plan = load_simulation_plan(args.config);
    } catch (const std::invalid_argument& err) {
        std::cerr << "error: " << err.what() << '\n';
        return kExitInput;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return kExitComputation;
    }

    try {
        std::filesystem::create_directories(args.out_dir);
        const auto out_path = [&](const char* name) {
            return (std::filesystem::path(args.out_dir) / name).string();
        };

        MonteCarloDocument doc;
        doc.meta.seed = plan.runs.front().seed;
        doc.meta.timestamp = report_timestamp(args.fixed_timestamp);
        {
            std::ifstream cfg_in(args.config, std::ios::binary);
            std::ostringstream cfg_text;
            cfg_text << cfg_in.rdbuf();
            doc.meta.config_hash = config_digest(cfg_text.str());
        }

        std::vector<std::vector<std::string>> rate_rows;
        std::vector<std::vector<std::string>> null_rows;
        std::vector<std::vector<std::string>> win_rows;
        for (const ScenarioConfig& cfg : plan.runs) {
            const MonteCarloResult result = run_scenario(cfg);
            ScenarioRunRecord record;
            record.config = cfg;
            record.config.extra_models.clear();
            for (const NlsModel& m : cfg.extra_models) record.extra_model_ids.push_back(m.id);
            record.result = result;

            const bool selection_scenario = cfg.scenario != Scenario::S4;
            const bool glm_scenario =
                cfg.scenario == Scenario::S3 || cfg.scenario == Scenario::S4;
            const std::string scenario = scenario_name(cfg.scenario);
            const std::string model = blank_unless(!glm_scenario, cfg.true_model);
            const std::string family = blank_unless(glm_scenario, family_name(cfg.family));
            const std::string link = blank_unless(glm_scenario, link_name(cfg.link));
            const std::string n = std::to_string(cfg.n);
            const std::string dependence = dependence_name(cfg.dependence);
            const std::string completed = std::to_string(result.completed);
            const std::string failed = std::to_string(result.failed);

            if (selection_scenario) {
                if (cfg.criteria != "mae") {
                    rate_rows.push_back({scenario, model, family, link, n, dependence, "rmse",
                                         format_double(result.rate_rmse),
                                         std::to_string(cfg.replications), completed, failed});
                }
                if (cfg.criteria != "rmse") {
                    rate_rows.push_back({scenario, model, family, link, n, dependence, "mae",
                                         format_double(result.rate_mae),
                                         std::to_string(cfg.replications), completed, failed});
                }
            } else {
                const std::string gap = cfg.gap ? "1" : "0";
                if (cfg.criteria != "mae") {
                    win_rows.push_back({scenario, family, link, n, dependence, gap, "rmse",
                                        format_double(result.glm_win_rmse), completed, failed});
                }
                if (cfg.criteria != "rmse") {
                    win_rows.push_back({scenario, family, link, n, dependence, gap, "mae",
                                        format_double(result.glm_win_mae), completed, failed});
                }
            }
            for (std::size_t level = 0; level < result.null_fraction_mean.size(); ++level) {
                null_rows.push_back({scenario, model, family, link, n, dependence,
                                     std::to_string(level + 1),
                                     format_double(result.null_fraction_mean[level])});
            }
            doc.runs.push_back(std::move(record));
        }

        write_csv(out_path("classification_rates.csv"),
                  {"scenario", "true_model", "family", "link", "n", "dependence", "criterion",
                   "rate_percent", "replications", "completed", "failed"},
                  rate_rows);
        write_csv(out_path("null_fractions.csv"),
                  {"scenario", "true_model", "family", "link", "n", "dependence", "level",
                   "mean_null_fraction"},
                  null_rows);
        write_csv(out_path("win_proportions.csv"),
                  {"scenario", "family", "link", "n", "dependence", "gap", "criterion",
                   "glm_win_proportion", "completed", "failed"},
                  win_rows);
        write_montecarlo_document(out_path("summary.json"), doc);
        std::cout << "wrote " << rate_rows.size() << " rate rows, " << win_rows.size()
                  << " win rows, " << null_rows.size() << " null-fraction rows to " << args.out_dir
                  << '\n';
        return kExitOk;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return kExitComputation;
    }
}

struct PlotdataArgs {
    std::string report;
    std::string out = "plotdata.csv";
};

int cmd_plotdata(const PlotdataArgs& args) {
    std::error_code ec;
    if (!std::filesystem::exists(args.report, ec) || ec) {
        std::cerr << "error: cannot open '" << args.report << "'\n";
        return kExitInput;
    }
    try {
        const std::string kind = document_kind(args.report);
        if (kind == "selection") {
            const SelectionDocument doc = read_selection_document(args.report);
            const std::string winner_id =
                !doc.report.winner_rmse.empty() ? doc.report.winner_rmse : doc.report.winner_mae;
            const CandidateScore* winner = nullptr;
            for (const CandidateScore& cs : doc.report.scores) {
                if (cs.id == winner_id) winner = &cs;
            }
            if (winner == nullptr || winner->fitted.size() != doc.x.size() ||
                doc.report.wavelet_fitted.size() != doc.x.size() || doc.x.empty() ||
                doc.y.size() != doc.x.size()) {
                std::cerr << "error: report lacks complete fitted series\n";
                return kExitComputation;
            }
            std::vector<std::vector<std::string>> rows;
            rows.reserve(doc.x.size());
            for (std::size_t i = 0; i < doc.x.size(); ++i) {
                rows.push_back({format_double(doc.x[i]), format_double(doc.y[i]),
                                format_double(doc.report.wavelet_fitted[i]),
                                format_double(winner->fitted[i])});
            }
            write_csv(args.out, {"x", "observed", "wavelet", "winner"}, rows);
        } else {
            const MonteCarloDocument doc = read_montecarlo_document(args.report);
            std::vector<std::vector<std::string>> rows;
            for (const ScenarioRunRecord& run : doc.runs) {
                const ScenarioConfig& cfg = run.config;
                const bool glm_scenario =
                    cfg.scenario == Scenario::S3 || cfg.scenario == Scenario::S4;
                const std::string scenario = scenario_name(cfg.scenario);
                const std::string model = blank_unless(!glm_scenario, cfg.true_model);
                const std::string family = blank_unless(glm_scenario, family_name(cfg.family));
                const std::string link = blank_unless(glm_scenario, link_name(cfg.link));
                const bool s4 = cfg.scenario == Scenario::S4;
                const auto add = [&](const char* criterion, double value) {
                    rows.push_back({scenario, model, family, link, std::to_string(cfg.n),
                                    dependence_name(cfg.dependence), cfg.gap ? "1" : "0",
                                    criterion, format_double(value),
                                    std::to_string(run.result.completed),
                                    std::to_string(run.result.failed)});
                };
                if (cfg.criteria != "mae") {
                    add("rmse", s4 ? run.result.glm_win_rmse : run.result.rate_rmse);
                }
                if (cfg.criteria != "rmse") {
                    add("mae", s4 ? run.result.glm_win_mae : run.result.rate_mae);
                }
            }
            write_csv(args.out,
                      {"scenario", "true_model", "family", "link", "n", "dependence", "gap",
                       "criterion", "value", "completed", "failed"},
                      rows);
        }
        std::cout << "plot data: " << args.out << '\n';
        return kExitOk;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return kExitComputation;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"wavesel: pick the parametric regression closest to a wavelet reference fit"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);

    SelectArgs select_args;
    CLI::App* select = app.add_subcommand(
        "select", "rank candidate models on a CSV dataset against the wavelet reference");
    select->add_option("--input", select_args.input, "CSV file with a header row")->required();
    select->add_option("--y", select_args.y_col, "response column name")->required();
    select
        ->add_option("--x", select_args.x_cols,
                     "predictor column name (repeat for several predictors)")
        ->required();
    select->add_option("--candidates", select_args.candidates,
                       "comma list: builtin ids, glm:FAMILY:LINK, file:PATH");
    select->add_option("--criteria", select_args.criteria, "rmse | mae | both");
    select->add_option("--out", select_args.out, "report path (JSON)");
    select->add_option("--wavelet", select_args.basis, "wavelet basis: haar | daubN (N=1..4)");
    select->add_option("--j0", select_args.j0, "coarsest detail level kept unthresholded");
    select->add_option("--threshold", select_args.threshold, "shrinkage rule: soft | hard");
    select->add_option("--seed", select_args.seed, "seed recorded in the report metadata");
    select->add_flag("--fixed-timestamp", select_args.fixed_timestamp,
                     "write a constant timestamp for reproducible outputs");

    SimulateArgs simulate_args;
    CLI::App* simulate =
        app.add_subcommand("simulate", "run Monte Carlo scenario studies from a JSON plan");
    simulate->add_option("--config", simulate_args.config, "JSON plan file")->required();
    simulate->add_option("--out-dir", simulate_args.out_dir, "output directory for CSV tables");
    simulate->add_flag("--fixed-timestamp", simulate_args.fixed_timestamp,
                       "write a constant timestamp for reproducible outputs");

    PlotdataArgs plotdata_args;
    CLI::App* plotdata =
        app.add_subcommand("plotdata", "flatten a report document into a tidy CSV");
    plotdata->add_option("--report", plotdata_args.report, "report JSON from select/simulate")
        ->required();
    plotdata->add_option("--out", plotdata_args.out, "output CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? kExitOk : kExitInput;
    }

    if (select->parsed()) return cmd_select(select_args);
    if (simulate->parsed()) return cmd_simulate(simulate_args);
    if (plotdata->parsed()) return cmd_plotdata(plotdata_args);
    return kExitInput;
}
