#include "wavesel/expr.hpp"
#include "wavesel/simulate.hpp"

#include <json.hpp>

#include <fstream>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace wavesel {

namespace {

using nlohmann::json;

void collect_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                          const std::string& where, std::vector<std::string>& offending) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* key : allowed) {
            if (it.key() == key) {
                known = true;
                break;
            }
        }
        if (!known) offending.push_back(where + "." + it.key());
    }
}

[[noreturn]] void fail(const std::string& message) { throw std::invalid_argument(message); }

}  // namespace

SimulationPlan load_simulation_plan(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open config '" + path + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& err) {
        fail("config parse error in '" + path + "': " + err.what());
    }
    if (!doc.is_object()) fail("config root must be a JSON object");

    std::vector<std::string> offending;
    collect_unknown_keys(doc, {"runs", "threads", "wavelet", "models_file", "noise_reading"},
                         "config", offending);

    SimulationPlan plan;
    try {
        if (doc.contains("wavelet")) {
            const json& w = doc["wavelet"];
            if (!w.is_object()) fail("config.wavelet must be an object");
            collect_unknown_keys(w, {"basis", "j0", "threshold"}, "config.wavelet", offending);
            if (w.contains("basis")) plan.wavelet.basis = w["basis"].get<std::string>();
            if (w.contains("j0")) plan.wavelet.coarse_level = w["j0"].get<int>();
            if (w.contains("threshold")) {
                plan.wavelet.rule = parse_shrink_rule(w["threshold"].get<std::string>());
            }
        }
        if (doc.contains("threads")) plan.threads = doc["threads"].get<int>();
        NoiseReading plan_reading = NoiseReading::Variance;
        if (doc.contains("noise_reading")) {
            plan_reading = parse_noise_reading(doc["noise_reading"].get<std::string>());
        }

        std::vector<NlsModel> extras;
        if (doc.contains("models_file")) {
            extras = load_model_file(doc["models_file"].get<std::string>());
        }

        if (!doc.contains("runs") || !doc["runs"].is_array() || doc["runs"].empty()) {
            fail("config must define a non-empty 'runs' array");
        }
        int index = 0;
        for (const json& run : doc["runs"]) {
            const std::string where = "config.runs[" + std::to_string(index) + "]";
            if (!run.is_object()) fail(where + " must be an object");
            collect_unknown_keys(run,
                                 {"scenario", "true_model", "family", "link", "n", "dependence",
                                  "replications", "seed", "gap", "gap_fraction", "compare_noisy",
                                  "criteria", "noise_reading"},
                                 where, offending);

            ScenarioConfig cfg;
            cfg.wavelet = plan.wavelet;
            cfg.threads = plan.threads;
            cfg.extra_models = extras;
            cfg.noise_reading = plan_reading;
            if (run.contains("noise_reading")) {
                cfg.noise_reading = parse_noise_reading(run["noise_reading"].get<std::string>());
            }
            if (!run.contains("scenario")) fail(where + " needs a 'scenario'");
            cfg.scenario = parse_scenario(run["scenario"].get<std::string>());
            if (run.contains("true_model")) {
                cfg.true_model = run["true_model"].get<std::string>();
            } else if (cfg.scenario == Scenario::S1) {
                fail(where + " needs 'true_model' for scenario s1");
            } else {
                cfg.true_model = "f2";
            }
            const bool needs_glm = cfg.scenario == Scenario::S3 || cfg.scenario == Scenario::S4;
            if (needs_glm) {
                if (!run.contains("family") || !run.contains("link")) {
                    fail(where + " needs 'family' and 'link' for scenarios s3/s4");
                }
                cfg.family = parse_family(run["family"].get<std::string>());
                cfg.link = parse_link(run["link"].get<std::string>());
            }
            if (run.contains("n")) cfg.n = run["n"].get<int>();
            if (run.contains("dependence")) {
                cfg.dependence = parse_dependence(run["dependence"].get<std::string>());
            }
            if (run.contains("replications")) cfg.replications = run["replications"].get<int>();
            if (run.contains("seed")) cfg.seed = run["seed"].get<std::uint64_t>();
            if (run.contains("gap")) cfg.gap = run["gap"].get<bool>();
            if (run.contains("gap_fraction")) cfg.gap_fraction = run["gap_fraction"].get<double>();
            if (run.contains("compare_noisy")) cfg.compare_noisy = run["compare_noisy"].get<bool>();
            if (run.contains("criteria")) {
                cfg.criteria = run["criteria"].get<std::string>();
                if (cfg.criteria != "rmse" && cfg.criteria != "mae" && cfg.criteria != "both") {
                    fail(where + ".criteria must be rmse, mae, or both");
                }
            }
            plan.runs.push_back(std::move(cfg));
            ++index;
        }
    } catch (const json::exception& err) {
        fail("config value error in '" + path + "': " + err.what());
    }

    if (!offending.empty()) {
        std::string message = "unknown config keys:";
        for (const std::string& key : offending) message += " " + key;
        fail(message);
    }
    return plan;
}

}  // namespace wavesel
