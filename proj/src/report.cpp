#include "wavesel/report.hpp"

#include <json.hpp>

#include <cmath>
#include <ctime>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace wavesel {

namespace {

using nlohmann::json;

json number_or_null(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

double number_from(const json& v) {
    if (v.is_null()) return std::numeric_limits<double>::quiet_NaN();
    return v.get<double>();
}

json meta_to_json(const ReportMetadata& meta) {
    return json{{"tool", meta.tool},
                {"version", meta.version},
                {"seed", meta.seed},
                {"config_hash", meta.config_hash},
                {"timestamp", meta.timestamp}};
}

ReportMetadata meta_from_json(const json& j) {
    ReportMetadata meta;
    meta.tool = j.at("tool").get<std::string>();
    meta.version = j.at("version").get<std::string>();
    meta.seed = j.at("seed").get<std::uint64_t>();
    meta.config_hash = j.at("config_hash").get<std::string>();
    meta.timestamp = j.at("timestamp").get<std::string>();
    return meta;
}

json load_document(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open report '" + path + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& err) {
        throw std::runtime_error("unreadable report '" + path + "': " + err.what());
    }
    if (!doc.is_object() || !doc.contains("kind")) {
        throw std::runtime_error("'" + path + "' is not a report document");
    }
    return doc;
}

void store_document(const std::string& path, const json& doc) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write report '" + path + "'");
    out << doc.dump(2) << '\n';
}

}  // namespace

std::string report_timestamp(bool fixed) {
    if (fixed) return "1970-01-01T00:00:00Z";
    const std::time_t now = std::time(nullptr);
    std::tm utc{};
    gmtime_r(&now, &utc);
    char buffer[32];
    std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &utc);
    return buffer;
}

std::string config_digest(const std::string& canonical_text) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical_text) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    char buffer[17];
    std::snprintf(buffer, sizeof(buffer), "%016llx", static_cast<unsigned long long>(hash));
    return buffer;
}

void write_selection_document(const std::string& path, const SelectionDocument& doc) {
    json candidates = json::array();
    for (const CandidateScore& cs : doc.report.scores) {
        candidates.push_back(json{{"id", cs.id},
                                  {"rmse", number_or_null(cs.rmse)},
                                  {"mae", number_or_null(cs.mae)},
                                  {"fit_ok", cs.fit_ok},
                                  {"error", cs.error},
                                  {"fitted", cs.fitted}});
    }
    const json j{{"kind", "selection"},
                 {"meta", meta_to_json(doc.meta)},
                 {"data", json{{"x", doc.x}, {"y", doc.y}}},
                 {"wavelet", json{{"fitted", doc.report.wavelet_fitted},
                                  {"eta_scaled", doc.report.eta_scaled},
                                  {"null_fraction_by_level", doc.report.null_fraction_by_level},
                                  {"eta_min", doc.report.eta_min},
                                  {"eta_max", doc.report.eta_max},
                                  {"lambda", doc.report.lambda},
                                  {"sigma_hat", doc.report.sigma_hat}}},
                 {"candidates", candidates},
                 {"winner_rmse", doc.report.winner_rmse},
                 {"winner_mae", doc.report.winner_mae}};
    store_document(path, j);
}

SelectionDocument read_selection_document(const std::string& path) {
    const json j = load_document(path);
    try {
        if (j.at("kind").get<std::string>() != "selection") {
            throw std::runtime_error("'" + path + "' is not a selection report");
        }
        SelectionDocument doc;
        doc.meta = meta_from_json(j.at("meta"));
        doc.x = j.at("data").at("x").get<std::vector<double>>();
        doc.y = j.at("data").at("y").get<std::vector<double>>();
        const json& w = j.at("wavelet");
        doc.report.wavelet_fitted = w.at("fitted").get<std::vector<double>>();
        doc.report.eta_scaled = w.at("eta_scaled").get<std::vector<double>>();
        doc.report.null_fraction_by_level =
            w.at("null_fraction_by_level").get<std::vector<double>>();
        doc.report.eta_min = w.at("eta_min").get<double>();
        doc.report.eta_max = w.at("eta_max").get<double>();
        doc.report.lambda = w.at("lambda").get<double>();
        doc.report.sigma_hat = w.at("sigma_hat").get<double>();
        for (const json& c : j.at("candidates")) {
            CandidateScore cs;
            cs.id = c.at("id").get<std::string>();
            cs.rmse = number_from(c.at("rmse"));
            cs.mae = number_from(c.at("mae"));
            cs.fit_ok = c.at("fit_ok").get<bool>();
            cs.error = c.at("error").get<std::string>();
            cs.fitted = c.at("fitted").get<std::vector<double>>();
            doc.report.scores.push_back(std::move(cs));
        }
        doc.report.winner_rmse = j.at("winner_rmse").get<std::string>();
        doc.report.winner_mae = j.at("winner_mae").get<std::string>();
        return doc;
    } catch (const json::exception& err) {
        throw std::runtime_error("malformed selection report '" + path + "': " + err.what());
    }
}

void write_montecarlo_document(const std::string& path, const MonteCarloDocument& doc) {
    json runs = json::array();
    for (const ScenarioRunRecord& run : doc.runs) {
        const ScenarioConfig& c = run.config;
        json jc{{"scenario", scenario_name(c.scenario)},
                {"true_model", c.true_model},
                {"family", family_name(c.family)},
                {"link", link_name(c.link)},
                {"n", c.n},
                {"dependence", dependence_name(c.dependence)},
                {"replications", c.replications},
                {"seed", c.seed},
                {"gap", c.gap},
                {"gap_fraction", c.gap_fraction},
                {"compare_noisy", c.compare_noisy},
                {"criteria", c.criteria},
                {"wavelet", json{{"basis", c.wavelet.basis},
                                 {"j0", c.wavelet.coarse_level},
                                 {"threshold",
                                  c.wavelet.rule == ShrinkRule::Soft ? "soft" : "hard"}}},
                {"extra_models", run.extra_model_ids}};
        const MonteCarloResult& r = run.result;
        json jr{{"completed", r.completed},
                {"failed", r.failed},
                {"rate_rmse", r.rate_rmse},
                {"rate_mae", r.rate_mae},
                {"winners_rmse", r.winners_rmse},
                {"winners_mae", r.winners_mae},
                {"null_fraction_mean", r.null_fraction_mean},
                {"glm_win_rmse", r.glm_win_rmse},
                {"glm_win_mae", r.glm_win_mae}};
        runs.push_back(json{{"config", std::move(jc)}, {"result", std::move(jr)}});
    }
    store_document(path,
                   json{{"kind", "montecarlo"}, {"meta", meta_to_json(doc.meta)}, {"runs", runs}});
}

MonteCarloDocument read_montecarlo_document(const std::string& path) {
    const json j = load_document(path);
    try {
        if (j.at("kind").get<std::string>() != "montecarlo") {
            throw std::runtime_error("'" + path + "' is not a simulation report");
        }
        MonteCarloDocument doc;
        doc.meta = meta_from_json(j.at("meta"));
        for (const json& entry : j.at("runs")) {
            ScenarioRunRecord run;
            const json& jc = entry.at("config");
            run.config.scenario = parse_scenario(jc.at("scenario").get<std::string>());
            run.config.true_model = jc.at("true_model").get<std::string>();
            run.config.family = parse_family(jc.at("family").get<std::string>());
            run.config.link = parse_link(jc.at("link").get<std::string>());
            run.config.n = jc.at("n").get<int>();
            run.config.dependence = parse_dependence(jc.at("dependence").get<std::string>());
            run.config.replications = jc.at("replications").get<int>();
            run.config.seed = jc.at("seed").get<std::uint64_t>();
            run.config.gap = jc.at("gap").get<bool>();
            run.config.gap_fraction = jc.at("gap_fraction").get<double>();
            run.config.compare_noisy = jc.at("compare_noisy").get<bool>();
            run.config.criteria = jc.at("criteria").get<std::string>();
            run.config.wavelet.basis = jc.at("wavelet").at("basis").get<std::string>();
            run.config.wavelet.coarse_level = jc.at("wavelet").at("j0").get<int>();
            run.config.wavelet.rule =
                parse_shrink_rule(jc.at("wavelet").at("threshold").get<std::string>());
            run.extra_model_ids = jc.at("extra_models").get<std::vector<std::string>>();
            const json& jr = entry.at("result");
            run.result.completed = jr.at("completed").get<int>();
            run.result.failed = jr.at("failed").get<int>();
            run.result.rate_rmse = jr.at("rate_rmse").get<double>();
            run.result.rate_mae = jr.at("rate_mae").get<double>();
            run.result.winners_rmse = jr.at("winners_rmse").get<std::vector<std::string>>();
            run.result.winners_mae = jr.at("winners_mae").get<std::vector<std::string>>();
            run.result.null_fraction_mean =
                jr.at("null_fraction_mean").get<std::vector<double>>();
            run.result.glm_win_rmse = jr.at("glm_win_rmse").get<double>();
            run.result.glm_win_mae = jr.at("glm_win_mae").get<double>();
            doc.runs.push_back(std::move(run));
        }
        return doc;
    } catch (const json::exception& err) {
        throw std::runtime_error("malformed simulation report '" + path + "': " + err.what());
    }
}

std::string document_kind(const std::string& path) {
    const json j = load_document(path);
    const auto kind = j.at("kind").get<std::string>();
    if (kind != "selection" && kind != "montecarlo") {
        throw std::runtime_error("'" + path + "' has unknown report kind '" + kind + "'");
    }
    return kind;
}

}  // namespace wavesel
