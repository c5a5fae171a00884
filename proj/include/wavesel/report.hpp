#pragma once

#include "wavesel/selector.hpp"
#include "wavesel/simulate.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace wavesel {

inline constexpr const char* kToolName = "wavesel";
inline constexpr const char* kToolVersion = "1.0.0";

struct ReportMetadata {
    std::string tool = kToolName;
    std::string version = kToolVersion;
    std::uint64_t seed = 0;
    std::string config_hash;
    std::string timestamp;
};

/// Current UTC time in ISO-8601, or the fixed epoch string when `fixed`
/// (byte-identical reruns).
std::string report_timestamp(bool fixed);

/// FNV-1a 64-bit digest of a canonical configuration string, hex-encoded.
std::string config_digest(const std::string& canonical_text);

/// A selection run with enough context to replot it: the predictor actually
/// shown to the wavelet stage, the observations, and the full report.
struct SelectionDocument {
    ReportMetadata meta;
    std::vector<double> x;
    std::vector<double> y;
    SelectionReport report;
};

void write_selection_document(const std::string& path, const SelectionDocument& doc);
SelectionDocument read_selection_document(const std::string& path);

/// One scenario run: its configuration (user-registered models echoed by id)
/// and the aggregated result.
struct ScenarioRunRecord {
    ScenarioConfig config;
    std::vector<std::string> extra_model_ids;
    MonteCarloResult result;
};

struct MonteCarloDocument {
    ReportMetadata meta;
    std::vector<ScenarioRunRecord> runs;
};

void write_montecarlo_document(const std::string& path, const MonteCarloDocument& doc);
MonteCarloDocument read_montecarlo_document(const std::string& path);

/// "selection" or "montecarlo"; throws std::runtime_error for anything that
/// is not a readable report document.
std::string document_kind(const std::string& path);

}  // namespace wavesel
