#pragma once

#include <string>
#include <vector>

#include "sflob/estimators.hpp"
#include "sflob/params.hpp"

namespace sflob {

/// 17-significant-digit decimal rendering (C locale); doubles survive a
/// format/parse round trip bit-exactly.
std::string format_g17(double x);
double parse_double(const std::string& text);
long long parse_int(const std::string& text);

/// Minimal CSV splitter for the plain (unquoted) tables this tool emits.
std::vector<std::vector<std::string>> parse_csv(const std::string& text);

std::string metrics_csv_header();
std::string metrics_csv_row(const ModelParams& params, const SeedSpec& seed,
                            const MetricsReport& report);
struct MetricsRow {
    ModelParams params;
    SeedSpec seed;
    MetricsReport report;
};
MetricsRow parse_metrics_csv(const std::string& text);

/// Two-column density table (r, rho), r at bin centers.
std::string density_csv(const DensityProfile& profile);
DensityProfile parse_density_csv(const std::string& text);

/// Gap means (k, mean_gap_ticks).
std::string gaps_csv(const MetricsReport& report);
std::vector<double> parse_gaps_csv(const std::string& text);

/// Lag impacts (lag, impact, ratio_to_lag1, n).
std::string impact_lag_csv(const MetricsReport& report);
void parse_impact_lag_csv(const std::string& text, std::vector<double>& impact,
                          std::vector<long long>& n);

/// Structured text document with the full report including arrays.
std::string metrics_json(const ModelParams& params, const SeedSpec& seed,
                         const MetricsReport& report);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

/// Event-log line format; header documented in the README.
std::string event_log_header();
std::string event_log_line(const EventRecord& record);

}  // namespace sflob
