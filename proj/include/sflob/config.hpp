#pragma once

#include <string>
#include <vector>

#include "sflob/estimators.hpp"
#include "sflob/params.hpp"

namespace sflob {

/// Geometric market-order-intensity grid for sweeps.
struct SweepGrid {
    double mu_min = 0.0;
    double mu_max = 0.0;
    int points = 0;

    bool present() const { return points > 0; }
    std::vector<double> values() const;
};

/// Full experiment description. Lives in a flat key=value file with dotted
/// keys; command-line flags override file values and the resolved config is
/// echoed into the output directory.
struct ExperimentConfig {
    ModelParams params{1000.0, 1.0, 1.0, 1e-4, 10000};
    SeedSpec seed{20240601ULL, 0};
    double warmup_time = -1.0;  // < 0: derived default
    double measure_time = 2000.0;
    SweepGrid sweep;
    EstimatorSettings est;
    std::string out_dir = "out";
    int threads = 1;
    bool event_log = false;

    /// Desk-scale defaults (lambda=1000, v=1, delta=1e-4, L=1e4).
    static ExperimentConfig desk();
    /// Paper-scale preset (lambda=10000, v=1, delta=1e-6, L=1e6).
    static ExperimentConfig paper();

    void set(const std::string& key, const std::string& value);
    std::string to_text() const;
    static ExperimentConfig from_text(const std::string& text, ExperimentConfig base);

    /// Validates parameter and grid invariants; throws ConfigError.
    void check() const;
};

}  // namespace sflob
