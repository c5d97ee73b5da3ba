#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sflob/book.hpp"
#include "sflob/params.hpp"
#include "sflob/simulator.hpp"

namespace sflob {

/// Discretized relative-price density: values[k] estimates rho at
/// r = (k + 1/2) * grid_step, measured from the opposite best (ask orders vs
/// distance above the best bid), in orders per unit price.
struct DensityProfile {
    double grid_step = 0.0;
    std::vector<double> values;
};

struct MetricsReport {
    double measure_time = 0.0;
    long long n_events = 0;
    long long n_snapshots = 0;
    long long n_market_orders = 0;

    double spread_mean = 0.0;
    double spread_se = 0.0;
    long long spread_samples = 0;

    double impact_instant = 0.0;      // <eps*dm> at lag 1, price units
    double impact_instant_se = 0.0;
    double impact_buys = 0.0;         // lag-1 impact from buy orders only
    double impact_sells = 0.0;        // ... and from sells only
    std::vector<double> impact_lag;   // index l-1 holds lag-l impact
    std::vector<long long> impact_lag_n;

    double diffusion_D = 0.0;         // MSD slope, price^2 per unit time
    double diffusion_r2 = 0.0;
    bool diffusion_linear = false;    // R^2 >= 0.95 over the fit range
    long long diffusion_samples = 0;

    /// Strict accessor: throws NonlinearMSD when the fit range shows
    /// mean-reversion contamination (R^2 < 0.95).
    double diffusion_or_throw() const;

    DensityProfile density;

    std::vector<double> gap_means;    // tick units, k = 0..K; g0 = spread
    double gap_g0_se = 0.0;           // ticks
    long long gap_snapshots = 0;
    long long gap_skipped = 0;
    double gap_skip_fraction = 0.0;
};

/// Estimator configuration. Zeros mean "derive from the model parameters":
/// snapshot interval 1/(v+mu), MSD fit range [10,100]/(v+mu), density grid
/// step delta and range covering 20 diffusion lengths.
struct EstimatorSettings {
    double snapshot_interval = 0.0;
    double msd_fit_lo = 0.0;
    double msd_fit_hi = 0.0;
    int impact_lmax = 20;
    int gap_k = 15;
    double density_grid_step = 0.0;
    double density_rmax = 0.0;
    int batches = 20;

    EstimatorSettings resolved(const ModelParams& params) const;
};

/// Scalar time-series accumulator with batch-means standard errors. Merging
/// concatenates batch lists, so merged statistics are independent of merge
/// order and match a single pass over the concatenated stream.
class BatchMeans {
public:
    explicit BatchMeans(int batches = 20) : sum_(batches, 0.0), n_(batches, 0) {}
    void add(int batch, double x) {
        sum_[static_cast<std::size_t>(batch)] += x;
        n_[static_cast<std::size_t>(batch)] += 1;
    }
    void merge(const BatchMeans& other) {
        sum_.insert(sum_.end(), other.sum_.begin(), other.sum_.end());
        n_.insert(n_.end(), other.n_.begin(), other.n_.end());
    }
    long long count() const;
    double mean() const;
    /// Batch-means standard error; requires >= min_batches non-empty batches.
    double standard_error(int min_batches = 20) const;
    /// Non-throwing variant: 0 when too few batches.
    double standard_error_or_zero() const;

private:
    std::vector<double> sum_;
    std::vector<long long> n_;
};

/// Bundles the streaming estimators behind the simulator sink interfaces.
/// Single-writer during a run; states from parallel runs merge afterwards.
class EstimatorSet : public EventSink, public SnapshotSink {
public:
    EstimatorSet(const ModelParams& params, const EstimatorSettings& settings,
                 double measure_start, double measure_time);

    void on_event(const EventRecord& record) override;
    void on_snapshot(const BookState& state, double t) override;

    /// Clears the per-run pairing buffers (impact ring, MSD window). Must be
    /// called when a run's stream ends; merging is defined on ended runs.
    void end_run();

    void merge(const EstimatorSet& other);
    MetricsReport report() const;

    const EstimatorSettings& settings() const { return settings_; }

private:
    int batch_of(double t) const;

    ModelParams params_;
    EstimatorSettings settings_;
    double measure_start_ = 0.0;
    double measure_time_ = 0.0;

    long long n_events_ = 0;
    long long n_snapshots_ = 0;

    // spread
    BatchMeans spread_;

    // impact: ring of the last l_max market orders (sign, doubled mid before)
    struct PendingOrder {
        int sign;
        long long mid2_before;
    };
    std::vector<PendingOrder> impact_ring_;
    long long impact_orders_ = 0;
    std::vector<double> impact_sum_;       // per lag
    std::vector<long long> impact_n_;
    BatchMeans impact1_;
    double impact_buy_sum_ = 0.0;
    long long impact_buy_n_ = 0;
    double impact_sell_sum_ = 0.0;
    long long impact_sell_n_ = 0;

    // diffusion: midprice sampled at snapshot times
    int msd_lo_ = 0, msd_hi_ = 0;
    std::vector<double> msd_window_;       // ring buffer of samples (per run)
    long long msd_ring_pos_ = 0;           // samples seen in the current run
    long long msd_count_ = 0;              // samples seen in total
    std::vector<double> msd_sum_sq_;       // per lag in [msd_lo_, msd_hi_]
    std::vector<long long> msd_n_;

    // density
    double dens_step_ = 0.0;
    std::vector<double> dens_hist_;

    // gaps
    std::vector<double> gap_sum_;
    long long gap_n_ = 0;
    long long gap_skipped_ = 0;
    BatchMeans gap0_;
};

struct RunSpec {
    double warmup_time = -1.0;     // < 0: default_warmup(params)
    double measure_time = 0.0;
};

struct RunResult {
    MetricsReport report;
    bool completed = true;
    double aborted_at = 0.0;
};

/// Warm-up, measure, estimate. The optional tap receives every measured
/// event (used for event logging).
RunResult run_with_estimators(const ModelParams& params, const SeedSpec& seed,
                              const RunSpec& spec, const EstimatorSettings& settings,
                              EventSink* tap = nullptr);

/// Least-squares slope of MSD(tau) vs tau; exposed for the estimator tests.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace sflob
