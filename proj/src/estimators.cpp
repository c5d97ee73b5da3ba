#include "sflob/estimators.hpp"

#include <algorithm>
#include <cmath>

#include "sflob/errors.hpp"

namespace sflob {

EstimatorSettings EstimatorSettings::resolved(const ModelParams& p) const {
    EstimatorSettings s = *this;
    const double rate = p.v + p.mu;
    if (s.snapshot_interval <= 0.0) s.snapshot_interval = 1.0 / rate;
    if (s.msd_fit_lo <= 0.0) s.msd_fit_lo = 10.0 / rate;
    if (s.msd_fit_hi <= 0.0) s.msd_fit_hi = 100.0 / rate;
    if (s.density_grid_step <= 0.0) s.density_grid_step = p.delta;
    if (s.density_rmax <= 0.0) {
        const double d_theory = 2.0 * rate * rate * rate / (p.lambda * p.lambda);
        const double diffusion_len = std::sqrt(d_theory / p.v);
        s.density_rmax = std::max({20.0 * diffusion_len, 30.0 * p.epsilon(), 50.0 * p.delta});
    }
    // Keep the histogram bounded by widening bins, not growing their count.
    const double bins = s.density_rmax / s.density_grid_step;
    if (bins > 4000.0) s.density_grid_step = s.density_rmax / 4000.0;
    return s;
}

double MetricsReport::diffusion_or_throw() const {
    if (!diffusion_linear) throw NonlinearMSD(diffusion_r2);
    return diffusion_D;
}

long long BatchMeans::count() const {
    long long c = 0;
    for (long long n : n_) c += n;
    return c;
}

double BatchMeans::mean() const {
    double s = 0.0;
    long long c = 0;
    for (std::size_t i = 0; i < sum_.size(); ++i) {
        s += sum_[i];
        c += n_[i];
    }
    return c > 0 ? s / static_cast<double>(c) : 0.0;
}

double BatchMeans::standard_error(int min_batches) const {
    int nonempty = 0;
    for (long long n : n_)
        if (n > 0) ++nonempty;
    if (nonempty < min_batches)
        throw InsufficientSamples("batch means needs >= " + std::to_string(min_batches) +
                                  " batches, have " + std::to_string(nonempty));
    const double m = mean();
    double var = 0.0;
    for (std::size_t i = 0; i < sum_.size(); ++i) {
        if (n_[i] == 0) continue;
        const double bm = sum_[i] / static_cast<double>(n_[i]);
        var += (bm - m) * (bm - m);
    }
    var /= static_cast<double>(nonempty) * static_cast<double>(nonempty - 1);
    return std::sqrt(var);
}

double BatchMeans::standard_error_or_zero() const {
    try {
        return standard_error(2);
    } catch (const InsufficientSamples&) {
        return 0.0;
    }
}

EstimatorSet::EstimatorSet(const ModelParams& params, const EstimatorSettings& settings,
                           double measure_start, double measure_time)
    : params_(params), settings_(settings.resolved(params)), measure_start_(measure_start),
      measure_time_(measure_time), spread_(settings_.batches),
      impact1_(settings_.batches), gap0_(settings_.batches) {
    impact_ring_.reserve(static_cast<std::size_t>(settings_.impact_lmax));
    impact_sum_.assign(static_cast<std::size_t>(settings_.impact_lmax), 0.0);
    impact_n_.assign(static_cast<std::size_t>(settings_.impact_lmax), 0);

    msd_lo_ = std::max(1, static_cast<int>(std::lround(settings_.msd_fit_lo /
                                                       settings_.snapshot_interval)));
    msd_hi_ = std::max(msd_lo_ + 1, static_cast<int>(std::lround(settings_.msd_fit_hi /
                                                                 settings_.snapshot_interval)));
    msd_window_.assign(static_cast<std::size_t>(msd_hi_ + 1), 0.0);
    msd_sum_sq_.assign(static_cast<std::size_t>(msd_hi_ - msd_lo_ + 1), 0.0);
    msd_n_.assign(static_cast<std::size_t>(msd_hi_ - msd_lo_ + 1), 0);

    dens_step_ = settings_.density_grid_step;
    const std::size_t nbins =
        static_cast<std::size_t>(std::ceil(settings_.density_rmax / dens_step_));
    dens_hist_.assign(nbins, 0.0);

    gap_sum_.assign(static_cast<std::size_t>(settings_.gap_k + 1), 0.0);
}

int EstimatorSet::batch_of(double t) const {
    if (measure_time_ <= 0.0) return 0;
    const double frac = (t - measure_start_) / measure_time_;
    int b = static_cast<int>(frac * static_cast<double>(settings_.batches));
    return std::clamp(b, 0, settings_.batches - 1);
}

void EstimatorSet::on_event(const EventRecord& rec) {
    ++n_events_;
    if (rec.kind != EventKind::BuyMarket && rec.kind != EventKind::SellMarket) return;

    const int sign = rec.kind == EventKind::BuyMarket ? +1 : -1;
    const double half_tick = 0.5 * params_.delta;

    // Lag-l impact pairs this order's pre-event midprice with the midprice
    // just after the l-th market order counting from this one (l = 1 is the
    // order itself).
    const std::size_t lmax = impact_sum_.size();
    if (impact_ring_.size() == lmax && lmax > 0) {
        impact_ring_.erase(impact_ring_.begin());
    }
    impact_ring_.push_back({sign, rec.doubled_mid_before});
    ++impact_orders_;

    const std::size_t have = impact_ring_.size();
    for (std::size_t l = 1; l <= have; ++l) {
        const PendingOrder& origin = impact_ring_[have - l];
        const double dm = static_cast<double>(origin.sign) *
                          static_cast<double>(rec.doubled_mid_after - origin.mid2_before) *
                          half_tick;
        impact_sum_[l - 1] += dm;
        impact_n_[l - 1] += 1;
    }

    const double dm1 = static_cast<double>(sign) *
                       static_cast<double>(rec.doubled_mid_after - rec.doubled_mid_before) *
                       half_tick;
    impact1_.add(batch_of(rec.time), dm1);
    if (sign > 0) {
        impact_buy_sum_ += dm1;
        ++impact_buy_n_;
    } else {
        impact_sell_sum_ += dm1;
        ++impact_sell_n_;
    }
}

void EstimatorSet::on_snapshot(const BookState& state, double t) {
    ++n_snapshots_;
    const int batch = batch_of(t);

    // Spread.
    const double spread =
        static_cast<double>(state.best_ask - state.best_bid) * params_.delta;
    spread_.add(batch, spread);

    // Midprice series for the MSD.
    const double mid = static_cast<double>(state.doubled_mid()) * 0.5 * params_.delta;
    const std::size_t ring = msd_window_.size();
    const std::size_t pos =
        static_cast<std::size_t>(msd_ring_pos_ % static_cast<long long>(ring));
    for (int l = msd_lo_; l <= msd_hi_; ++l) {
        if (msd_ring_pos_ < l) break;
        const std::size_t prev =
            static_cast<std::size_t>((msd_ring_pos_ - l) % static_cast<long long>(ring));
        const double d = mid - msd_window_[prev];
        msd_sum_sq_[static_cast<std::size_t>(l - msd_lo_)] += d * d;
        msd_n_[static_cast<std::size_t>(l - msd_lo_)] += 1;
    }
    msd_window_[pos] = mid;
    ++msd_ring_pos_;
    ++msd_count_;

    // Ask-side density relative to the best bid.
    {
        long level = state.best_ask;
        const long top = state.best_bid +
                         static_cast<long>(std::ceil(settings_.density_rmax / params_.delta)) + 1;
        while (level <= top) {
            const double r = (static_cast<double>(level - state.best_bid) - 0.5) * params_.delta;
            const std::size_t bin = static_cast<std::size_t>(r / dens_step_);
            if (bin >= dens_hist_.size()) break;
            dens_hist_[bin] += static_cast<double>(state.asks.count_at(level));
            auto next = state.asks.first_occupied_at_or_above(level + 1);
            if (!next) break;
            level = *next;
        }
    }

    // Gap chain: requires K+1 occupied ask levels inside the window.
    {
        const int levels_needed = settings_.gap_k + 1;
        const long window_top = state.best_bid + params_.cutoff;
        std::vector<long> levels;
        levels.reserve(static_cast<std::size_t>(levels_needed));
        long level = state.best_ask;
        while (static_cast<int>(levels.size()) < levels_needed && level <= window_top) {
            levels.push_back(level);
            auto next = state.asks.first_occupied_at_or_above(level + 1);
            if (!next) break;
            level = *next;
        }
        if (static_cast<int>(levels.size()) < levels_needed) {
            ++gap_skipped_;
        } else {
            gap_sum_[0] += static_cast<double>(state.best_ask - state.best_bid);
            gap0_.add(batch, static_cast<double>(state.best_ask - state.best_bid));
            for (int k = 1; k <= settings_.gap_k; ++k)
                gap_sum_[static_cast<std::size_t>(k)] +=
                    static_cast<double>(levels[static_cast<std::size_t>(k)] -
                                        levels[static_cast<std::size_t>(k - 1)]);
            ++gap_n_;
        }
    }
}

void EstimatorSet::end_run() {
    impact_ring_.clear();
    msd_ring_pos_ = 0;
}

void EstimatorSet::merge(const EstimatorSet& other) {
    n_events_ += other.n_events_;
    n_snapshots_ += other.n_snapshots_;
    spread_.merge(other.spread_);

    impact_orders_ += other.impact_orders_;
    for (std::size_t i = 0; i < impact_sum_.size(); ++i) {
        impact_sum_[i] += other.impact_sum_[i];
        impact_n_[i] += other.impact_n_[i];
    }
    impact1_.merge(other.impact1_);
    impact_buy_sum_ += other.impact_buy_sum_;
    impact_buy_n_ += other.impact_buy_n_;
    impact_sell_sum_ += other.impact_sell_sum_;
    impact_sell_n_ += other.impact_sell_n_;

    for (std::size_t i = 0; i < msd_sum_sq_.size(); ++i) {
        msd_sum_sq_[i] += other.msd_sum_sq_[i];
        msd_n_[i] += other.msd_n_[i];
    }
    msd_count_ += other.msd_count_;

    for (std::size_t i = 0; i < dens_hist_.size(); ++i) dens_hist_[i] += other.dens_hist_[i];

    for (std::size_t i = 0; i < gap_sum_.size(); ++i) gap_sum_[i] += other.gap_sum_[i];
    gap_n_ += other.gap_n_;
    gap_skipped_ += other.gap_skipped_;
    gap0_.merge(other.gap0_);

    measure_time_ += other.measure_time_;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    LineFit fit;
    const std::size_t n = x.size();
    if (n < 2) return fit;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double dn = static_cast<double>(n);
    const double denom = dn * sxx - sx * sx;
    if (denom == 0.0) return fit;
    fit.slope = (dn * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / dn;
    double ss_res = 0, ss_tot = 0;
    const double ym = sy / dn;
    for (std::size_t i = 0; i < n; ++i) {
        const double pred = fit.intercept + fit.slope * x[i];
        ss_res += (y[i] - pred) * (y[i] - pred);
        ss_tot += (y[i] - ym) * (y[i] - ym);
    }
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

MetricsReport EstimatorSet::report() const {
    MetricsReport r;
    r.measure_time = measure_time_;
    r.n_events = n_events_;
    r.n_snapshots = n_snapshots_;
    r.n_market_orders = impact_orders_;

    r.spread_mean = spread_.mean();
    r.spread_se = spread_.standard_error_or_zero();
    r.spread_samples = spread_.count();

    if (impact_n_[0] > 0) {
        r.impact_instant = impact_sum_[0] / static_cast<double>(impact_n_[0]);
        r.impact_instant_se = impact1_.standard_error_or_zero();
    }
    r.impact_buys = impact_buy_n_ > 0 ? impact_buy_sum_ / static_cast<double>(impact_buy_n_) : 0.0;
    r.impact_sells =
        impact_sell_n_ > 0 ? impact_sell_sum_ / static_cast<double>(impact_sell_n_) : 0.0;
    r.impact_lag.resize(impact_sum_.size(), 0.0);
    r.impact_lag_n = impact_n_;
    for (std::size_t i = 0; i < impact_sum_.size(); ++i)
        if (impact_n_[i] > 0) r.impact_lag[i] = impact_sum_[i] / static_cast<double>(impact_n_[i]);

    // Diffusion: least-squares slope of MSD(tau) over the fit range.
    {
        std::vector<double> tau, msd;
        for (int l = msd_lo_; l <= msd_hi_; ++l) {
            const std::size_t i = static_cast<std::size_t>(l - msd_lo_);
            if (msd_n_[i] == 0) continue;
            tau.push_back(static_cast<double>(l) * settings_.snapshot_interval);
            msd.push_back(msd_sum_sq_[i] / static_cast<double>(msd_n_[i]));
        }
        if (tau.size() >= 2) {
            const LineFit fit = fit_line(tau, msd);
            r.diffusion_D = fit.slope;
            r.diffusion_r2 = fit.r_squared;
            r.diffusion_linear = fit.r_squared >= 0.95;
            r.diffusion_samples = msd_count_;
        }
    }

    r.density.grid_step = dens_step_;
    r.density.values.resize(dens_hist_.size(), 0.0);
    if (n_snapshots_ > 0)
        for (std::size_t i = 0; i < dens_hist_.size(); ++i)
            r.density.values[i] =
                dens_hist_[i] / (static_cast<double>(n_snapshots_) * dens_step_);

    r.gap_means.resize(gap_sum_.size(), 0.0);
    if (gap_n_ > 0)
        for (std::size_t i = 0; i < gap_sum_.size(); ++i)
            r.gap_means[i] = gap_sum_[i] / static_cast<double>(gap_n_);
    r.gap_g0_se = gap0_.standard_error_or_zero();
    r.gap_snapshots = gap_n_;
    r.gap_skipped = gap_skipped_;
    r.gap_skip_fraction =
        (gap_n_ + gap_skipped_) > 0
            ? static_cast<double>(gap_skipped_) / static_cast<double>(gap_n_ + gap_skipped_)
            : 0.0;
    return r;
}

RunResult run_with_estimators(const ModelParams& params, const SeedSpec& seed,
                              const RunSpec& spec, const EstimatorSettings& settings,
                              EventSink* tap) {
    validate(params);
    const double warmup = spec.warmup_time < 0.0 ? default_warmup(params) : spec.warmup_time;

    EstimatorSet set(params, settings, warmup, spec.measure_time);

    struct Tee : EventSink {
        EstimatorSet* set;
        EventSink* tap;
        void on_event(const EventRecord& rec) override {
            set->on_event(rec);
            if (tap) tap->on_event(rec);
        }
    } tee;
    tee.set = &set;
    tee.tap = tap;

    const SimOutcome outcome = simulate(params, seed, warmup, spec.measure_time,
                                        set.settings().snapshot_interval, &tee, &set);
    set.end_run();
    RunResult result;
    result.report = set.report();
    result.completed = outcome.completed;
    result.aborted_at = outcome.aborted_at;
    return result;
}

}  // namespace sflob
