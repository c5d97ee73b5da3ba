#include <doctest.h>

#include <cmath>

#include "sflob/config.hpp"
#include "sflob/csv.hpp"
#include "sflob/errors.hpp"
#include "sflob/estimators.hpp"

using namespace sflob;

TEST_CASE("g17 format round-trips doubles bit-exactly") {
    for (double x : {0.1, 1.0 / 3.0, 1.1e-3, 6.02214076e23, -2.5e-308, 0.0, 1234.5678901234567}) {
        CHECK(parse_double(format_g17(x)) == x);
    }
}

TEST_CASE("config round-trips through its file format losslessly") {
    ExperimentConfig cfg = ExperimentConfig::desk();
    cfg.params.lambda = 1234.567890123;
    cfg.params.mu = 1.0 / 7.0;
    cfg.seed = {0x0123456789abcdefULL, 42};
    cfg.warmup_time = 123.456;
    cfg.measure_time = 2.0 / 3.0;
    cfg.sweep = {0.1, 100.0, 7};
    cfg.est.snapshot_interval = 0.25;
    cfg.est.gap_k = 9;
    cfg.out_dir = "some/dir";
    cfg.threads = 3;
    cfg.event_log = true;

    const std::string text = cfg.to_text();
    const ExperimentConfig back = ExperimentConfig::from_text(text, ExperimentConfig::desk());
    CHECK(back.to_text() == text);
    CHECK(back.params.lambda == cfg.params.lambda);
    CHECK(back.params.mu == cfg.params.mu);
    CHECK(back.seed == cfg.seed);
    CHECK(back.measure_time == cfg.measure_time);
    CHECK(back.sweep.points == 7);
    CHECK(back.est.gap_k == 9);
    CHECK(back.out_dir == "some/dir");
    CHECK(back.event_log);
}

TEST_CASE("config files accept comments and whitespace; bad keys are rejected") {
    const std::string text = "# a comment\n  sim.lambda = 2500 \n\nsim.mu=0.5 # trailing\n";
    const ExperimentConfig cfg = ExperimentConfig::from_text(text, ExperimentConfig::desk());
    CHECK(cfg.params.lambda == 2500.0);
    CHECK(cfg.params.mu == 0.5);
    CHECK_THROWS_AS(ExperimentConfig::from_text("bogus.key=1\n", ExperimentConfig::desk()),
                    ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_text("sim.lambda\n", ExperimentConfig::desk()),
                    ConfigError);
}

TEST_CASE("config invariants: sweep must increase, times non-negative") {
    ExperimentConfig cfg = ExperimentConfig::desk();
    cfg.sweep = {10.0, 0.1, 5};  // decreasing
    CHECK_THROWS_AS(cfg.check(), ConfigError);
    cfg.sweep = {0.1, 10.0, 5};
    CHECK_NOTHROW(cfg.check());
    cfg.measure_time = -1.0;
    CHECK_THROWS_AS(cfg.check(), ConfigError);
}

TEST_CASE("sweep grid is geometric and strictly increasing") {
    const SweepGrid grid{0.01, 1000.0, 6};
    const auto mus = grid.values();
    REQUIRE(mus.size() == 6);
    CHECK(mus.front() == doctest::Approx(0.01));
    CHECK(mus.back() == doctest::Approx(1000.0));
    for (std::size_t i = 1; i < mus.size(); ++i) {
        CHECK(mus[i] > mus[i - 1]);
        CHECK(mus[i] / mus[i - 1] == doctest::Approx(10.0).epsilon(1e-9));
    }
}

namespace {

MetricsReport sample_report() {
    MetricsReport r;
    r.measure_time = 123.0;
    r.n_events = 456;
    r.n_snapshots = 78;
    r.n_market_orders = 9;
    r.spread_mean = 1.1e-3 / 3.0;
    r.spread_se = 2e-5;
    r.spread_samples = 78;
    r.impact_instant = 5.5e-4 / 7.0;
    r.impact_instant_se = 1e-5;
    r.impact_buys = 5.6e-4;
    r.impact_sells = 5.4e-4;
    r.impact_lag = {5.5e-4, 5.0e-4, 4.5e-4};
    r.impact_lag_n = {9, 8, 7};
    r.diffusion_D = 2.123456789e-6;
    r.diffusion_r2 = 0.987;
    r.diffusion_linear = true;
    r.diffusion_samples = 78;
    r.density.grid_step = 1e-4;
    r.density.values = {909.09, 950.0, 1000.0 / 3.0};
    r.gap_means = {11.0 / 3.0, 7.0, 9.5};
    r.gap_g0_se = 0.125;
    r.gap_snapshots = 70;
    r.gap_skipped = 8;
    r.gap_skip_fraction = 8.0 / 78.0;
    return r;
}

}  // namespace

TEST_CASE("metrics CSV row re-parses to the identical report") {
    const ModelParams p{1000.0, 1.0, 1.0 / 3.0, 1e-4, 10000};
    const SeedSpec seed{0xdeadbeefULL, 17};
    const MetricsReport r = sample_report();

    const std::string text = metrics_csv_header() + "\n" + metrics_csv_row(p, seed, r) + "\n";
    const MetricsRow back = parse_metrics_csv(text);
    CHECK(back.params == p);
    CHECK(back.seed == seed);
    CHECK(back.report.measure_time == r.measure_time);
    CHECK(back.report.n_events == r.n_events);
    CHECK(back.report.spread_mean == r.spread_mean);
    CHECK(back.report.spread_se == r.spread_se);
    CHECK(back.report.impact_instant == r.impact_instant);
    CHECK(back.report.impact_buys == r.impact_buys);
    CHECK(back.report.impact_sells == r.impact_sells);
    CHECK(back.report.diffusion_D == r.diffusion_D);
    CHECK(back.report.diffusion_r2 == r.diffusion_r2);
    CHECK(back.report.diffusion_linear == r.diffusion_linear);
    CHECK(back.report.gap_g0_se == r.gap_g0_se);
    CHECK(back.report.gap_skip_fraction == r.gap_skip_fraction);
}

TEST_CASE("density, gap and lag tables re-parse exactly") {
    const MetricsReport r = sample_report();

    const DensityProfile d = parse_density_csv(density_csv(r.density));
    CHECK(d.grid_step == r.density.grid_step);
    REQUIRE(d.values.size() == r.density.values.size());
    for (std::size_t i = 0; i < d.values.size(); ++i)
        CHECK(d.values[i] == r.density.values[i]);

    const auto gaps = parse_gaps_csv(gaps_csv(r));
    REQUIRE(gaps.size() == r.gap_means.size());
    for (std::size_t i = 0; i < gaps.size(); ++i) CHECK(gaps[i] == r.gap_means[i]);

    std::vector<double> lag;
    std::vector<long long> n;
    parse_impact_lag_csv(impact_lag_csv(r), lag, n);
    REQUIRE(lag.size() == r.impact_lag.size());
    for (std::size_t i = 0; i < lag.size(); ++i) {
        CHECK(lag[i] == r.impact_lag[i]);
        CHECK(n[i] == r.impact_lag_n[i]);
    }
}

TEST_CASE("event log lines carry the documented fields") {
    EventRecord rec;
    rec.time = 12.5;
    rec.kind = EventKind::BuyMarket;
    rec.level = 42;
    rec.rel_level = 3;
    rec.doubled_mid_before = 81;
    rec.doubled_mid_after = 85;
    CHECK(event_log_header() == "time,kind,level,rel_level,doubled_mid_before,doubled_mid_after");
    CHECK(event_log_line(rec) == "12.5,buy_market,42,3,81,85");
}

TEST_CASE("metrics json is emitted with the full arrays") {
    const ModelParams p{1000.0, 1.0, 1.0, 1e-4, 10000};
    const std::string doc = metrics_json(p, {1, 2}, sample_report());
    CHECK(doc.find("\"spread\"") != std::string::npos);
    CHECK(doc.find("\"lags\"") != std::string::npos);
    CHECK(doc.find("\"means_ticks\"") != std::string::npos);
    CHECK(doc.find(format_g17(2.123456789e-6)) != std::string::npos);
}
