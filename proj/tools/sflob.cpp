// Command-line front end: simulation runs, mu sweeps, closed-form theory
// tables, the steady-state density solver, gap-chain shooting, and the
// simulation-vs-theory comparison verdicts. All numeric output is C-locale
// decimal with 17 significant digits.

#include <CLI11.hpp>

#include <array>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <thread>
#include <vector>

#include "sflob/config.hpp"
#include "sflob/csv.hpp"
#include "sflob/errors.hpp"
#include "sflob/estimators.hpp"
#include "sflob/gapchain.hpp"
#include "sflob/simulator.hpp"
#include "sflob/theory.hpp"

namespace fs = std::filesystem;
using namespace sflob;

namespace {

struct CommonOpts {
    std::string config_path;
    std::string preset = "desk";
    std::optional<std::uint64_t> seed;
    std::optional<double> mu;
    std::optional<std::string> out_dir;
    std::optional<int> threads;
    bool event_log = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "key=value config file");
    cmd->add_option("--preset", opts.preset, "parameter preset: desk or paper")
        ->check(CLI::IsMember({"desk", "paper"}));
    cmd->add_option("--seed", opts.seed, "master seed (64-bit)");
    cmd->add_option("--mu", opts.mu, "market-order intensity");
    cmd->add_option("--out", opts.out_dir, "output directory");
    cmd->add_option("--threads", opts.threads, "worker threads for sweeps");
    cmd->add_flag("--event-log", opts.event_log, "stream the event log to events.csv");
}

ExperimentConfig resolve_config(const CommonOpts& opts) {
    ExperimentConfig cfg =
        opts.preset == "paper" ? ExperimentConfig::paper() : ExperimentConfig::desk();
    if (!opts.config_path.empty())
        cfg = ExperimentConfig::from_text(read_text_file(opts.config_path), cfg);
    if (opts.seed) cfg.seed.master_seed = *opts.seed;
    if (opts.mu) cfg.params.mu = *opts.mu;
    if (opts.out_dir) cfg.out_dir = *opts.out_dir;
    if (opts.threads) cfg.threads = *opts.threads;
    if (opts.event_log) cfg.event_log = true;
    cfg.check();
    return cfg;
}

void prepare_out_dir(const ExperimentConfig& cfg) {
    fs::create_directories(cfg.out_dir);
    write_text_file((fs::path(cfg.out_dir) / "config_resolved.cfg").string(), cfg.to_text());
}

class EventLogFile : public EventSink {
public:
    explicit EventLogFile(const std::string& path) : out_(path, std::ios::binary) {
        if (!out_) throw Error("cannot write " + path);
        out_ << event_log_header() << '\n';
    }
    void on_event(const EventRecord& rec) override { out_ << event_log_line(rec) << '\n'; }

private:
    std::ofstream out_;
};

int cmd_simulate(const CommonOpts& opts) {
    ExperimentConfig cfg = resolve_config(opts);
    prepare_out_dir(cfg);
    const RegimeReport regime = validate(cfg.params);
    std::cerr << "regime: " << regime.summary() << '\n';

    std::unique_ptr<EventLogFile> log;
    if (cfg.event_log)
        log = std::make_unique<EventLogFile>((fs::path(cfg.out_dir) / "events.csv").string());

    RunSpec spec{cfg.warmup_time, cfg.measure_time};
    const RunResult result = run_with_estimators(cfg.params, cfg.seed, spec, cfg.est, log.get());

    const fs::path out(cfg.out_dir);
    write_text_file((out / "metrics.csv").string(),
                    metrics_csv_header() + "\n" +
                        metrics_csv_row(cfg.params, cfg.seed, result.report) + "\n");
    write_text_file((out / "metrics.json").string(),
                    metrics_json(cfg.params, cfg.seed, result.report));
    write_text_file((out / "density.csv").string(), density_csv(result.report.density));
    write_text_file((out / "gaps.csv").string(), gaps_csv(result.report));
    write_text_file((out / "impact_lags.csv").string(), impact_lag_csv(result.report));

    if (!result.completed) {
        std::cerr << "run aborted: a book side emptied at t=" << format_g17(result.aborted_at)
                  << "; partial metrics written\n";
        return 2;
    }
    std::cout << "spread=" << format_g17(result.report.spread_mean)
              << " impact=" << format_g17(result.report.impact_instant)
              << " D=" << format_g17(result.report.diffusion_D) << '\n';
    return 0;
}

struct SweepPoint {
    double mu = 0.0;
    MetricsReport report;
    TheoryMetrics theory;
    bool ok = false;
    std::string status;
};

std::vector<SweepPoint> run_sweep(const ExperimentConfig& cfg) {
    const std::vector<double> mus = cfg.sweep.values();
    std::vector<SweepPoint> points(mus.size());
    std::atomic<std::size_t> next{0};

    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= mus.size()) return;
            SweepPoint& pt = points[i];
            pt.mu = mus[i];
            ModelParams p = cfg.params;
            p.mu = mus[i];
            pt.theory = theory_metrics(p);
            try {
                RunSpec spec{cfg.warmup_time, cfg.measure_time};
                const SeedSpec seed{cfg.seed.master_seed, i};
                const RunResult r = run_with_estimators(p, seed, spec, cfg.est);
                pt.report = r.report;
                pt.ok = r.completed;
                pt.status =
                    r.completed ? "ok" : "side_emptied_at_" + format_g17(r.aborted_at);
            } catch (const std::exception& e) {
                pt.ok = false;
                pt.status = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    const int n_threads = std::max(1, cfg.threads);
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    return points;
}

std::string sweep_csv(const std::vector<SweepPoint>& points) {
    std::ostringstream os;
    os << "index,mu,metric,simulated,se,theory,ratio,status\n";
    for (std::size_t i = 0; i < points.size(); ++i) {
        const SweepPoint& pt = points[i];
        const auto row = [&](const char* metric, double sim, double se, double th) {
            const double ratio = th != 0.0 && pt.ok ? sim / th : 0.0;
            os << i << ',' << format_g17(pt.mu) << ',' << metric << ','
               << format_g17(pt.ok ? sim : 0.0) << ',' << format_g17(pt.ok ? se : 0.0) << ','
               << format_g17(th) << ',' << format_g17(ratio) << ',' << pt.status << '\n';
        };
        row("spread", pt.report.spread_mean, pt.report.spread_se, pt.theory.spread);
        row("impact", pt.report.impact_instant, pt.report.impact_instant_se, pt.theory.impact);
        row("diffusion", pt.report.diffusion_D, 0.0, pt.theory.diffusion);
    }
    return os.str();
}

int cmd_sweep(const CommonOpts& opts) {
    ExperimentConfig cfg = resolve_config(opts);
    if (!cfg.sweep.present())
        throw ConfigError("sweep requires sweep.mu_min/mu_max/points in the config");
    prepare_out_dir(cfg);
    const auto points = run_sweep(cfg);
    write_text_file((fs::path(cfg.out_dir) / "sweep.csv").string(), sweep_csv(points));
    int failures = 0;
    for (const auto& pt : points)
        if (!pt.ok) ++failures;
    std::cout << points.size() << " sweep points, " << failures << " failed\n";
    return 0;
}

std::string theory_metrics_header() { return "lambda,v,mu,delta,spread,impact,diffusion"; }

std::string theory_metrics_row(const ModelParams& p) {
    const TheoryMetrics m = theory_metrics(p);
    std::ostringstream os;
    os << format_g17(p.lambda) << ',' << format_g17(p.v) << ',' << format_g17(p.mu) << ','
       << format_g17(p.delta) << ',' << format_g17(m.spread) << ',' << format_g17(m.impact)
       << ',' << format_g17(m.diffusion);
    return os.str();
}

int cmd_theory(const CommonOpts& opts, double grid_step, double r_max, int gap_k,
               double gap_tol) {
    ExperimentConfig cfg = resolve_config(opts);
    prepare_out_dir(cfg);
    const ModelParams& p = cfg.params;
    const fs::path out(cfg.out_dir);

    // Closed-form metrics: one row per mu when a sweep grid is present.
    {
        std::ostringstream os;
        os << theory_metrics_header() << '\n';
        if (cfg.sweep.present()) {
            for (double mu : cfg.sweep.values()) {
                ModelParams q = p;
                q.mu = mu;
                os << theory_metrics_row(q) << '\n';
            }
        } else {
            os << theory_metrics_row(p) << '\n';
        }
        write_text_file((out / "theory_metrics.csv").string(), os.str());
    }

    // Stationary and method-of-image profiles on a grid.
    {
        if (grid_step <= 0.0) grid_step = p.epsilon() / 20.0;
        if (r_max <= 0.0) {
            const TheoryProfile tp = theory_profile(p);
            r_max = 20.0 / tp.decay_rate;
        }
        std::ostringstream os;
        os << "r,stationary,image\n";
        for (double r = 0.0; r <= r_max; r += grid_step)
            os << format_g17(r) << ',' << format_g17(stationary_profile(p, r)) << ','
               << format_g17(image_profile(p, r)) << '\n';
        write_text_file((out / "profiles.csv").string(), os.str());
    }

    // Gap-chain shooting.
    try {
        const ShootResult shoot = gap_chain_shoot(p, gap_k, gap_tol);
        std::ostringstream os;
        os << "k,mean_gap_ticks\n";
        for (std::size_t k = 0; k < shoot.chain.g.size(); ++k)
            os << k << ',' << format_g17(shoot.chain.g[k]) << '\n';
        write_text_file((out / "gap_chain.csv").string(), os.str());
        std::ostringstream sum;
        sum << "g0_star_ticks=" << format_g17(shoot.g0_star) << '\n'
            << "implied_spread=" << format_g17(shoot.g0_star * p.delta) << '\n'
            << "classification=" << to_string(shoot.chain.classification) << '\n'
            << "upper_bound_ticks=" << format_g17(gap_chain_threshold(p)) << '\n'
            << "limit_gap_ticks=" << format_g17(gap_chain_limit(p)) << '\n';
        write_text_file((out / "gap_shoot.txt").string(), sum.str());
    } catch (const NoBracketError& e) {
        std::cerr << "gap-chain shooting: " << e.what() << '\n';
    }
    std::cout << "theory tables written to " << cfg.out_dir << '\n';
    return 0;
}

int cmd_solve_boltzmann(const CommonOpts& opts, double grid_step, double r_max, double tol,
                        int max_iter) {
    ExperimentConfig cfg = resolve_config(opts);
    prepare_out_dir(cfg);
    const ModelParams& p = cfg.params;
    const TheoryProfile tp = theory_profile(p);
    if (grid_step <= 0.0) grid_step = p.epsilon() / 10.0;
    if (r_max <= 0.0) r_max = 20.0 * std::sqrt(tp.diffusion / p.v);

    const fs::path out(cfg.out_dir);
    const BoltzmannSolution sol =
        solve_boltzmann_steady_nothrow(p, grid_step, r_max, tol, max_iter);
    if (!sol.converged)
        std::cerr << "no convergence after " << sol.iterations + 1
                  << " iterations, residual " << format_g17(sol.final_residual) << '\n';

    {
        std::ostringstream os;
        os << "r,rho_numeric,rho_closed_form,rel_diff\n";
        for (std::size_t k = 0; k < sol.profile.cells(); ++k) {
            const double r = sol.profile.center(k);
            const double num = sol.profile.values()[k];
            const double cf = stationary_profile(p, r);
            os << format_g17(r) << ',' << format_g17(num) << ',' << format_g17(cf) << ','
               << format_g17(cf != 0.0 ? (num - cf) / cf : 0.0) << '\n';
        }
        write_text_file((out / "boltzmann_profile.csv").string(), os.str());
    }
    {
        std::ostringstream os;
        os << "iteration,residual\n";
        for (std::size_t i = 0; i < sol.residual_history.size(); ++i)
            os << i << ',' << format_g17(sol.residual_history[i]) << '\n';
        write_text_file((out / "boltzmann_residuals.csv").string(), os.str());
    }
    std::cout << "iterations=" << sol.iterations
              << " residual=" << format_g17(sol.final_residual) << '\n';
    return sol.converged ? 0 : 3;
}

int cmd_gap_chain(const CommonOpts& opts, std::optional<double> g0, int K, double tol) {
    ExperimentConfig cfg = resolve_config(opts);
    prepare_out_dir(cfg);
    const fs::path out(cfg.out_dir);
    GapChain chain;
    double g0_star = 0.0;
    if (g0) {
        chain = gap_chain_iterate(cfg.params, *g0, K);
        g0_star = *g0;
    } else {
        const ShootResult shoot = gap_chain_shoot(cfg.params, K, tol);
        chain = shoot.chain;
        g0_star = shoot.g0_star;
    }
    std::ostringstream os;
    os << "k,mean_gap_ticks\n";
    for (std::size_t k = 0; k < chain.g.size(); ++k)
        os << k << ',' << format_g17(chain.g[k]) << '\n';
    write_text_file((out / "gap_chain.csv").string(), os.str());
    std::cout << "g0=" << format_g17(g0_star)
              << " classification=" << to_string(chain.classification) << '\n';
    return 0;
}

int cmd_compare(const std::string& sim_path, const std::string& theory_path,
                const std::string& out_path) {
    const auto sim_rows = parse_csv(read_text_file(sim_path));
    const auto th_rows = parse_csv(read_text_file(theory_path));
    if (sim_rows.size() < 2 || th_rows.size() < 2)
        throw ConfigError("compare: empty input table");

    // theory table: lambda,v,mu,delta,spread,impact,diffusion
    std::map<double, std::array<double, 3>> theory;
    double v_ref = 1.0;
    for (std::size_t i = 1; i < th_rows.size(); ++i) {
        const auto& f = th_rows[i];
        if (f.size() != 7) throw ConfigError("compare: bad theory row");
        v_ref = parse_double(f[1]);
        theory[parse_double(f[2])] = {parse_double(f[4]), parse_double(f[5]),
                                      parse_double(f[6])};
    }

    // sim table: index,mu,metric,simulated,se,theory,ratio,status
    struct SimPoint {
        double spread = 0, impact = 0, diffusion = 0;
        bool ok = true;
    };
    std::map<double, SimPoint> sim;
    for (std::size_t i = 1; i < sim_rows.size(); ++i) {
        const auto& f = sim_rows[i];
        if (f.size() != 8) throw ConfigError("compare: bad sim row");
        const double mu = parse_double(f[1]);
        SimPoint& pt = sim[mu];
        const double value = parse_double(f[3]);
        if (f[2] == "spread") pt.spread = value;
        else if (f[2] == "impact") pt.impact = value;
        else if (f[2] == "diffusion") pt.diffusion = value;
        if (f[7] != "ok") pt.ok = false;
    }

    if (sim.size() != theory.size()) throw GridMismatch("compare: mu grids differ in size");
    for (const auto& [mu, pt] : sim)
        if (theory.find(mu) == theory.end())
            throw GridMismatch("compare: mu=" + format_g17(mu) + " missing from theory table");

    std::ostringstream os;
    os << "mu,metric,regime,simulated,theory,ratio,verdict\n";
    int failures = 0;
    std::vector<double> large_log_mu, large_log_spread, large_log_impact;

    // Verdict ledger: coefficient-level agreement is asserted only deep in
    // the small-mu regime (mu/v <= 0.3); for large mu the asserted facts are
    // the spread scaling slope and the expected mean-field failure of the
    // diffusion constant. Everything else is reported as INFO.
    for (const auto& [mu, pt] : sim) {
        const auto& th = theory.at(mu);
        const double over_v = mu / v_ref;
        const std::string regime =
            over_v <= 0.3 ? "small" : (over_v >= 10.0 ? "large" : "mid");
        const auto emit = [&](const char* metric, double s, double t, auto&& verdict_fn) {
            const double ratio = t != 0.0 ? s / t : 0.0;
            const std::string verdict = pt.ok ? verdict_fn(ratio) : "NO-DATA";
            if (verdict == "FAIL") ++failures;
            os << format_g17(mu) << ',' << metric << ',' << regime << ',' << format_g17(s)
               << ',' << format_g17(t) << ',' << format_g17(ratio) << ',' << verdict << '\n';
        };
        emit("spread", pt.spread, th[0], [&](double r) -> std::string {
            if (regime == "small") return std::abs(r - 1.0) <= 0.15 ? "PASS" : "FAIL";
            return "INFO";  // large mu: the slope row below carries the verdict
        });
        emit("impact", pt.impact, th[1], [&](double r) -> std::string {
            if (regime == "small") return std::abs(r - 1.0) <= 0.15 ? "PASS" : "FAIL";
            return "INFO";  // the large-mu coefficient is allowed to deviate
        });
        emit("diffusion", pt.diffusion, th[2], [&](double r) -> std::string {
            if (regime == "small") return (r >= 0.5 && r <= 2.0) ? "PASS" : "FAIL";
            if (regime == "large")
                return (r < 1.0 / 3.0 || r > 3.0) ? "EXPECTED-DEVIATION" : "FAIL";
            return "INFO";
        });
        if (regime == "large" && pt.ok && pt.spread > 0.0 && pt.impact > 0.0) {
            large_log_mu.push_back(std::log(mu));
            large_log_spread.push_back(std::log(pt.spread));
            large_log_impact.push_back(std::log(pt.impact));
        }
    }

    if (large_log_mu.size() >= 2) {
        const LineFit s_fit = fit_line(large_log_mu, large_log_spread);
        const LineFit i_fit = fit_line(large_log_mu, large_log_impact);
        const auto slope_row = [&](const char* metric, double slope, bool graded) {
            std::string verdict = "INFO";
            if (graded) {
                verdict = std::abs(slope - 1.0) <= 0.15 ? "PASS" : "FAIL";
                if (verdict == "FAIL") ++failures;
            }
            os << "-," << metric << ",large," << format_g17(slope) << ",1,"
               << format_g17(slope) << ',' << verdict << '\n';
        };
        slope_row("spread_loglog_slope", s_fit.slope, true);
        // the large-mu impact coefficient (and with it the fitted slope at
        // desk scale) is allowed to deviate from mean field
        slope_row("impact_loglog_slope", i_fit.slope, false);
    }

    const std::string table = os.str();
    std::cout << table;
    if (!out_path.empty()) write_text_file(out_path, table);
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Santa Fe zero-intelligence order-book simulator and mean-field toolkit"};
    app.require_subcommand(1);

    CommonOpts sim_opts, sweep_opts, theory_opts, boltz_opts, gap_opts;

    auto* sim = app.add_subcommand("simulate", "one simulation run with full metrics");
    add_common(sim, sim_opts);

    auto* sweep = app.add_subcommand("sweep", "parallel runs over a geometric mu grid");
    add_common(sweep, sweep_opts);

    auto* theory = app.add_subcommand("theory", "closed-form metrics, profiles, gap chain");
    add_common(theory, theory_opts);
    double th_grid = 0.0, th_rmax = 0.0, th_gap_tol = 1e-9;
    int th_gap_k = 60;
    theory->add_option("--grid-step", th_grid, "profile grid step (price units)");
    theory->add_option("--rmax", th_rmax, "profile domain (price units)");
    theory->add_option("--gap-K", th_gap_k, "gap-chain length");
    theory->add_option("--gap-tol", th_gap_tol, "gap-chain bisection tolerance");

    auto* boltz = app.add_subcommand("solve-boltzmann", "steady-state density solver");
    add_common(boltz, boltz_opts);
    double bz_grid = 0.0, bz_rmax = 0.0, bz_tol = 1e-3;
    int bz_max_iter = 2000;
    boltz->add_option("--grid-step", bz_grid, "grid step (price units, <= epsilon/10)");
    boltz->add_option("--rmax", bz_rmax, "domain (price units, >= 20 diffusion lengths)");
    boltz->add_option("--tol", bz_tol, "residual tolerance in units of lambda");
    boltz->add_option("--max-iter", bz_max_iter, "iteration cap");

    auto* gap = app.add_subcommand("gap-chain", "gap-chain iteration / shooting");
    add_common(gap, gap_opts);
    std::optional<double> gc_g0;
    int gc_k = 60;
    double gc_tol = 1e-9;
    gap->add_option("--g0", gc_g0, "iterate from this spread (ticks) instead of shooting");
    gap->add_option("--K", gc_k, "chain length");
    gap->add_option("--tol", gc_tol, "bisection tolerance");

    auto* compare = app.add_subcommand("compare", "verdict table from sim and theory CSVs");
    std::string cmp_sim, cmp_theory, cmp_out;
    compare->add_option("sim_csv", cmp_sim, "sweep output CSV")->required();
    compare->add_option("theory_csv", cmp_theory, "theory metrics CSV")->required();
    compare->add_option("--out", cmp_out, "write the verdict table here as well");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return cmd_simulate(sim_opts);
        if (sweep->parsed()) return cmd_sweep(sweep_opts);
        if (theory->parsed())
            return cmd_theory(theory_opts, th_grid, th_rmax, th_gap_k, th_gap_tol);
        if (boltz->parsed())
            return cmd_solve_boltzmann(boltz_opts, bz_grid, bz_rmax, bz_tol, bz_max_iter);
        if (gap->parsed()) return cmd_gap_chain(gap_opts, gc_g0, gc_k, gc_tol);
        if (compare->parsed()) return cmd_compare(cmp_sim, cmp_theory, cmp_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
