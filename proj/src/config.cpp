#include "sflob/config.hpp"

#include <cmath>
#include <sstream>

#include "sflob/csv.hpp"
#include "sflob/errors.hpp"

namespace sflob {

std::vector<double> SweepGrid::values() const {
    std::vector<double> mus;
    if (!present()) return mus;
    if (points == 1) {
        mus.push_back(mu_min);
        return mus;
    }
    const double ratio = mu_max / mu_min;
    for (int i = 0; i < points; ++i)
        mus.push_back(mu_min * std::pow(ratio, static_cast<double>(i) /
                                                   static_cast<double>(points - 1)));
    return mus;
}

ExperimentConfig ExperimentConfig::desk() { return ExperimentConfig{}; }

ExperimentConfig ExperimentConfig::paper() {
    ExperimentConfig c;
    c.params = ModelParams{10000.0, 1.0, 1.0, 1e-6, 1000000};
    return c;
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
    if (key == "sim.lambda") params.lambda = parse_double(value);
    else if (key == "sim.v") params.v = parse_double(value);
    else if (key == "sim.mu") params.mu = parse_double(value);
    else if (key == "sim.delta") params.delta = parse_double(value);
    else if (key == "sim.cutoff") params.cutoff = static_cast<long>(parse_int(value));
    else if (key == "seed.master") seed.master_seed = static_cast<std::uint64_t>(parse_int(value));
    else if (key == "seed.run_index") seed.run_index = static_cast<std::uint64_t>(parse_int(value));
    else if (key == "run.warmup_time") warmup_time = parse_double(value);
    else if (key == "run.measure_time") measure_time = parse_double(value);
    else if (key == "est.snapshot_interval") est.snapshot_interval = parse_double(value);
    else if (key == "est.msd_fit_lo") est.msd_fit_lo = parse_double(value);
    else if (key == "est.msd_fit_hi") est.msd_fit_hi = parse_double(value);
    else if (key == "est.impact_lmax") est.impact_lmax = static_cast<int>(parse_int(value));
    else if (key == "est.gap_k") est.gap_k = static_cast<int>(parse_int(value));
    else if (key == "est.density_grid_step") est.density_grid_step = parse_double(value);
    else if (key == "est.density_rmax") est.density_rmax = parse_double(value);
    else if (key == "est.batches") est.batches = static_cast<int>(parse_int(value));
    else if (key == "sweep.mu_min") sweep.mu_min = parse_double(value);
    else if (key == "sweep.mu_max") sweep.mu_max = parse_double(value);
    else if (key == "sweep.points") sweep.points = static_cast<int>(parse_int(value));
    else if (key == "out.dir") out_dir = value;
    else if (key == "threads") threads = static_cast<int>(parse_int(value));
    else if (key == "event_log") event_log = parse_int(value) != 0;
    else throw ConfigError("unknown config key: " + key);
}

std::string ExperimentConfig::to_text() const {
    std::ostringstream os;
    os << "sim.lambda=" << format_g17(params.lambda) << '\n';
    os << "sim.v=" << format_g17(params.v) << '\n';
    os << "sim.mu=" << format_g17(params.mu) << '\n';
    os << "sim.delta=" << format_g17(params.delta) << '\n';
    os << "sim.cutoff=" << params.cutoff << '\n';
    os << "seed.master=" << seed.master_seed << '\n';
    os << "seed.run_index=" << seed.run_index << '\n';
    os << "run.warmup_time=" << format_g17(warmup_time) << '\n';
    os << "run.measure_time=" << format_g17(measure_time) << '\n';
    os << "est.snapshot_interval=" << format_g17(est.snapshot_interval) << '\n';
    os << "est.msd_fit_lo=" << format_g17(est.msd_fit_lo) << '\n';
    os << "est.msd_fit_hi=" << format_g17(est.msd_fit_hi) << '\n';
    os << "est.impact_lmax=" << est.impact_lmax << '\n';
    os << "est.gap_k=" << est.gap_k << '\n';
    os << "est.density_grid_step=" << format_g17(est.density_grid_step) << '\n';
    os << "est.density_rmax=" << format_g17(est.density_rmax) << '\n';
    os << "est.batches=" << est.batches << '\n';
    os << "sweep.mu_min=" << format_g17(sweep.mu_min) << '\n';
    os << "sweep.mu_max=" << format_g17(sweep.mu_max) << '\n';
    os << "sweep.points=" << sweep.points << '\n';
    os << "out.dir=" << out_dir << '\n';
    os << "threads=" << threads << '\n';
    os << "event_log=" << (event_log ? 1 : 0) << '\n';
    return os.str();
}

ExperimentConfig ExperimentConfig::from_text(const std::string& text, ExperimentConfig base) {
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        // trim
        const auto a = line.find_first_not_of(" \t");
        if (a == std::string::npos) continue;
        const auto b = line.find_last_not_of(" \t");
        line = line.substr(a, b - a + 1);
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value");
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        const auto ke = key.find_last_not_of(" \t");
        key = key.substr(0, ke + 1);
        const auto vs = value.find_first_not_of(" \t");
        value = vs == std::string::npos ? "" : value.substr(vs);
        base.set(key, value);
    }
    return base;
}

void ExperimentConfig::check() const {
    validate(params);
    if (measure_time < 0.0) throw ConfigError("run.measure_time must be >= 0");
    if (sweep.present()) {
        if (!(sweep.mu_min > 0.0) || !(sweep.mu_max > 0.0))
            throw ConfigError("sweep bounds must be positive");
        const auto mus = sweep.values();
        for (std::size_t i = 1; i < mus.size(); ++i)
            if (!(mus[i] > mus[i - 1])) throw ConfigError("sweep grid must be strictly increasing");
    }
    if (threads < 1) throw ConfigError("threads must be >= 1");
}

}  // namespace sflob
