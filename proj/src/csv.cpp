#include "sflob/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "sflob/errors.hpp"

namespace sflob {

std::string format_g17(double x) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
    if (ec != std::errc{}) throw Error("format_g17 failed");
    return std::string(buf, end);
}

double parse_double(const std::string& text) {
    double x = 0.0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), x);
    if (ec != std::errc{} || p != text.data() + text.size())
        throw ConfigError("not a number: '" + text + "'");
    return x;
}

long long parse_int(const std::string& text) {
    long long x = 0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), x);
    if (ec != std::errc{} || p != text.data() + text.size())
        throw ConfigError("not an integer: '" + text + "'");
    return x;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::size_t start = 0;
        for (;;) {
            const std::size_t comma = line.find(',', start);
            if (comma == std::string::npos) {
                fields.push_back(line.substr(start));
                break;
            }
            fields.push_back(line.substr(start, comma - start));
            start = comma + 1;
        }
        rows.push_back(std::move(fields));
    }
    return rows;
}

std::string metrics_csv_header() {
    return "lambda,v,mu,delta,cutoff,seed_master,seed_run_index,"
           "measure_time,n_events,n_snapshots,n_market_orders,"
           "spread_mean,spread_se,spread_samples,"
           "impact_instant,impact_instant_se,impact_buys,impact_sells,"
           "diffusion_D,diffusion_r2,diffusion_linear,diffusion_samples,"
           "gap_g0_se,gap_snapshots,gap_skipped,gap_skip_fraction";
}

std::string metrics_csv_row(const ModelParams& p, const SeedSpec& seed,
                            const MetricsReport& r) {
    std::ostringstream os;
    os << format_g17(p.lambda) << ',' << format_g17(p.v) << ',' << format_g17(p.mu) << ','
       << format_g17(p.delta) << ',' << p.cutoff << ',' << seed.master_seed << ','
       << seed.run_index << ',' << format_g17(r.measure_time) << ',' << r.n_events << ','
       << r.n_snapshots << ',' << r.n_market_orders << ',' << format_g17(r.spread_mean) << ','
       << format_g17(r.spread_se) << ',' << r.spread_samples << ','
       << format_g17(r.impact_instant) << ',' << format_g17(r.impact_instant_se) << ','
       << format_g17(r.impact_buys) << ',' << format_g17(r.impact_sells) << ','
       << format_g17(r.diffusion_D) << ',' << format_g17(r.diffusion_r2) << ','
       << (r.diffusion_linear ? 1 : 0) << ',' << r.diffusion_samples << ','
       << format_g17(r.gap_g0_se) << ',' << r.gap_snapshots << ',' << r.gap_skipped << ','
       << format_g17(r.gap_skip_fraction);
    return os.str();
}

MetricsRow parse_metrics_csv(const std::string& text) {
    const auto rows = parse_csv(text);
    if (rows.size() < 2 || rows[0] != parse_csv(metrics_csv_header())[0])
        throw ConfigError("metrics csv: bad header");
    const auto& f = rows[1];
    if (f.size() != 26) throw ConfigError("metrics csv: bad field count");
    MetricsRow m;
    std::size_t i = 0;
    m.params.lambda = parse_double(f[i++]);
    m.params.v = parse_double(f[i++]);
    m.params.mu = parse_double(f[i++]);
    m.params.delta = parse_double(f[i++]);
    m.params.cutoff = static_cast<long>(parse_int(f[i++]));
    m.seed.master_seed = static_cast<std::uint64_t>(parse_int(f[i++]));
    m.seed.run_index = static_cast<std::uint64_t>(parse_int(f[i++]));
    m.report.measure_time = parse_double(f[i++]);
    m.report.n_events = parse_int(f[i++]);
    m.report.n_snapshots = parse_int(f[i++]);
    m.report.n_market_orders = parse_int(f[i++]);
    m.report.spread_mean = parse_double(f[i++]);
    m.report.spread_se = parse_double(f[i++]);
    m.report.spread_samples = parse_int(f[i++]);
    m.report.impact_instant = parse_double(f[i++]);
    m.report.impact_instant_se = parse_double(f[i++]);
    m.report.impact_buys = parse_double(f[i++]);
    m.report.impact_sells = parse_double(f[i++]);
    m.report.diffusion_D = parse_double(f[i++]);
    m.report.diffusion_r2 = parse_double(f[i++]);
    m.report.diffusion_linear = parse_int(f[i++]) != 0;
    m.report.diffusion_samples = parse_int(f[i++]);
    m.report.gap_g0_se = parse_double(f[i++]);
    m.report.gap_snapshots = parse_int(f[i++]);
    m.report.gap_skipped = parse_int(f[i++]);
    m.report.gap_skip_fraction = parse_double(f[i++]);
    return m;
}

std::string density_csv(const DensityProfile& profile) {
    std::ostringstream os;
    os << "r,rho\n";
    for (std::size_t k = 0; k < profile.values.size(); ++k)
        os << format_g17((static_cast<double>(k) + 0.5) * profile.grid_step) << ','
           << format_g17(profile.values[k]) << '\n';
    return os.str();
}

DensityProfile parse_density_csv(const std::string& text) {
    const auto rows = parse_csv(text);
    if (rows.empty() || rows[0].size() != 2 || rows[0][0] != "r")
        throw ConfigError("density csv: bad header");
    DensityProfile p;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double r = parse_double(rows[i][0]);
        if (i == 1) p.grid_step = 2.0 * r;
        p.values.push_back(parse_double(rows[i][1]));
    }
    return p;
}

std::string gaps_csv(const MetricsReport& report) {
    std::ostringstream os;
    os << "k,mean_gap_ticks\n";
    for (std::size_t k = 0; k < report.gap_means.size(); ++k)
        os << k << ',' << format_g17(report.gap_means[k]) << '\n';
    return os.str();
}

std::vector<double> parse_gaps_csv(const std::string& text) {
    const auto rows = parse_csv(text);
    if (rows.empty() || rows[0][0] != "k") throw ConfigError("gaps csv: bad header");
    std::vector<double> gaps;
    for (std::size_t i = 1; i < rows.size(); ++i) gaps.push_back(parse_double(rows[i][1]));
    return gaps;
}

std::string impact_lag_csv(const MetricsReport& report) {
    std::ostringstream os;
    os << "lag,impact,ratio_to_lag1,n\n";
    const double base = report.impact_lag.empty() ? 0.0 : report.impact_lag[0];
    for (std::size_t i = 0; i < report.impact_lag.size(); ++i)
        os << (i + 1) << ',' << format_g17(report.impact_lag[i]) << ','
           << format_g17(base != 0.0 ? report.impact_lag[i] / base : 0.0) << ','
           << report.impact_lag_n[i] << '\n';
    return os.str();
}

void parse_impact_lag_csv(const std::string& text, std::vector<double>& impact,
                          std::vector<long long>& n) {
    const auto rows = parse_csv(text);
    if (rows.empty() || rows[0][0] != "lag") throw ConfigError("impact csv: bad header");
    impact.clear();
    n.clear();
    for (std::size_t i = 1; i < rows.size(); ++i) {
        impact.push_back(parse_double(rows[i][1]));
        n.push_back(parse_int(rows[i][3]));
    }
}

namespace {

void json_array(std::ostringstream& os, const std::vector<double>& xs) {
    os << '[';
    for (std::size_t i = 0; i < xs.size(); ++i)
        os << (i ? "," : "") << format_g17(xs[i]);
    os << ']';
}

}  // namespace

std::string metrics_json(const ModelParams& p, const SeedSpec& seed, const MetricsReport& r) {
    std::ostringstream os;
    os << "{\n";
    os << "  \"params\": {\"lambda\": " << format_g17(p.lambda) << ", \"v\": " << format_g17(p.v)
       << ", \"mu\": " << format_g17(p.mu) << ", \"delta\": " << format_g17(p.delta)
       << ", \"cutoff\": " << p.cutoff << "},\n";
    os << "  \"seed\": {\"master\": " << seed.master_seed << ", \"run_index\": " << seed.run_index
       << "},\n";
    os << "  \"measure_time\": " << format_g17(r.measure_time) << ",\n";
    os << "  \"counts\": {\"events\": " << r.n_events << ", \"snapshots\": " << r.n_snapshots
       << ", \"market_orders\": " << r.n_market_orders << "},\n";
    os << "  \"spread\": {\"mean\": " << format_g17(r.spread_mean)
       << ", \"se\": " << format_g17(r.spread_se) << ", \"samples\": " << r.spread_samples
       << "},\n";
    os << "  \"impact\": {\"instant\": " << format_g17(r.impact_instant)
       << ", \"se\": " << format_g17(r.impact_instant_se)
       << ", \"buys\": " << format_g17(r.impact_buys)
       << ", \"sells\": " << format_g17(r.impact_sells) << ", \"lags\": ";
    json_array(os, r.impact_lag);
    os << "},\n";
    os << "  \"diffusion\": {\"D\": " << format_g17(r.diffusion_D)
       << ", \"r2\": " << format_g17(r.diffusion_r2)
       << ", \"linear\": " << (r.diffusion_linear ? "true" : "false")
       << ", \"samples\": " << r.diffusion_samples << "},\n";
    os << "  \"gaps\": {\"means_ticks\": ";
    json_array(os, r.gap_means);
    os << ", \"g0_se\": " << format_g17(r.gap_g0_se)
       << ", \"skip_fraction\": " << format_g17(r.gap_skip_fraction) << "},\n";
    os << "  \"density\": {\"grid_step\": " << format_g17(r.density.grid_step) << ", \"rho\": ";
    json_array(os, r.density.values);
    os << "}\n}\n";
    return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << content;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string event_log_header() {
    return "time,kind,level,rel_level,doubled_mid_before,doubled_mid_after";
}

std::string event_log_line(const EventRecord& rec) {
    std::ostringstream os;
    os << format_g17(rec.time) << ',' << to_string(rec.kind) << ',' << rec.level << ','
       << rec.rel_level << ',' << rec.doubled_mid_before << ',' << rec.doubled_mid_after;
    return os.str();
}

}  // namespace sflob
