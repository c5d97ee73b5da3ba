#include "sflob/params.hpp"

#include <cmath>
#include <sstream>

#include "sflob/rng.hpp"

namespace sflob {

std::string RegimeReport::summary() const {
    std::ostringstream os;
    os << "n_st=" << n_st << " epsilon=" << epsilon;
    if (!small_tick) os << " [warning: n_st > 0.1, small-tick assumption degrades]";
    if (!high_liquidity) os << " [warning: epsilon > 0.1, high-liquidity assumption degrades]";
    return os.str();
}

RegimeReport validate(const ModelParams& p) {
    if (!(p.lambda > 0.0) || !std::isfinite(p.lambda)) throw NonPositiveParameter("lambda");
    if (!(p.v > 0.0) || !std::isfinite(p.v)) throw NonPositiveParameter("v");
    if (!(p.mu >= 0.0) || !std::isfinite(p.mu)) throw NonPositiveParameter("mu");
    if (!(p.delta > 0.0) || !std::isfinite(p.delta)) throw NonPositiveParameter("delta");
    if (p.cutoff < 1) throw NonPositiveParameter("cutoff");

    RegimeReport r;
    r.n_st = p.n_st();
    r.epsilon = p.epsilon();
    if (!std::isfinite(r.n_st) || !(r.n_st > 0.0)) throw NonPositiveParameter("n_st");
    if (!std::isfinite(r.epsilon) || !(r.epsilon > 0.0)) throw NonPositiveParameter("epsilon");
    r.small_tick = r.n_st <= 0.1;
    r.high_liquidity = r.epsilon <= 0.1;
    return r;
}

double epsilon(const ModelParams& p) { return p.epsilon(); }

std::uint64_t derive_stream_seed(const SeedSpec& spec) {
    // mix64 is bijective, so run_index -> mix64(master + mix64(run_index))
    // is injective for any fixed master seed.
    return mix64(spec.master_seed + mix64(spec.run_index));
}

}  // namespace sflob
