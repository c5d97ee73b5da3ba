#include "sflob/gapchain.hpp"

#include <algorithm>
#include <cmath>

namespace sflob {

const char* to_string(ChainOutcome outcome) {
    switch (outcome) {
        case ChainOutcome::ConvergedToLimit: return "converged_to_limit";
        case ChainOutcome::DivergedUp: return "diverged_up";
        case ChainOutcome::Collapsed: return "collapsed";
    }
    return "?";
}

double gap_chain_limit(const ModelParams& p) { return 1.0 + p.v / (p.lambda * p.delta); }

double gap_chain_threshold(const ModelParams& p) {
    return 1.0 + (p.mu + p.v) / (p.lambda * p.delta);
}

GapChain gap_chain_iterate(const ModelParams& p, double g0, int K) {
    validate(p);
    if (!(g0 > 1.0)) throw Error("gap_chain_iterate: g0 must exceed one tick");
    if (K < 1) throw Error("gap_chain_iterate: K must be >= 1");

    const double ld = p.lambda * p.delta;
    const double threshold = gap_chain_threshold(p);
    const double limit = gap_chain_limit(p);

    GapChain chain;
    chain.g.reserve(static_cast<std::size_t>(K) + 1);
    chain.g.push_back(g0);

    // Classification may need to look beyond K when the trajectory hovers
    // near the separatrix; only the first K+1 gaps are reported, so chains
    // that collapse or diverge early come back truncated.
    const long horizon = std::max(10L * K, 2000L);
    double sum_excess = g0 - 1.0;  // sum_{i<=k}(g_i - 1)
    double prev = g0;
    double cur = ld * (g0 * g0 - g0) / (p.mu + p.v);
    int growth_streak = 0;
    bool decided = false;

    for (long k = 1; k <= horizon; ++k) {
        if (static_cast<int>(chain.g.size()) <= K) chain.g.push_back(cur);
        if (cur < 1.0) {
            chain.classification = ChainOutcome::Collapsed;
            decided = true;
            break;
        }
        if (cur > threshold && cur > prev)
            ++growth_streak;
        else
            growth_streak = 0;
        if (growth_streak >= 3 || cur > 1e12) {
            chain.classification = ChainOutcome::DivergedUp;
            decided = true;
            break;
        }
        sum_excess += cur - 1.0;
        const double next = ld * cur * sum_excess / (p.mu + (static_cast<double>(k) + 1.0) * p.v);
        // Monotone-growth induction: a chain that grew past the threshold
        // cannot turn around (small slack for rounding at the margin).
        if (prev > threshold && cur > prev && next < cur * (1.0 - 1e-12))
            throw Error("gap recursion violated the monotone-growth bound");
        prev = cur;
        cur = next;
    }

    if (!decided) {
        // Bounded, non-diverging trajectory: converged when it sits within
        // 1% of the limit gap (checked at K and at the horizon end), else it
        // lies below the separatrix and is headed for collapse.
        const bool near_limit = std::abs(chain.g.back() - limit) < 0.01 * limit ||
                                std::abs(cur - limit) < 0.01 * limit;
        chain.classification =
            near_limit ? ChainOutcome::ConvergedToLimit : ChainOutcome::Collapsed;
    }
    chain.converged = chain.classification == ChainOutcome::ConvergedToLimit;
    return chain;
}

ShootResult gap_chain_shoot(const ModelParams& p, int K, double bisection_tol) {
    validate(p);
    if (K < 20) throw Error("gap_chain_shoot: K must be >= 20");
    const double threshold = gap_chain_threshold(p);

    double lo = 1.0 + 1e-12 * (threshold - 1.0);
    double hi = threshold;
    const GapChain at_lo = gap_chain_iterate(p, lo, K);
    const GapChain at_hi = gap_chain_iterate(p, hi, K);
    const bool lo_div = at_lo.classification == ChainOutcome::DivergedUp;
    const bool hi_div = at_hi.classification == ChainOutcome::DivergedUp;
    if (lo_div == hi_div) throw NoBracketError(at_lo, at_hi);

    for (int it = 0; it < 200 && (hi - lo) > bisection_tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        const GapChain c = gap_chain_iterate(p, mid, K);
        if ((c.classification == ChainOutcome::DivergedUp) == hi_div)
            hi = mid;
        else
            lo = mid;
    }
    ShootResult result;
    result.g0_star = 0.5 * (lo + hi);
    result.chain = gap_chain_iterate(p, result.g0_star, K);
    return result;
}

}  // namespace sflob
