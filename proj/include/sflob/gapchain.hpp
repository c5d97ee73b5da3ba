#pragma once

#include <vector>

#include "sflob/errors.hpp"
#include "sflob/params.hpp"

namespace sflob {

enum class ChainOutcome { ConvergedToLimit, DivergedUp, Collapsed };

const char* to_string(ChainOutcome outcome);

/// Mean-gap recursion state. g[k] is the mean k-th gap in ticks; g[0] is the
/// spread in ticks. A valid stationary chain has every gap >= 1 tick.
struct GapChain {
    std::vector<double> g;
    bool converged = false;
    ChainOutcome classification = ChainOutcome::Collapsed;
};

/// Limit gap 1 + v/(lambda delta): the far boundary value of the recursion.
double gap_chain_limit(const ModelParams& params);
/// Divergence threshold 1 + (mu+v)/(lambda delta): chains that exceed it
/// while growing keep growing.
double gap_chain_threshold(const ModelParams& params);

/// Iterates the closed mean-gap recursion
///   (mu+v) g1 = lambda delta (g0^2 - g0),
///   (mu+(k+1)v) g_{k+1} = lambda delta g_k sum_{i<=k}(g_i - 1)
/// from the given spread g0 > 1 and classifies the trajectory: DivergedUp
/// once g exceeds the threshold while growing for three consecutive steps,
/// Collapsed when a gap drops below one tick, ConvergedToLimit when g_K ends
/// within 1% of the limit gap.
GapChain gap_chain_iterate(const ModelParams& params, double g0, int K);

struct ShootResult {
    double g0_star = 0.0;
    GapChain chain;
};

struct NoBracketError : NoBracket {
    NoBracketError(GapChain low, GapChain high)
        : NoBracket("gap-chain bisection endpoints classify identically"),
          at_lower(std::move(low)), at_upper(std::move(high)) {}
    GapChain at_lower;
    GapChain at_upper;
};

/// Bisection on g0 in (1, 1 + (mu+v)/(lambda delta)], splitting on the
/// DivergedUp classification; returns the threshold spread g0* and its chain.
ShootResult gap_chain_shoot(const ModelParams& params, int K, double bisection_tol);

}  // namespace sflob
