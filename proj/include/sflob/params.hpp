#pragma once

#include <cstdint>
#include <string>

#include "sflob/errors.hpp"

namespace sflob {

/// The five model constants. lambda is the limit-order intensity per unit
/// price per unit time, v the cancellation intensity per order, mu the
/// market-order intensity per side, delta the tick size, cutoff the window
/// width in ticks measured from the opposite best.
struct ModelParams {
    double lambda = 0.0;
    double v = 0.0;
    double mu = 0.0;
    double delta = 0.0;
    long cutoff = 0;

    /// Far-field mean occupancy per level, lambda*delta/v.
    double n_st() const { return lambda * delta / v; }
    /// Characteristic near-best length (v+mu)/lambda; also the mean-field spread.
    double epsilon() const { return (v + mu) / lambda; }

    bool operator==(const ModelParams&) const = default;
};

/// Regime diagnostics emitted by validate(). The theory layer assumes the
/// small-tick / high-liquidity regime; outside it the closed forms degrade.
struct RegimeReport {
    double n_st = 0.0;
    double epsilon = 0.0;
    bool small_tick = false;       // n_st <= 0.1
    bool high_liquidity = false;   // epsilon <= 0.1
    std::string summary() const;
};

/// Checks all parameter invariants; throws NonPositiveParameter naming the
/// offending field. Returns the regime report for the validated parameters.
RegimeReport validate(const ModelParams& params);

double epsilon(const ModelParams& params);

/// Master seed plus run index; the pair maps to an RNG stream seed through
/// derive_stream_seed.
struct SeedSpec {
    std::uint64_t master_seed = 0;
    std::uint64_t run_index = 0;

    bool operator==(const SeedSpec&) const = default;
};

/// Pure map (master_seed, run_index) -> stream seed. For a fixed master seed
/// the map run_index -> seed is injective: it composes the bijective
/// SplitMix64 finalizer with an addition, so distinct run indices can never
/// collide under one master seed.
std::uint64_t derive_stream_seed(const SeedSpec& spec);

}  // namespace sflob
