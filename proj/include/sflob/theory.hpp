#pragma once

#include <functional>
#include <vector>

#include "sflob/params.hpp"

namespace sflob {

/// Closed-form ingredients of the stationary mean-field profile.
struct TheoryProfile {
    ModelParams params;
    double rho0 = 0.0;        // boundary density lambda/(v+mu)
    double rho_inf = 0.0;     // far-field density lambda/v
    double diffusion = 0.0;   // 2(v+mu)^3/lambda^2
    double decay_rate = 0.0;  // sqrt(v/diffusion), 1/price
};

TheoryProfile theory_profile(const ModelParams& params);

/// rho_st(r) = (lambda/(v+mu) - lambda/v) exp(-sqrt(v/D) r) + lambda/v.
double stationary_profile(const ModelParams& params, double r);

/// Absorbing-boundary form (lambda/v)(1 - exp(-sqrt(v/D) r)), the mu >> v
/// limit of the stationary profile.
double image_profile(const ModelParams& params, double r);

struct TheoryMetrics {
    double spread = 0.0;     // (mu+v)/lambda
    double impact = 0.0;     // (mu+v)/(2 lambda)
    double diffusion = 0.0;  // 2(mu+v)^3/lambda^2
};

TheoryMetrics theory_metrics(const ModelParams& params);

/// Density on a uniform grid of cell centers r_k = (k+1/2)h covering [0, R],
/// with the far tail closed by a constant density beyond R. cumulative holds
/// the prefix integrals at the cell centers under the declared quadrature
/// rule: a half-cell rectangle at the left edge plus trapezoids between
/// centers.
class GridProfile {
public:
    GridProfile() = default;
    GridProfile(double grid_step, std::size_t cells, double tail_value);

    static GridProfile from_function(double grid_step, double domain_max, double tail_value,
                                     const std::function<double(double)>& f);
    /// Constant surrogate profile.
    static GridProfile constant(double grid_step, double domain_max, double value);

    double grid_step() const { return h_; }
    double domain_max() const { return h_ * static_cast<double>(values_.size()); }
    double tail_value() const { return tail_; }
    std::size_t cells() const { return values_.size(); }
    double center(std::size_t k) const { return (static_cast<double>(k) + 0.5) * h_; }

    const std::vector<double>& values() const { return values_; }
    std::vector<double>& mutable_values() { return values_; }
    const std::vector<double>& cumulative() const { return cumulative_; }

    /// Recomputes the prefix integrals; call after editing values.
    void rebuild_cumulative();
    /// Checks non-negativity and cumulative consistency (1e-12); throws Error.
    void validate() const;

    /// Piecewise-linear interpolation between centers, constant on the first
    /// half-cell, constant tail beyond R. Defined for r >= 0.
    double value_at(double r) const;
    /// Prefix integral consistent with value_at.
    double cumulative_at(double r) const;

private:
    double h_ = 0.0;
    double tail_ = 0.0;
    std::vector<double> values_;
    std::vector<double> cumulative_;
};

/// Mean-field jump-intensity density W(y) of relative-frame shifts, evaluated
/// by the declared trapezoid quadrature on the profile grid with the constant
/// tail closure. Throws DomainTooSmall when exp(-cumulative(R)) > 1e-8.
double jump_kernel(const GridProfile& profile, const ModelParams& params, double y);

struct KmCoefficients {
    double drift = 0.0;       // A = int y W(y) dy
    double diffusion = 0.0;   // D = 1/2 int y^2 W(y) dy
};

/// Both Kramers-Moyal moments in one kernel pass over y in [-Y, Y].
KmCoefficients km_coefficients(const GridProfile& profile, const ModelParams& params,
                               double y_halfwidth = 0.0);

/// order 1 -> drift, order 2 -> diffusion.
double km_coefficient(const GridProfile& profile, const ModelParams& params, int order,
                      double y_halfwidth = 0.0);

/// Right-hand side of the density evolution equation at every cell center:
/// lambda - rho(r)(v + mu e^{-Phi(r)}) + int W(y)(rho(r-y) - rho(r)) dy.
/// Shift arguments r-y < 0 use the first-cell value, so the collision term
/// vanishes identically on a constant profile.
std::vector<double> boltzmann_rhs(const GridProfile& profile, const ModelParams& params,
                                  double y_halfwidth = 0.0);

struct BoltzmannSolution {
    GridProfile profile;
    std::vector<double> residual_history;  // max |rhs|/lambda per iteration
    int iterations = 0;
    double final_residual = 0.0;
    bool converged = false;
};

/// Damped fixed-point iteration rho <- rho + eta rhs/lambda from the
/// closed-form initial guess, with the boundary value rho(0) pinned to
/// lambda/(v+mu) through the first cell's interpolant and negative values
/// clipped. Converged when max |rhs| < tol * lambda away from the pinned
/// cell. Throws NoConvergence after max_iter.
BoltzmannSolution solve_boltzmann_steady(const ModelParams& params, double grid_step,
                                         double domain_max, double tol = 1e-3,
                                         int max_iter = 2000);

/// As above but reports failure through the converged flag instead of
/// throwing, keeping the final iterate and residual trace available.
BoltzmannSolution solve_boltzmann_steady_nothrow(const ModelParams& params, double grid_step,
                                                 double domain_max, double tol = 1e-3,
                                                 int max_iter = 2000);

/// Best-price location density P(x) = rho(x) exp(-Phi(x)) at the cell centers.
std::vector<double> best_price_pdf(const GridProfile& profile);

/// int x rho(x) e^{-Phi(x)} dx : the mean relative best-price location.
double spread_from_profile(const GridProfile& profile);

/// 1/2 int dz rho(z) int_{y>z} dy (y-z) rho(y) e^{-Phi(y)} : half the mean
/// first gap.
double impact_from_profile(const GridProfile& profile);

}  // namespace sflob
