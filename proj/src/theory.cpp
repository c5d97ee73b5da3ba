#include "sflob/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sflob/errors.hpp"

namespace sflob {

TheoryProfile theory_profile(const ModelParams& p) {
    TheoryProfile t;
    t.params = p;
    t.rho0 = p.lambda / (p.v + p.mu);
    t.rho_inf = p.lambda / p.v;
    t.diffusion = 2.0 * std::pow(p.v + p.mu, 3) / (p.lambda * p.lambda);
    t.decay_rate = std::sqrt(p.v / t.diffusion);
    return t;
}

double stationary_profile(const ModelParams& p, double r) {
    const TheoryProfile t = theory_profile(p);
    return (t.rho0 - t.rho_inf) * std::exp(-t.decay_rate * r) + t.rho_inf;
}

double image_profile(const ModelParams& p, double r) {
    const TheoryProfile t = theory_profile(p);
    return t.rho_inf * (1.0 - std::exp(-t.decay_rate * r));
}

TheoryMetrics theory_metrics(const ModelParams& p) {
    TheoryMetrics m;
    m.spread = (p.mu + p.v) / p.lambda;
    m.impact = (p.mu + p.v) / (2.0 * p.lambda);
    m.diffusion = 2.0 * std::pow(p.mu + p.v, 3) / (p.lambda * p.lambda);
    return m;
}

GridProfile::GridProfile(double grid_step, std::size_t cells, double tail_value)
    : h_(grid_step), tail_(tail_value), values_(cells, 0.0), cumulative_(cells, 0.0) {}

GridProfile GridProfile::from_function(double grid_step, double domain_max, double tail_value,
                                       const std::function<double(double)>& f) {
    const std::size_t cells = static_cast<std::size_t>(std::llround(domain_max / grid_step));
    GridProfile p(grid_step, cells, tail_value);
    for (std::size_t k = 0; k < cells; ++k) p.values_[k] = f(p.center(k));
    p.rebuild_cumulative();
    return p;
}

GridProfile GridProfile::constant(double grid_step, double domain_max, double value) {
    return from_function(grid_step, domain_max, value, [value](double) { return value; });
}

void GridProfile::rebuild_cumulative() {
    cumulative_.resize(values_.size());
    if (values_.empty()) return;
    cumulative_[0] = values_[0] * h_ * 0.5;  // rectangle on the first half-cell
    for (std::size_t k = 1; k < values_.size(); ++k)
        cumulative_[k] = cumulative_[k - 1] + (values_[k - 1] + values_[k]) * h_ * 0.5;
}

void GridProfile::validate() const {
    if (values_.size() != cumulative_.size()) throw Error("profile: cumulative size mismatch");
    double phi = values_.empty() ? 0.0 : values_[0] * h_ * 0.5;
    const double scale = std::max(1.0, cumulative_.empty() ? 0.0 : cumulative_.back());
    for (std::size_t k = 0; k < values_.size(); ++k) {
        if (values_[k] < 0.0) throw Error("profile: negative density");
        if (k > 0) {
            phi += (values_[k - 1] + values_[k]) * h_ * 0.5;
            if (cumulative_[k] < cumulative_[k - 1]) throw Error("profile: cumulative decreasing");
        }
        if (std::abs(phi - cumulative_[k]) > 1e-12 * scale)
            throw Error("profile: cumulative inconsistent with quadrature rule");
    }
}

double GridProfile::value_at(double r) const {
    if (values_.empty()) return tail_;
    const double r0 = 0.5 * h_;
    if (r <= r0) return values_[0];
    const double last_center = center(values_.size() - 1);
    if (r >= domain_max()) return tail_;
    if (r >= last_center) return values_.back();
    const double x = (r - r0) / h_;
    const std::size_t k = static_cast<std::size_t>(x);
    const double frac = x - static_cast<double>(k);
    return values_[k] * (1.0 - frac) + values_[k + 1] * frac;
}

double GridProfile::cumulative_at(double r) const {
    if (r <= 0.0) return 0.0;
    if (values_.empty()) return tail_ * r;
    const double r0 = 0.5 * h_;
    if (r <= r0) return values_[0] * r;
    const double last_center = center(values_.size() - 1);
    const auto phi_r = [&](double x) {
        // integral of the interpolant from the last full node below x
        const double t = (x - r0) / h_;
        const std::size_t k = std::min(static_cast<std::size_t>(t), values_.size() - 2);
        const double frac = x - center(k);
        const double vx = value_at(x);
        return cumulative_[k] + (values_[k] + vx) * frac * 0.5;
    };
    if (r < last_center && values_.size() >= 2) return phi_r(r);
    const double phi_last = cumulative_.back();
    if (r <= domain_max())
        return phi_last + values_.back() * (r - last_center);
    return phi_last + values_.back() * (domain_max() - last_center) +
           tail_ * (r - domain_max());
}

namespace {

constexpr double kPhiCut = 40.0;     // e^{-40}: integrands beyond are dead
constexpr double kTailGuard = 1e-8;  // DomainTooSmall threshold on e^{-Phi(R)}

void guard_domain(const GridProfile& p) {
    const double phi_r = p.cumulative_at(p.domain_max());
    if (std::exp(-phi_r) > kTailGuard)
        throw DomainTooSmall("exp(-Phi(R)) = " + std::to_string(std::exp(-phi_r)) +
                             " > 1e-8; extend the profile domain");
}

/// Cell-center node arrays extended past the profile domain with the tail
/// density, long enough to cover min_cells nodes and the e^{-Phi} support.
struct NodeTable {
    double h = 0.0;
    std::vector<double> rho;
    std::vector<double> phi;
    std::vector<double> decay;  // exp(-phi)
    std::size_t cut = 0;        // first index with phi > kPhiCut, or size
};

NodeTable build_table(const GridProfile& p, std::size_t min_cells) {
    NodeTable t;
    t.h = p.grid_step();
    t.rho = p.values();
    t.phi = p.cumulative();
    std::size_t k = t.rho.size();
    // Tail closure: constant density beyond R.
    while (k < min_cells || (t.phi.empty() ? true : t.phi.back() <= kPhiCut)) {
        const double prev_rho = t.rho.empty() ? p.tail_value() : t.rho.back();
        const double prev_phi = t.phi.empty() ? 0.0 : t.phi.back();
        t.rho.push_back(p.tail_value());
        t.phi.push_back(prev_phi + (prev_rho + p.tail_value()) * t.h * 0.5);
        ++k;
        if (k > min_cells + (1u << 26)) throw DomainTooSmall("tail closure does not decay");
    }
    t.decay.resize(t.phi.size());
    t.cut = t.phi.size();
    for (std::size_t i = 0; i < t.phi.size(); ++i) {
        t.decay[i] = std::exp(-t.phi[i]);
        if (t.phi[i] > kPhiCut && t.cut == t.phi.size()) t.cut = i + 1;
    }
    return t;
}

/// Edge-plus-trapezoid weights: (h/2) f0 + sum (f_{k-1}+f_k) h/2 equals
/// h*(sum of all f) - (h/2) f_last.
double edge_trap_dot(const std::vector<double>& f, double h) {
    double s = 0.0;
    for (double x : f) s += x;
    return h * s - 0.5 * h * (f.empty() ? 0.0 : f.back());
}

double default_halfwidth(const ModelParams& params, double y_halfwidth) {
    if (y_halfwidth > 0.0) return y_halfwidth;
    return 20.0 * params.epsilon();
}

struct KernelTable {
    double h = 0.0;
    std::vector<double> w_pos;  // W(+j h), j = 1..M
    std::vector<double> w_neg;  // W(-j h)
};

KernelTable build_kernel(const NodeTable& t, const ModelParams& params, std::size_t m) {
    KernelTable kt;
    kt.h = t.h;
    kt.w_pos.assign(m + 1, 0.0);
    kt.w_neg.assign(m + 1, 0.0);
    const double h = t.h;
    const std::size_t cut = t.cut;

    std::vector<double> u(cut);  // rho * exp(-Phi)
    for (std::size_t i = 0; i < cut; ++i) u[i] = t.rho[i] * t.decay[i];
    std::vector<double> suffix(cut + 1, 0.0);
    for (std::size_t i = cut; i-- > 0;) suffix[i] = suffix[i + 1] + u[i];
    const double u_last = cut > 0 ? u[cut - 1] : 0.0;

    for (std::size_t j = 0; j <= m; ++j) {
        if (j >= cut) break;
        // y = -j h: lambda * int_0^inf rho(z + jh) e^{-Phi(z + jh)} dz
        kt.w_neg[j] = params.lambda * (h * suffix[j] - 0.5 * h * u_last);
        // y = +j h: (mu+v) * int_0^inf rho(z) rho(z + jh) e^{-Phi(z + jh)} dz
        double dot = 0.0;
        const std::size_t n_z = cut - j;
        for (std::size_t k = 0; k < n_z; ++k) dot += t.rho[k] * u[k + j];
        kt.w_pos[j] = (params.mu + params.v) * (h * dot - 0.5 * h * t.rho[n_z - 1] * u_last);
    }
    // index 0 holds the y -> 0 limits, used only as interpolation anchors
    return kt;
}

}  // namespace

double jump_kernel(const GridProfile& profile, const ModelParams& params, double y) {
    if (y == 0.0) throw Error("jump_kernel: y must be nonzero");
    guard_domain(profile);
    const double h = profile.grid_step();
    const double shift = std::abs(y);

    double integral = 0.0;
    double prev = 0.0;
    for (std::size_t k = 0;; ++k) {
        const double z = (static_cast<double>(k) + 0.5) * h;
        const double phi = profile.cumulative_at(z + (y < 0.0 ? shift : y));
        double f;
        if (y < 0.0) {
            f = profile.value_at(z + shift) * std::exp(-phi);
        } else {
            f = profile.value_at(z) * profile.value_at(z + y) * std::exp(-phi);
        }
        if (k == 0)
            integral += 0.5 * h * f;  // left half-cell rectangle
        else
            integral += 0.5 * h * (prev + f);
        prev = f;
        if (phi > kPhiCut) break;
        if (k > (1u << 26)) throw DomainTooSmall("jump kernel integral does not decay");
    }
    return (y < 0.0 ? params.lambda : params.mu + params.v) * integral;
}

KmCoefficients km_coefficients(const GridProfile& profile, const ModelParams& params,
                               double y_halfwidth) {
    guard_domain(profile);
    const double h = profile.grid_step();
    const double y_max = default_halfwidth(params, y_halfwidth);
    const std::size_t m = static_cast<std::size_t>(std::llround(y_max / h));
    if (m < 2) throw DomainTooSmall("km_coefficients: y halfwidth below grid step");

    const NodeTable t = build_table(profile, 0);
    const KernelTable kt = build_kernel(t, params, m);

    // Trapezoid in y on each half; the weighted integrand vanishes at y = 0.
    double m1_pos = 0.0, m1_neg = 0.0, m2_pos = 0.0, m2_neg = 0.0;
    for (std::size_t j = 1; j <= m; ++j) {
        const double yj = static_cast<double>(j) * h;
        const double wt = (j == m) ? 0.5 * h : h;
        m1_pos += wt * yj * kt.w_pos[j];
        m1_neg += wt * yj * kt.w_neg[j];
        m2_pos += wt * yj * yj * kt.w_pos[j];
        m2_neg += wt * yj * yj * kt.w_neg[j];
    }
    KmCoefficients km;
    km.drift = m1_pos - m1_neg;
    km.diffusion = 0.5 * (m2_pos + m2_neg);
    return km;
}

double km_coefficient(const GridProfile& profile, const ModelParams& params, int order,
                      double y_halfwidth) {
    const KmCoefficients km = km_coefficients(profile, params, y_halfwidth);
    if (order == 1) return km.drift;
    if (order == 2) return km.diffusion;
    throw Error("km_coefficient: order must be 1 or 2");
}

namespace {

std::vector<double> boltzmann_rhs_impl(const GridProfile& profile, const ModelParams& params,
                                       double y_halfwidth) {
    guard_domain(profile);
    const double h = profile.grid_step();
    const double y_max = default_halfwidth(params, y_halfwidth);
    const std::size_t m = static_cast<std::size_t>(std::llround(y_max / h));
    const std::size_t cells = profile.cells();

    const NodeTable t = build_table(profile, cells + m + 1);
    const KernelTable kt = build_kernel(t, params, m);

    // Near the boundary the downward-shift window (0, r) holds few grid
    // nodes and the plain trapezoid degrades to first order; those cells get
    // a subdivided window with interpolated kernel and density.
    const std::size_t k_refine =
        std::min(cells, static_cast<std::size_t>(std::ceil(4.0 * params.epsilon() / h)) + 1);
    constexpr int kSub = 8;
    const auto w_pos_at = [&](double y) {
        const double x = y / h;
        const std::size_t j = std::min(static_cast<std::size_t>(x), m - 1);
        const double frac = x - static_cast<double>(j);
        return kt.w_pos[j] * (1.0 - frac) + kt.w_pos[j + 1] * frac;
    };

    std::vector<double> rhs(cells, 0.0);
    for (std::size_t k = 0; k < cells; ++k) {
        const double rho_k = t.rho[k];
        const double r_k = (static_cast<double>(k) + 0.5) * h;
        double collision = 0.0;
        for (std::size_t j = 1; j <= m; ++j) {
            const double wt = (j == m) ? 0.5 * h : h;
            // Downward shifts past the boundary fall outside the kernel's
            // support: the gain has no density to draw on and the matching
            // loss is dropped with it, so a constant profile yields an
            // identically zero collision term.
            if (j <= k && k >= k_refine)
                collision += wt * kt.w_pos[j] * (t.rho[k - j] - rho_k);
            collision += wt * kt.w_neg[j] * (t.rho[k + j] - rho_k);
        }
        if (k < k_refine) {
            // subdivided trapezoid over y in (0, r_k), f(0) = 0
            const double hf = h / kSub;
            const long steps = static_cast<long>(std::floor(r_k / hf));
            double prev_f = 0.0;
            double y = 0.0;
            for (long i = 1; i <= steps; ++i) {
                y = static_cast<double>(i) * hf;
                const double w = w_pos_at(y);
                const double f = w * (profile.value_at(r_k - y) - rho_k);
                collision += 0.5 * hf * (prev_f + f);
                prev_f = f;
            }
            const double rest = r_k - y;
            if (rest > 0.0) {
                const double w_end = w_pos_at(r_k);
                const double f_end = w_end * (profile.value_at(0.0) - rho_k);
                collision += 0.5 * rest * (prev_f + f_end);
            }
        }
        rhs[k] = params.lambda - rho_k * (params.v + params.mu * t.decay[k]) + collision;
    }
    return rhs;
}

}  // namespace

std::vector<double> boltzmann_rhs(const GridProfile& profile, const ModelParams& params,
                                  double y_halfwidth) {
    return boltzmann_rhs_impl(profile, params, y_halfwidth);
}

BoltzmannSolution solve_boltzmann_steady(const ModelParams& params, double grid_step,
                                         double domain_max, double tol, int max_iter) {
    BoltzmannSolution sol =
        solve_boltzmann_steady_nothrow(params, grid_step, domain_max, tol, max_iter);
    if (!sol.converged) throw NoConvergence(max_iter, sol.final_residual);
    return sol;
}

BoltzmannSolution solve_boltzmann_steady_nothrow(const ModelParams& params, double grid_step,
                                                 double domain_max, double tol, int max_iter) {
    validate(params);
    const double eps = params.epsilon();
    const TheoryProfile tp = theory_profile(params);
    if (grid_step > eps / 10.0 + 1e-15)
        throw DomainTooSmall("solver grid_step must be <= epsilon/10");
    if (domain_max < 20.0 * std::sqrt(tp.diffusion / params.v) - 1e-12)
        throw DomainTooSmall("solver domain must cover 20 diffusion lengths");

    BoltzmannSolution sol;
    sol.profile = GridProfile::from_function(
        grid_step, domain_max, tp.rho_inf,
        [&](double r) { return stationary_profile(params, r); });
    // Dirichlet pin: the first cell is set so the linear interpolant through
    // the first two cells passes through rho0 at r = 0, which keeps the
    // effective boundary location independent of the grid step.
    const auto pin = [&](std::vector<double>& v) {
        v[0] = std::max(0.0, (2.0 * tp.rho0 + v[1]) / 3.0);
    };
    pin(sol.profile.mutable_values());
    sol.profile.rebuild_cumulative();

    double eta = 1.0;
    const double eta_max = 0.6 / eps;
    double prev_residual = std::numeric_limits<double>::infinity();

    for (int it = 0; it < max_iter; ++it) {
        const std::vector<double> rhs = boltzmann_rhs(sol.profile, params);
        double res = 0.0;
        for (std::size_t k = 1; k < rhs.size(); ++k) res = std::max(res, std::abs(rhs[k]));
        res /= params.lambda;
        sol.residual_history.push_back(res);
        sol.iterations = it;
        sol.final_residual = res;
        if (res < tol) {
            sol.converged = true;
            return sol;
        }

        if (res > prev_residual)
            eta = std::max(eta * 0.5, 1e-3);
        else
            eta = std::min(eta * 1.25, eta_max);
        prev_residual = res;

        auto& v = sol.profile.mutable_values();
        for (std::size_t k = 1; k < v.size(); ++k)
            v[k] = std::max(0.0, v[k] + eta * rhs[k] / params.lambda);
        pin(v);
        sol.profile.rebuild_cumulative();
    }
    return sol;
}

std::vector<double> best_price_pdf(const GridProfile& profile) {
    std::vector<double> pdf(profile.cells(), 0.0);
    for (std::size_t k = 0; k < profile.cells(); ++k)
        pdf[k] = profile.values()[k] * std::exp(-profile.cumulative()[k]);
    return pdf;
}

double spread_from_profile(const GridProfile& profile) {
    guard_domain(profile);
    const NodeTable t = build_table(profile, 0);
    std::vector<double> f(t.cut);
    for (std::size_t k = 0; k < t.cut; ++k)
        f[k] = (static_cast<double>(k) + 0.5) * t.h * t.rho[k] * t.decay[k];
    return edge_trap_dot(f, t.h);
}

double impact_from_profile(const GridProfile& profile) {
    guard_domain(profile);
    const NodeTable t = build_table(profile, 0);
    const std::size_t n = t.cut;
    const double h = t.h;

    std::vector<double> u(n), zu(n);
    for (std::size_t k = 0; k < n; ++k) {
        u[k] = t.rho[k] * t.decay[k];
        zu[k] = (static_cast<double>(k) + 0.5) * h * u[k];
    }
    // Suffix trapezoid integrals from z_k to the cut.
    std::vector<double> s0(n, 0.0), s1(n, 0.0);
    for (std::size_t k = n - 1; k-- > 0;) {
        s0[k] = s0[k + 1] + 0.5 * h * (u[k] + u[k + 1]);
        s1[k] = s1[k + 1] + 0.5 * h * (zu[k] + zu[k + 1]);
    }
    std::vector<double> outer(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double z = (static_cast<double>(k) + 0.5) * h;
        outer[k] = t.rho[k] * (s1[k] - z * s0[k]);
    }
    return 0.5 * edge_trap_dot(outer, h);
}

}  // namespace sflob
