#ifndef SKEWBM_ORACLES_HPP
#define SKEWBM_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "density.hpp"
#include "params.hpp"
#include "quadrature.hpp"
#include "rng.hpp"
#include "special.hpp"

namespace skewbm {

// Controls for the Fourier-inversion oracles. w_cutoff = 0 picks the cutoff
// automatically from the Gaussian damping of the integrand.
struct QuadratureSpec {
    double w_cutoff = 0.0;
    int nodes = 16;
    double tolerance = 1e-10;
};

namespace detail {

inline double fourier_cutoff(double t, const SkewParams& p, double tol) {
    // |integrand| <= exp(-w^2 t / 2) * C with C the coefficient envelope over
    // the denominator floor; solve exp(-W^2 t / 2) C = tol / 1e3.
    const double bb = std::fabs(p.beta_product());
    const double env = 8.0 * (1.0 + std::fabs(p.mu)) * (1.0 + std::fabs(p.mu)) / (1.0 - bb);
    const double target = std::max(tol * 1e-3 / env, 1e-300);
    const double w = std::sqrt(std::max(0.0, -2.0 * std::log(target) / t));
    return std::max(w, 8.0 / std::sqrt(t));
}

}  // namespace detail

// Frequency-domain inversion of the driftless two-barrier density. Fully
// independent of the series evaluator: works from the characteristic-function
// form with the geometric denominator left unexpanded.
inline double fourier_density_driftless(double t, double x, double y, const SkewParams& p,
                                        const QuadratureSpec& spec = {}) {
    validate_params(p);
    require_time(t);
    if (p.mu != 0.0) throw std::domain_error("fourier_density_driftless requires mu = 0");
    const std::array<double, 4> c = coeffs_driftless(y, p);
    const std::array<double, 4> a = path_lengths(x, y, p);
    const double d = std::fabs(y - x);
    const double z = p.barrier_gap();
    const double bb = p.beta_product();
    const double cutoff =
        spec.w_cutoff > 0.0 ? spec.w_cutoff : detail::fourier_cutoff(t, p, spec.tolerance);
    auto integrand = [&](double w) {
        const std::complex<double> iw(0.0, -w);
        std::complex<double> num(0.0, 0.0);
        for (int j = 0; j < 4; ++j)
            num += c[static_cast<std::size_t>(j)] * std::exp(iw * a[static_cast<std::size_t>(j)]);
        const std::complex<double> den = bb * std::exp(iw * (2.0 * z)) + 1.0;
        return std::exp(-0.5 * w * w * t) * std::real(std::exp(iw * d) * num / den);
    };
    return integrate_adaptive(integrand, 0.0, cutoff, spec.tolerance) / M_PI;
}

// One-barrier drifted density by Fourier inversion. Valid for either sign of
// beta*mu; when beta*mu < 0 the transform picks up a residue contribution
// from the pole of the crossing-time factor.
inline double fourier_density_one_barrier_drift(double t, double x, double y, double z1,
                                                double beta, double mu,
                                                const QuadratureSpec& spec = {}) {
    require_time(t);
    if (std::fabs(beta) > 1.0) throw std::domain_error("skewness coefficient must lie in [-1, 1]");
    const double d = std::fabs(y - x);
    const double a2 = std::fabs(y - z1) + std::fabs(x - z1) - d;
    const double sy = (y >= z1) ? 1.0 : -1.0;
    const double bm = beta * mu;
    SkewParams dummy;  // cutoff heuristic only needs |mu| and the beta product
    dummy.mu = mu;
    const double cutoff =
        spec.w_cutoff > 0.0 ? spec.w_cutoff : detail::fourier_cutoff(t, dummy, spec.tolerance);
    auto integrand = [&](double w) {
        const std::complex<double> iw(0.0, w);
        const std::complex<double> c1 = bm + iw;
        const std::complex<double> c2 = iw * (beta * sy) - bm;
        const std::complex<double> phase1 = std::exp(std::complex<double>(0.0, -w * d));
        const std::complex<double> phase2 = std::exp(std::complex<double>(0.0, -w * (a2 + d)));
        const std::complex<double> den = iw + bm;
        return std::exp(-0.5 * w * w * t) * std::real((c1 * phase1 + c2 * phase2) / den);
    };
    double value = integrate_adaptive(integrand, 0.0, cutoff, spec.tolerance) / M_PI;
    if (bm < 0.0) {
        const double s = std::fabs(y - z1) + std::fabs(x - z1);
        value += -bm * (1.0 + beta * sy) * std::exp(0.5 * beta * beta * mu * mu * t + bm * s);
    }
    return std::exp(mu * (y - x) - 0.5 * mu * mu * t) * value;
}

// Drifted two-barrier density by Fourier inversion (requires beta_i mu > 0 so
// the resolvent denominator is zero-free on the real axis; w = 0 is a
// removable singularity handled by its analytic limit).
inline double fourier_density_drift(double t, double x, double y, const SkewParams& p,
                                    const QuadratureSpec& spec = {}) {
    validate_drift_regime(p);
    require_time(t);
    const std::array<std::array<double, 3>, 4> c = coeffs_drift(y, p);
    const std::array<double, 4> a = path_lengths(x, y, p);
    const double d = std::fabs(y - x);
    const double z = p.barrier_gap();
    const double bb = p.beta_product();
    const double mu = p.mu;
    const double cutoff =
        spec.w_cutoff > 0.0 ? spec.w_cutoff : detail::fourier_cutoff(t, p, spec.tolerance);
    // lim_{w->0} N(w)/D(w); both vanish linearly.
    double limit0 = 0.0;
    {
        double asum = 0.0;
        for (int j = 0; j < 4; ++j)
            asum += a[static_cast<std::size_t>(j)] * c[static_cast<std::size_t>(j)][2];
        limit0 = mu * asum / (p.beta1 + p.beta2 + 2.0 * z * bb * mu);
    }
    auto integrand = [&](double w) {
        const double damp = std::exp(-0.5 * w * w * t);
        if (std::fabs(w) < 1e-9) return damp * limit0;
        const std::complex<double> i(0.0, 1.0);
        std::complex<double> num(0.0, 0.0);
        for (int j = 0; j < 4; ++j) {
            const auto& cj = c[static_cast<std::size_t>(j)];
            const std::complex<double> cj_iw = -w * w * cj[0] + i * (w * mu * cj[1]) + mu * mu * cj[2];
            num += cj_iw * std::exp(-i * (w * a[static_cast<std::size_t>(j)]));
        }
        const std::complex<double> den = bb * std::exp(-i * (2.0 * w * z)) * (w * w + mu * mu) +
                                         (w - i * (p.beta1 * mu)) * (w - i * (p.beta2 * mu));
        return damp * std::real(std::exp(-i * (w * d)) * num / den);
    };
    const double integral = integrate_adaptive(integrand, 0.0, cutoff, spec.tolerance) / M_PI;
    return -std::exp(-0.5 * mu * mu * t + mu * (y - x)) * integral;
}

// Numerical convolution definition of g_script: integrates the one-sided
// exponential kernel against the Hermite-weighted Gaussian directly, without
// any of the closed-form moment machinery.
inline double g_script_conv(int h, int m, int n, double omega, double a, double tol = 1e-12) {
    if (a == 0.0) throw std::domain_error("g_script_conv requires a nonzero shift");
    const int order = 2 * m + h;
    auto integrand = [&](double w) {
        const double arg = omega - w;
        return std::pow(w, n) * std::exp(a * w) * hermite_prob(order, arg) *
               std::exp(-0.5 * arg * arg);
    };
    const double reach = 80.0 / std::fabs(a) + std::fabs(omega) + 20.0;
    if (a > 0.0) return integrate_adaptive(integrand, -reach, 0.0, tol);
    return -integrate_adaptive(integrand, 0.0, reach, tol);
}

// Quadrature forms of the moment integrals, for cross-checking closed forms.
inline double gaussian_moment_quad(MomentIntegralKind kind, int q, double alpha,
                                   double tol = 1e-13) {
    auto integrand = [&](double v) { return std::pow(v, q) * std::exp(-0.5 * v * v); };
    const double reach = std::max(std::fabs(alpha), 40.0) + 10.0;
    if (kind == MomentIntegralKind::lower_tail) return integrate_adaptive(integrand, -reach, alpha, tol);
    return integrate_adaptive(integrand, alpha, reach, tol);
}

// Scaled-space quadrature of the tilted tail moment; integrand is bounded by
// one in magnitude so the check stays meaningful at large omega.
inline double j_func_quad(int q, double omega, double a, double tol = 1e-13) {
    const double w = omega + a;
    auto integrand = [&](double s) {
        const double base = -(w + s);
        return std::pow(base, q) * std::exp(-w * s - 0.5 * s * s);
    };
    // jhat = int_0^inf (-(w+s))^q exp(-w s - s^2/2) ds for a >= 0; mirrored
    // for a < 0.
    if (a >= 0.0) {
        const double reach = (w > 0.0) ? std::min(200.0 / w + 20.0, 60.0) : 60.0;
        const double jhat = integrate_adaptive(integrand, 0.0, reach, tol);
        return std::exp(-0.5 * omega * omega) * jhat;
    }
    auto integrand_up = [&](double s) {
        const double base = -(w - s);
        return std::pow(base, q) * std::exp(w * s - 0.5 * s * s);
    };
    const double reach = (w < 0.0) ? std::min(200.0 / -w + 20.0, 60.0) : 60.0;
    const double jhat = -integrate_adaptive(integrand_up, 0.0, reach, tol);
    return std::exp(-0.5 * omega * omega) * jhat;
}

// Piecewise-linear CDF on a fixed grid, with inverse for sampling.
struct CdfInterp {
    std::vector<double> grid, value;

    double operator()(double y) const {
        if (y <= grid.front()) return 0.0;
        if (y >= grid.back()) return 1.0;
        const auto it = std::upper_bound(grid.begin(), grid.end(), y);
        const std::size_t i = static_cast<std::size_t>(it - grid.begin());
        const double f = (y - grid[i - 1]) / (grid[i] - grid[i - 1]);
        return value[i - 1] + f * (value[i] - value[i - 1]);
    }

    double inverse(double u) const {
        if (u <= 0.0) return grid.front();
        if (u >= 1.0) return grid.back();
        const auto it = std::lower_bound(value.begin(), value.end(), u);
        std::size_t i = static_cast<std::size_t>(it - value.begin());
        if (i == 0) i = 1;
        const double dv = value[i] - value[i - 1];
        const double f = dv > 0.0 ? (u - value[i - 1]) / dv : 0.0;
        return grid[i - 1] + f * (grid[i] - grid[i - 1]);
    }
};

// CDF of the driftless transition law by integrating the Fourier oracle over
// a fine grid; the grid is split at the barriers so every panel is smooth.
inline CdfInterp cdf_oracle(double t, double x, const SkewParams& p, int grid_points = 801,
                            double reach = 8.0) {
    validate_params(p);
    require_time(t);
    if (grid_points < 16) throw std::domain_error("cdf_oracle grid too coarse");
    const double rt = std::sqrt(t);
    const double lo = x - reach * rt, hi = x + reach * rt;
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(grid_points) + 4);
    for (int i = 0; i < grid_points; ++i)
        grid.push_back(lo + (hi - lo) * i / (grid_points - 1.0));
    for (double zb : {p.z1, p.z2})
        if (zb > lo && zb < hi) grid.push_back(zb);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    QuadratureSpec spec;
    spec.tolerance = 1e-9;
    auto dens = [&](double y) { return fourier_density_driftless(t, x, y, p, spec); };
    const GaussLegendre& rule = gl16();
    std::vector<double> cdf(grid.size(), 0.0);
    double acc = 0.0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        acc += integrate_gl(dens, grid[i - 1], grid[i], rule);
        cdf[i] = acc;
    }
    // Mass outside the window is negligible by construction (reach ~ 8 sigma);
    // normalize away the leftover so the interpolant is a proper CDF.
    for (double& v : cdf) v /= acc;
    return {std::move(grid), std::move(cdf)};
}

// Two-sided Kolmogorov-Smirnov statistic of samples against a CDF.
template <class Cdf>
double ks_statistic(std::vector<double> samples, const Cdf& cdf) {
    if (samples.empty()) throw std::domain_error("ks_statistic needs samples");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double sup = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        sup = std::max(sup, std::fabs(f - static_cast<double>(i) / n));
        sup = std::max(sup, std::fabs(static_cast<double>(i + 1) / n - f));
    }
    return sup;
}

// 1% asymptotic critical value for the two-sided KS test.
inline double ks_critical_1pct(std::size_t n) {
    if (n == 0) throw std::domain_error("ks critical value needs n > 0");
    return 1.628 / std::sqrt(static_cast<double>(n));
}

struct WalkHistogram {
    double dx = 0.0;       // realized lattice spacing
    double origin = 0.0;   // position of node index 0 (= z1)
    long long steps = 0;
    std::vector<std::int64_t> counts;  // indexed by node offset from `base`
    long long base = 0;                // node index of counts[0]

    double position(std::size_t i) const {
        return origin + dx * static_cast<double>(base + static_cast<long long>(i));
    }
};

// Nearest-neighbour lattice walk with skewed steps at the barrier nodes: at
// z_j the walker moves up with probability (1+beta_j)/2; elsewhere up with
// probability (1 + mu dx)/2. After steps = t/dx^2 steps the endpoint law
// approximates the continuous transition density.
inline WalkHistogram skew_walk_simulate(double t, double x0, const SkewParams& p, double dx_request,
                                        long long walkers, RandomStream rng) {
    validate_params(p);
    require_time(t);
    if (!(dx_request > 0.0)) throw std::domain_error("lattice spacing must be positive");
    if (walkers <= 0) throw std::domain_error("walker count must be positive");
    const double gap = p.barrier_gap();
    const long long cells = std::max(1LL, static_cast<long long>(std::llround(gap / dx_request)));
    const double dx = gap / static_cast<double>(cells);
    if (std::fabs(p.mu) * dx >= 1.0)
        throw std::domain_error("drift too large for this lattice spacing");
    const long long steps = std::max(1LL, static_cast<long long>(std::llround(t / (dx * dx))));
    const long long start = static_cast<long long>(std::llround((x0 - p.z1) / dx));
    const long long reach = steps;  // hard support bound of the walk

    // Comparing uniform01() < prob is exact at prob = 0 and prob = 1, which
    // matters for fully reflecting barriers (beta = +-1).
    const double up_plain = 0.5 * (1.0 + p.mu * dx);
    const double up_b1 = 0.5 * (1.0 + p.beta1);
    const double up_b2 = 0.5 * (1.0 + p.beta2);

    WalkHistogram h;
    h.dx = dx;
    h.origin = p.z1;
    h.steps = steps;
    h.base = start - reach;
    h.counts.assign(static_cast<std::size_t>(2 * reach + 1), 0);
    for (long long wlk = 0; wlk < walkers; ++wlk) {
        RandomStream stream{rng.seed, rng.stream_id + static_cast<std::uint64_t>(wlk) + 1, 0};
        long long pos = start;
        for (long long s = 0; s < steps; ++s) {
            double up = up_plain;
            if (pos == 0)
                up = up_b1;
            else if (pos == cells)
                up = up_b2;
            pos += (stream.uniform01() < up) ? 1 : -1;
        }
        ++h.counts[static_cast<std::size_t>(pos - h.base)];
    }
    return h;
}

}  // namespace skewbm

#endif
