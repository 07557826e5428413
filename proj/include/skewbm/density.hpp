#ifndef SKEWBM_DENSITY_HPP
#define SKEWBM_DENSITY_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "params.hpp"
#include "special.hpp"

namespace skewbm {

// Image-charge coefficients of the driftless expansion. Indicators are
// right-continuous at the barriers, matching the weight convention.
inline std::array<double, 4> coeffs_driftless(double y, const SkewParams& p) {
    const double s1 = (y >= p.z1) ? 1.0 : -1.0;
    const double s2 = (y >= p.z2) ? 1.0 : -1.0;
    const bool mid = (y >= p.z1 && y < p.z2);
    return {1.0, s1 * p.beta1, s2 * p.beta2, (mid ? -1.0 : 1.0) * p.beta1 * p.beta2};
}

// Reflected path lengths a_j(x, y) entering exp(-(a_j + 2zk)^2 / 2t). All are
// symmetric in (x, y) and non-negative.
inline std::array<double, 4> path_lengths(double x, double y, const SkewParams& p) {
    const double d = std::fabs(y - x);
    const double a2 = std::fabs(y - p.z1) + std::fabs(x - p.z1) - d;
    const double a3 = std::fabs(y - p.z2) + std::fabs(x - p.z2) - d;
    const double hi = std::max(0.0, p.z2 - std::max({x, y, p.z1}));
    const double lo = std::max(0.0, std::min({x, y, p.z2}) - p.z1);
    return {0.0, a2, a3, 2.0 * hi + 2.0 * lo};
}

// Quadratic-in-frequency coefficient table c_j(mu, y; w) = w^2 c[j][0] +
// w mu c[j][1] + mu^2 c[j][2] for the drifted expansion.
inline std::array<std::array<double, 3>, 4> coeffs_drift(double y, const SkewParams& p) {
    const std::array<double, 4> c0 = coeffs_driftless(y, p);
    std::array<std::array<double, 3>, 4> c{};
    c[0] = {c0[0], p.beta1 + p.beta2, p.beta1 * p.beta2};
    c[1] = {c0[1], -p.beta1 - c0[3], p.beta1 * c0[2]};
    c[2] = {c0[2], -p.beta2 + c0[3], -p.beta2 * c0[1]};
    c[3] = {c0[3], 0.0, -c0[3]};
    return c;
}

namespace detail {

// k-th term of the driftless ratio series at fixed (t, x, y).
inline double ratio_term(double t, double x, double y, const SkewParams& p, int k,
                         const std::array<double, 4>& c, const std::array<double, 4>& a) {
    const double d = std::fabs(y - x);
    const double shift = 2.0 * p.barrier_gap() * k;
    double sum = 0.0;
    for (int j = 0; j < 4; ++j) {
        const double aj = a[static_cast<std::size_t>(j)] + shift;
        sum += c[static_cast<std::size_t>(j)] * std::exp(-aj * aj / (2.0 * t) - d * aj / t);
    }
    return std::pow(-p.beta_product(), k) * sum;
}

}  // namespace detail

// Partial sum of the density ratio v = p / p_gaussian through series index n.
inline double ratio_v_driftless(double t, double x, double y, const SkewParams& p, int n) {
    validate_params(p);
    require_time(t);
    if (n < 0) throw std::domain_error("series index must be non-negative");
    const std::array<double, 4> c = coeffs_driftless(y, p);
    const std::array<double, 4> a = path_lengths(x, y, p);
    double v = 0.0;
    for (int k = 0; k <= n; ++k) v += detail::ratio_term(t, x, y, p, k, c, a);
    return v;
}

// Driftless two-barrier transition density. The truncation index is the
// smallest N with vbar * |beta1 beta2|^{N+1} <= tol, capped at n_max; the
// reported error bound is that geometric tail, which is rigorous.
inline DensityValue density_driftless(double t, double x, double y, const SkewParams& p,
                                      const TruncationPolicy& policy = {}) {
    validate_params(p);
    require_time(t);
    if (p.mu != 0.0) throw std::domain_error("density_driftless requires mu = 0");
    const double b = std::fabs(p.beta_product());
    const double vb = vbar(p);
    int n = 0;
    if (b > 0.0) {
        while (vb * std::pow(b, n + 1) > policy.tol && n < policy.n_max) ++n;
    }
    const double v = ratio_v_driftless(t, x, y, p, n);
    const double d = (y - x) / std::sqrt(t);
    const double p0 = normal_pdf(d) / std::sqrt(t);
    DensityValue out;
    out.value = p0 * v;
    out.error_bound = (b > 0.0) ? p0 * vb * std::pow(b, n + 1) : 0.0;
    out.terms_used = n + 1;
    out.exact_formula = (b == 0.0);
    return out;
}

// One-barrier skew density with drift, in closed form. Valid for any
// combination of beta in [-1, 1] and mu, on either side of the barrier.
inline DensityValue density_one_barrier_drift(double t, double x, double y, double z1, double beta,
                                              double mu) {
    require_time(t);
    if (!(std::isfinite(x) && std::isfinite(y) && std::isfinite(z1) && std::isfinite(beta) &&
          std::isfinite(mu)))
        throw std::domain_error("density arguments must be finite");
    if (std::fabs(beta) > 1.0) throw std::domain_error("skewness coefficient must lie in [-1, 1]");
    const double rt = std::sqrt(t);
    const double d = std::fabs(y - x);
    const double s = std::fabs(x - z1) + std::fabs(y - z1);
    const double sy = (y >= z1) ? 1.0 : -1.0;
    const double g0 = -(y - x - mu * t) * (y - x - mu * t) / (2.0 * t);
    // s^2 - d^2 = 4 (x-z1)(y-z1) when x, y are on the same side, else 0.
    const double cross = std::max(0.0, (x - z1) * (y - z1));
    const double g2 = g0 - 2.0 * cross / t;
    double value = inv_sqrt_two_pi / rt * (std::exp(g0) + beta * sy * std::exp(g2));
    const double w = beta * mu * (1.0 + beta * sy);
    if (w != 0.0) {
        const double u = (s + beta * mu * t) / rt;
        if (u >= 0.0) {
            value -= w * std::exp(g2) * scaled_normal_tail(u);
        } else {
            // Rewritten through the mirrored tail so no exp overflows; the
            // leading piece is the residue of the crossing-time transform.
            const double e = mu * (y - x) + beta * mu * s - 0.5 * (1.0 - beta * beta) * mu * mu * t;
            value -= w * (std::exp(e) - std::exp(g2) * scaled_normal_tail(-u));
        }
    }
    return {value, 0.0, 1, true};
}

namespace detail {

struct DriftSeriesTerm {
    double value = 0.0;
    bool underflow_all = false;
};

// Shared inner loop machinery for the drifted two-barrier expansion. Returns
// the k-th term of the ratio series including the (-beta1 beta2)^k factor.
inline DriftSeriesTerm drift_term_distinct(double t, double x, double y, const SkewParams& p, int k,
                                           const std::array<std::array<double, 3>, 4>& c,
                                           const std::array<double, 4>& a) {
    const double rt = std::sqrt(t);
    const double d = std::fabs(y - x);
    const double mt = p.mu * rt;
    const double a1 = p.beta1 * mt, a2 = p.beta2 * mt;
    const double dbeta = p.beta1 - p.beta2;
    const double z = p.barrier_gap();
    const int qmax = 3 * k + 2;
    DriftSeriesTerm out;
    out.underflow_all = true;
    for (int j = 0; j < 4; ++j) {
        const double omega = (a[static_cast<std::size_t>(j)] + 2.0 * z * k + d) / rt;
        const double scale = std::exp((d * d / t - omega * omega) / 2.0);
        if (scale == 0.0) continue;
        out.underflow_all = false;
        const JTable hi(omega, a2, qmax), lo(omega, a1, qmax);
        double inner = 0.0;
        for (int n = 0; n <= k; ++n) {
            for (int m = 0; m <= k; ++m) {
                const double num = factorial(2 * k - n);
                const double den = factorial(k - n) * factorial(k - m) * factorial(n) * factorial(m);
                const double coef = ((m % 2 == 0) ? 1.0 : -1.0) * num / den *
                                    std::pow(mt, n + 1 - 2 * m) / std::pow(dbeta, 2 * k - n + 1);
                double hsum = 0.0;
                for (int h = 0; h <= 2; ++h)
                    hsum += c[static_cast<std::size_t>(j)][static_cast<std::size_t>(2 - h)] /
                            std::pow(mt, h) * f_hat(h, m, n, hi, lo);
                inner += coef * hsum;
            }
        }
        out.value += scale * inner;
    }
    out.value *= std::pow(-p.beta_product(), k);
    return out;
}

inline DriftSeriesTerm drift_term_equal(double t, double x, double y, const SkewParams& p, int k,
                                        const std::array<std::array<double, 3>, 4>& c,
                                        const std::array<double, 4>& a) {
    const double rt = std::sqrt(t);
    const double d = std::fabs(y - x);
    const double mt = p.mu * rt;
    const double beta = 0.5 * (p.beta1 + p.beta2);
    const double shift = beta * mt;
    const double z = p.barrier_gap();
    const int n = 2 * k + 1;
    const int qmax = 4 * k + 3;
    DriftSeriesTerm out;
    out.underflow_all = true;
    for (int j = 0; j < 4; ++j) {
        const double omega = (a[static_cast<std::size_t>(j)] + 2.0 * z * k + d) / rt;
        const double scale = std::exp((d * d / t - omega * omega) / 2.0);
        if (scale == 0.0) continue;
        out.underflow_all = false;
        const JTable jt(omega, shift, qmax);
        double inner = 0.0;
        for (int m = 0; m <= k; ++m) {
            const double coef = binomial(k, m) * ((m % 2 == 0) ? -1.0 : 1.0);
            for (int h = 0; h <= 2; ++h)
                inner += coef * std::pow(mt, 2 * (k - m) + 2 - h) *
                         c[static_cast<std::size_t>(j)][static_cast<std::size_t>(2 - h)] *
                         g_hat(h, m, n, jt);
        }
        out.value += scale * inner;
    }
    out.value *= std::pow(beta, 2 * k) / factorial(2 * k + 1);
    return out;
}

}  // namespace detail

// Drifted two-barrier transition density (requires beta1*mu > 0 and
// beta2*mu > 0). The series has no closed-form tail bound, so truncation is
// empirical: stop once three successive terms fall below tol. The reported
// error bound is the sum of those terms and is heuristic, hence
// exact_formula = false.
inline DensityValue density_two_barrier_drift(double t, double x, double y, const SkewParams& p,
                                              const TruncationPolicy& policy = {}) {
    validate_drift_regime(p);
    require_time(t);
    if (!(std::isfinite(x) && std::isfinite(y)))
        throw std::domain_error("density arguments must be finite");

    // Nearly confluent skewness coefficients make the distinct-branch partial
    // fractions catastrophically ill-conditioned, so route to the equal-branch
    // expansion at the midpoint; the resulting error is O(|beta1 - beta2|).
    const bool equal_branch = std::fabs(p.beta1 - p.beta2) <= 1e-6;

    const std::array<std::array<double, 3>, 4> c = coeffs_drift(y, p);
    const std::array<double, 4> a = path_lengths(x, y, p);

    double v = 0.0;
    double tail[3] = {0.0, 0.0, 0.0};
    int small_run = 0;
    int k = 0;
    const int cap = std::min(policy.n_max, 60);
    for (; k <= cap; ++k) {
        const detail::DriftSeriesTerm term =
            equal_branch ? detail::drift_term_equal(t, x, y, p, k, c, a)
                         : detail::drift_term_distinct(t, x, y, p, k, c, a);
        v += term.value;
        tail[k % 3] = std::fabs(term.value);
        small_run = (std::fabs(term.value) < policy.tol) ? small_run + 1 : 0;
        if (term.underflow_all || small_run >= 3) break;
    }
    const int terms = std::min(k, cap) + 1;
    const double g0 = -(y - x - p.mu * t) * (y - x - p.mu * t) / (2.0 * t);
    const double p0 = inv_sqrt_two_pi / std::sqrt(t) * std::exp(g0);
    DensityValue out;
    out.value = p0 * v;
    out.error_bound = p0 * (tail[0] + tail[1] + tail[2]);
    out.terms_used = terms;
    out.exact_formula = false;
    return out;
}

using detail::ratio_term;

}  // namespace skewbm

#endif
