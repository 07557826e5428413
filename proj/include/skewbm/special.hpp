#ifndef SKEWBM_SPECIAL_HPP
#define SKEWBM_SPECIAL_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace skewbm {

inline constexpr double sqrt_two_pi = 2.5066282746310005024;
inline constexpr double inv_sqrt_two_pi = 0.3989422804014326779;
inline constexpr double inv_sqrt_two = 0.7071067811865475244;

namespace detail {

inline void require_finite(double u, const char* what) {
    if (!std::isfinite(u)) throw std::domain_error(std::string(what) + " must be finite");
}

// n! as double for n <= 170; larger arguments overflow double and are served
// through log_factorial instead.
inline double factorial(int n) {
    if (n < 0) throw std::domain_error("factorial of negative integer");
    static const std::vector<double> table = [] {
        std::vector<double> f(171);
        f[0] = 1.0;
        for (int i = 1; i <= 170; ++i) f[i] = f[i - 1] * static_cast<double>(i);
        return f;
    }();
    if (n <= 170) return table[static_cast<std::size_t>(n)];
    throw std::domain_error("factorial argument exceeds double range; use log_factorial");
}

inline double log_factorial(int n) {
    if (n < 0) throw std::domain_error("factorial of negative integer");
    return std::lgamma(static_cast<double>(n) + 1.0);
}

inline double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    if (n <= 170) return factorial(n) / (factorial(k) * factorial(n - k));
    return std::exp(log_factorial(n) - log_factorial(k) - log_factorial(n - k));
}

}  // namespace detail

inline double normal_pdf(double u) {
    detail::require_finite(u, "normal_pdf argument");
    return inv_sqrt_two_pi * std::exp(-0.5 * u * u);
}

// Upper tail of the standard normal distribution.
inline double normal_tail(double u) {
    detail::require_finite(u, "normal_tail argument");
    return 0.5 * std::erfc(u * inv_sqrt_two);
}

// exp(u^2/2) * normal_tail(u), evaluated without forming the overflowing
// product. For u >= 6 the direct product starts to lose accuracy long before
// it overflows, so the Mills-ratio continued fraction takes over there.
inline double scaled_normal_tail(double u) {
    detail::require_finite(u, "scaled_normal_tail argument");
    if (u < 0.0) {
        // exp(u^2/2) overflows near u = -38.6; at that point the true value
        // overflows as well, so the infinity is honest.
        return std::exp(0.5 * u * u) - scaled_normal_tail(-u);
    }
    if (u < 6.0) return 0.5 * std::exp(0.5 * u * u) * std::erfc(u * inv_sqrt_two);
    // Mills ratio R(u) = normal_tail/normal_pdf = 1/(u + 1/(u + 2/(u + ...))),
    // evaluated with the modified Lentz scheme.
    const double tiny = 1e-300;
    double f = u, c = u, d = 0.0;
    for (int k = 1; k < 200; ++k) {
        const double a = static_cast<double>(k);
        d = u + a * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = u + a / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = c * d;
        f *= delta;
        if (std::fabs(delta - 1.0) < 4e-16) break;
    }
    return inv_sqrt_two_pi / f;
}

// Probabilists' Hermite polynomial He_n(w) via the three-term recurrence.
inline double hermite_prob(int n, double w) {
    if (n < 0) throw std::domain_error("hermite_prob order must be non-negative");
    detail::require_finite(w, "hermite_prob argument");
    if (n == 0) return 1.0;
    double hm = 1.0, h = w;
    for (int k = 1; k < n; ++k) {
        const double hn = w * h - static_cast<double>(k) * hm;
        hm = h;
        h = hn;
    }
    return h;
}

enum class MomentIntegralKind { lower_tail, upper_tail };

// Integral of v^q exp(-v^2/2) over (-inf, alpha] (lower_tail) or [alpha, inf)
// (upper_tail), in closed form through the two-step recursion
// I_q = alpha^{q-1} I_1 + (q-1) I_{q-2}.
inline double gaussian_moment(MomentIntegralKind kind, int q, double alpha) {
    if (q < 0) throw std::domain_error("gaussian_moment order must be non-negative");
    detail::require_finite(alpha, "gaussian_moment argument");
    const bool lower = kind == MomentIntegralKind::lower_tail;
    const double i0 = sqrt_two_pi * normal_tail(lower ? -alpha : alpha);
    const double i1 = (lower ? -1.0 : 1.0) * std::exp(-0.5 * alpha * alpha);
    if (q == 0) return i0;
    if (q == 1) return i1;
    double prev = i0, cur = i1;
    for (int m = 2; m <= q; ++m) {
        const double next = std::pow(alpha, m - 1) * i1 + static_cast<double>(m - 1) * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

// Table of the exponentially tilted Gaussian moments
//   J_q(omega, A) = sgn(A) e^{A^2/2 + A omega} * (tail moment of order q),
// stored in the scaled form jhat[q] = exp(omega^2/2) J_q(omega, A). The
// scaling keeps every entry polynomially bounded in omega, which lets series
// code multiply by exp-small prefactors without intermediate overflow.
struct JTable {
    double omega = 0.0;
    double shift = 0.0;  // A
    std::vector<double> jhat;

    JTable() = default;

    JTable(double omega_, double a, int qmax) : omega(omega_), shift(a) {
        detail::require_finite(omega_, "JTable omega");
        detail::require_finite(a, "JTable shift");
        if (qmax < 0) throw std::domain_error("JTable order must be non-negative");
        jhat.resize(static_cast<std::size_t>(qmax) + 1);
        const double w = omega + a;
        // A >= 0 integrates over (-inf, -(omega+A)); A < 0 over the mirror
        // interval with the opposite orientation. Both share the recursion.
        jhat[0] = (a >= 0.0) ? sqrt_two_pi * scaled_normal_tail(w)
                             : -sqrt_two_pi * scaled_normal_tail(-w);
        if (qmax >= 1) jhat[1] = -1.0;
        for (int q = 2; q <= qmax; ++q)
            jhat[static_cast<std::size_t>(q)] =
                -std::pow(-w, q - 1) + static_cast<double>(q - 1) * jhat[static_cast<std::size_t>(q - 2)];
    }

    double at(int q) const { return jhat.at(static_cast<std::size_t>(q)); }
};

inline double j_func(int q, double omega, double a) {
    JTable jt(omega, a, q);
    return std::exp(-0.5 * omega * omega) * jt.at(q);
}

namespace detail {

inline void check_hml(int h, int m, int l) {
    if (h < 0 || h > 2) throw std::domain_error("kernel index h must be 0, 1 or 2");
    if (m < 0) throw std::domain_error("kernel index m must be non-negative");
    if (l < 0 || l > m + h / 2) throw std::domain_error("kernel index l out of range");
}

// Binomial double sum over tilted moments, in the scaled jhat space.
inline double s_hat(int h, int m, int n, int l, const JTable& jt) {
    check_hml(h, m, l);
    if (n < 0) throw std::domain_error("kernel index n must be non-negative");
    const int cap = 2 * (m - l) + h;
    const double wa = jt.omega + jt.shift;
    double sum = 0.0;
    for (int r = 0; r <= n; ++r) {
        const double br = binomial(n, r) * std::pow(wa, n - r);
        for (int s = 0; s <= cap; ++s)
            sum += br * binomial(cap, s) * std::pow(jt.shift, cap - s) * jt.at(r + s);
    }
    return sum;
}

// Hermite-expanded combination of s_hat blocks; equals the scaled convolution
// of w^n g(w, A) against He_{2m+h}(w) exp(-w^2/2), where g is the one-sided
// exponential kernel with rate A.
inline double g_hat(int h, int m, int n, const JTable& jt) {
    check_hml(h, m, 0);
    double sum = 0.0;
    const double lead = factorial(2 * m + h);
    for (int l = 0; l <= m + h / 2; ++l) {
        const double coef = ((l + h) % 2 == 0 ? 1.0 : -1.0) /
                            (std::pow(2.0, l) * factorial(l) * factorial(2 * (m - l) + h));
        sum += coef * s_hat(h, m, n, l, jt);
    }
    return lead * sum;
}

inline double f_hat(int h, int m, int n, const JTable& jt_hi, const JTable& jt_lo) {
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    return g_hat(h, m, n, jt_hi) - sign * g_hat(h, m, n, jt_lo);
}

}  // namespace detail

inline double s_func(int h, int m, int n, int l, double omega, double a) {
    JTable jt(omega, a, n + 2 * (m - l) + h);
    return std::exp(-0.5 * omega * omega) * detail::s_hat(h, m, n, l, jt);
}

inline double g_script(int h, int m, int n, double omega, double a) {
    JTable jt(omega, a, n + 2 * m + h);
    return std::exp(-0.5 * omega * omega) * detail::g_hat(h, m, n, jt);
}

// Two-shift combination used by the distinct-skewness series.
inline double f_script(int h, int m, int n, double omega, double a1, double a2) {
    if (a1 == a2) throw std::domain_error("f_script requires distinct shifts a1 != a2");
    JTable hi(omega, a2, n + 2 * m + h);
    JTable lo(omega, a1, n + 2 * m + h);
    return std::exp(-0.5 * omega * omega) * detail::f_hat(h, m, n, hi, lo);
}

// Regularized lower incomplete gamma P(a, x); series for x < a+1, continued
// fraction for the complement otherwise.
inline double gamma_p(double a, double x) {
    if (!(a > 0.0) || x < 0.0 || !std::isfinite(a) || !std::isfinite(x))
        throw std::domain_error("gamma_p requires a > 0 and x >= 0");
    if (x == 0.0) return 0.0;
    const double lg = std::lgamma(a);
    if (x < a + 1.0) {
        double ap = a, sum = 1.0 / a, del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
        }
        return sum * std::exp(-x + a * std::log(x) - lg);
    }
    const double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, f = d;
    for (int i = 1; i < 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        f *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) break;
    }
    return 1.0 - std::exp(-x + a * std::log(x) - lg) * f;
}

inline double gamma_q(double a, double x) { return 1.0 - gamma_p(a, x); }

// Upper p-value of a chi-square statistic with df degrees of freedom.
inline double chi_square_pvalue(double stat, int df) {
    if (df <= 0) throw std::domain_error("chi-square degrees of freedom must be positive");
    if (!(stat >= 0.0)) throw std::domain_error("chi-square statistic must be non-negative");
    return gamma_q(0.5 * df, 0.5 * stat);
}

}  // namespace skewbm

#endif
