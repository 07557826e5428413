#ifndef SKEWBM_QUADRATURE_HPP
#define SKEWBM_QUADRATURE_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

namespace skewbm {

// Gauss-Legendre nodes and weights on [-1, 1], computed once per order by
// Newton iteration on the Legendre recurrence.
struct GaussLegendre {
    std::vector<double> x, w;

    explicit GaussLegendre(int n) {
        if (n < 2) throw std::domain_error("Gauss-Legendre order must be at least 2");
        x.resize(static_cast<std::size_t>(n));
        w.resize(static_cast<std::size_t>(n));
        const int half = (n + 1) / 2;
        for (int i = 0; i < half; ++i) {
            double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            double pp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = 0.0;
                for (int j = 0; j < n; ++j) {
                    const double p2 = p1;
                    p1 = p0;
                    p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
                }
                pp = n * (z * p0 - p1) / (z * z - 1.0);
                const double dz = p0 / pp;
                z -= dz;
                if (std::fabs(dz) < 1e-15) break;
            }
            x[static_cast<std::size_t>(i)] = -z;
            x[static_cast<std::size_t>(n - 1 - i)] = z;
            w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - z * z) * pp * pp);
            w[static_cast<std::size_t>(n - 1 - i)] = w[static_cast<std::size_t>(i)];
        }
    }
};

inline const GaussLegendre& gl16() {
    static const GaussLegendre rule(16);
    return rule;
}

template <class F>
double integrate_gl(F&& f, double a, double b, const GaussLegendre& rule) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.x.size(); ++i) sum += rule.w[i] * f(mid + half * rule.x[i]);
    return half * sum;
}

// Composite Gauss-Legendre with panel doubling until two successive
// refinements agree to tol (absolute, relaxing to relative when the integral
// exceeds one in magnitude). Throws when the budget is exhausted, so a silent
// wrong answer cannot escape.
template <class F>
double integrate_adaptive(F&& f, double a, double b, double tol, int max_panels = 1 << 13) {
    if (!(b >= a)) throw std::domain_error("integration bounds must satisfy a <= b");
    if (a == b) return 0.0;
    const GaussLegendre& rule = gl16();
    double prev = 0.0;
    bool have_prev = false;
    for (int panels = 1; panels <= max_panels; panels *= 2) {
        double sum = 0.0;
        const double h = (b - a) / panels;
        for (int i = 0; i < panels; ++i) sum += integrate_gl(f, a + i * h, a + (i + 1) * h, rule);
        if (have_prev && std::fabs(sum - prev) <= tol * std::max(1.0, std::fabs(sum))) return sum;
        prev = sum;
        have_prev = true;
    }
    throw std::runtime_error("integrate_adaptive: tolerance not met within panel budget");
}

// Plain composite trapezoid; intentionally a different rule family so it can
// serve as a cross-check on the Gauss-Legendre result.
template <class F>
double integrate_trapezoid(F&& f, double a, double b, int n) {
    if (n < 1) throw std::domain_error("trapezoid rule needs at least one panel");
    const double h = (b - a) / n;
    double sum = 0.5 * (f(a) + f(b));
    for (int i = 1; i < n; ++i) sum += f(a + i * h);
    return sum * h;
}

}  // namespace skewbm

#endif
