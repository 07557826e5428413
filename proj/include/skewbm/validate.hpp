#ifndef SKEWBM_VALIDATE_HPP
#define SKEWBM_VALIDATE_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "density.hpp"
#include "oracles.hpp"
#include "params.hpp"
#include "quadrature.hpp"
#include "rng.hpp"
#include "sampler.hpp"
#include "special.hpp"

namespace skewbm {

// A transition-density evaluator under test: density as a function of
// (t, x, y) for fixed parameters.
using DensityFn = std::function<double(double, double, double)>;

struct CheckResult {
    std::string name;
    bool pass = false;
    double residual = 0.0;
    double tolerance = 0.0;
};

struct SuiteReport {
    std::string suite;
    std::vector<CheckResult> checks;

    bool pass() const {
        for (const CheckResult& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

namespace detail {

inline double rel_diff(double a, double b, double floor = 1e-300) {
    return std::fabs(a - b) / std::max({std::fabs(a), std::fabs(b), floor});
}

// Integration window covering essentially all transition mass.
inline std::pair<double, double> mass_window(double t, double x, const SkewParams& p) {
    const double rt = std::sqrt(t);
    const double lo = std::min(x, x + p.mu * t) - 10.0 * rt - 1.0;
    const double hi = std::max(x, x + p.mu * t) + 10.0 * rt + 1.0;
    return {lo, hi};
}

template <class F>
double integrate_split(F&& f, double lo, double hi, const SkewParams& p, double tol) {
    std::vector<double> cuts{lo};
    for (double zb : {p.z1, p.z2})
        if (zb > lo && zb < hi) cuts.push_back(zb);
    cuts.push_back(hi);
    double sum = 0.0;
    for (std::size_t i = 1; i < cuts.size(); ++i)
        sum += integrate_adaptive(f, cuts[i - 1], cuts[i], tol);
    return sum;
}

}  // namespace detail

// Mass jump condition at each barrier: (1+beta_j) p(t,x,z_j-) equals
// (1-beta_j) p(t,x,z_j+), probed at z_j +- eps.
inline CheckResult check_transmission_jump(double t, double x, const SkewParams& p,
                                           const DensityFn& f, double tol = 1e-6,
                                           double eps = 1e-9) {
    double worst = 0.0;
    const double betas[2] = {p.beta1, p.beta2};
    const double zs[2] = {p.z1, p.z2};
    for (int j = 0; j < 2; ++j) {
        const double lhs = (1.0 + betas[j]) * f(t, x, zs[j] - eps);
        const double rhs = (1.0 - betas[j]) * f(t, x, zs[j] + eps);
        worst = std::max(worst, detail::rel_diff(lhs, rhs, 1e-12));
    }
    return {"transmission_jump", worst <= tol, worst, tol};
}

// Flux continuity at each barrier: (1/2) d/dy p - mu p matches across z_j,
// by symmetric finite differences on either side.
inline CheckResult check_transmission_flux(double t, double x, const SkewParams& p,
                                           const DensityFn& f, double tol = 1e-3,
                                           double eps = 1e-5) {
    const double off = 4.0 * eps;  // stencil center distance from the barrier
    double worst = 0.0;
    for (double zb : {p.z1, p.z2}) {
        auto flux = [&](double y0) {
            const double dp = (f(t, x, y0 + eps) - f(t, x, y0 - eps)) / (2.0 * eps);
            return 0.5 * dp - p.mu * f(t, x, y0);
        };
        const double lhs = flux(zb - off);
        const double rhs = flux(zb + off);
        worst = std::max(worst, detail::rel_diff(lhs, rhs, 1e-8));
    }
    return {"transmission_flux", worst <= tol, worst, tol};
}

inline CheckResult check_normalization(double t, double x, const SkewParams& p, const DensityFn& f,
                                       double tol = 1e-6) {
    const auto [lo, hi] = detail::mass_window(t, x, p);
    auto dens = [&](double y) { return f(t, x, y); };
    const double mass = detail::integrate_split(dens, lo, hi, p, tol * 1e-3);
    const double residual = std::fabs(mass - 1.0);
    return {"normalization", residual <= tol, residual, tol};
}

// Semigroup property: integrating p(t,x,.) p(s,.,y) must reproduce p(t+s,x,y).
inline CheckResult check_chapman(double t, double s, double x, double y, const SkewParams& p,
                                 const DensityFn& f, double tol = 1e-5) {
    const auto [lo1, hi1] = detail::mass_window(t, x, p);
    const auto [lo2, hi2] = detail::mass_window(s, y, SkewParams{p.z1, p.z2, p.beta1, p.beta2, -p.mu});
    const double lo = std::min(lo1, lo2), hi = std::max(hi1, hi2);
    auto kernel = [&](double w) { return f(t, x, w) * f(s, w, y); };
    const double conv = detail::integrate_split(kernel, lo, hi, p, 1e-10);
    const double direct = f(t + s, x, y);
    const double residual = detail::rel_diff(conv, direct);
    return {"chapman_kolmogorov", residual <= tol, residual, tol};
}

// Reversibility with respect to h(x) dx: h(x) p(t,x,y) = h(y) p(t,y,x).
inline CheckResult check_detailed_balance(double t, const SkewParams& p, const DensityFn& f,
                                          int pairs, RandomStream& rng, double tol = 1e-8,
                                          double span = 3.0) {
    double worst = 0.0;
    const double mid = 0.5 * (p.z1 + p.z2);
    for (int i = 0; i < pairs; ++i) {
        const double x = mid + span * (2.0 * rng.uniform01() - 1.0);
        const double y = mid + span * (2.0 * rng.uniform01() - 1.0);
        const double lhs = weight_h(x, p) * f(t, x, y);
        const double rhs = weight_h(y, p) * f(t, y, x);
        worst = std::max(worst, detail::rel_diff(lhs, rhs, 1e-30));
    }
    return {"detailed_balance", worst <= tol, worst, tol};
}

// ---- Named validation suites, as exposed by the command line tool ----

struct SuiteConfig {
    SkewParams params;
    TruncationPolicy policy;
    double t = 1.0;
    double x = 0.5;
    long long n = 50000;  // samples or walkers where applicable
    double dx = 0.01;     // lattice spacing for the walk suite
    std::uint64_t seed = 20260814;
    std::uint64_t stream = 0;
};

namespace detail {

inline DensityFn evaluator_for(const SuiteConfig& cfg, bool tight = false) {
    const SkewParams p = cfg.params;
    TruncationPolicy policy = cfg.policy;
    if (tight) {
        // Identity checks probe the limit law, not a particular truncation,
        // so push the series far enough that its tail is below the check
        // tolerance.
        policy.n_max = std::max(policy.n_max, 48);
        policy.tol = std::min(policy.tol, 1e-13);
    }
    if (p.mu == 0.0)
        return [p, policy](double t, double x, double y) {
            return density_driftless(t, x, y, p, policy).value;
        };
    return [p, policy](double t, double x, double y) {
        return density_two_barrier_drift(t, x, y, p, policy).value;
    };
}

}  // namespace detail

inline SuiteReport run_suite_normalization(const SuiteConfig& cfg) {
    SuiteReport rep{"normalization", {}};
    const DensityFn f = detail::evaluator_for(cfg, /*tight=*/true);
    for (double t : {0.5 * cfg.t, cfg.t, 2.0 * cfg.t})
        rep.checks.push_back(check_normalization(t, cfg.x, cfg.params, f));
    return rep;
}

inline SuiteReport run_suite_transmission(const SuiteConfig& cfg) {
    SuiteReport rep{"transmission", {}};
    const DensityFn f = detail::evaluator_for(cfg, /*tight=*/true);
    rep.checks.push_back(check_transmission_jump(cfg.t, cfg.x, cfg.params, f));
    rep.checks.push_back(check_transmission_flux(cfg.t, cfg.x, cfg.params, f));
    return rep;
}

inline SuiteReport run_suite_chapman(const SuiteConfig& cfg) {
    SuiteReport rep{"chapman", {}};
    const DensityFn f = detail::evaluator_for(cfg, /*tight=*/true);
    RandomStream rng{cfg.seed, cfg.stream + 7, 0};
    const double mid = 0.5 * (cfg.params.z1 + cfg.params.z2);
    for (int i = 0; i < 4; ++i) {
        const double x = mid + 2.0 * (2.0 * rng.uniform01() - 1.0);
        const double y = mid + 2.0 * (2.0 * rng.uniform01() - 1.0);
        rep.checks.push_back(check_chapman(0.6 * cfg.t, 0.4 * cfg.t, x, y, cfg.params, f));
    }
    return rep;
}

inline SuiteReport run_suite_balance(const SuiteConfig& cfg) {
    SuiteReport rep{"balance", {}};
    const DensityFn f = detail::evaluator_for(cfg, /*tight=*/true);
    RandomStream rng{cfg.seed, cfg.stream + 11, 0};
    rep.checks.push_back(check_detailed_balance(cfg.t, cfg.params, f, 200, rng));
    return rep;
}

inline SuiteReport run_suite_ks(const SuiteConfig& cfg) {
    SuiteReport rep{"ks", {}};
    if (cfg.params.mu != 0.0) throw std::domain_error("ks suite requires mu = 0");
    if (cfg.n < 100) throw std::domain_error("ks suite needs at least 100 samples");
    RandomStream rng{cfg.seed, cfg.stream + 13, 0};
    std::vector<double> samples;
    samples.reserve(static_cast<std::size_t>(cfg.n));
    for (long long i = 0; i < cfg.n; ++i)
        samples.push_back(sample_transition(cfg.t, cfg.x, cfg.params, cfg.policy, rng).first);
    const CdfInterp cdf = cdf_oracle(cfg.t, cfg.x, cfg.params);
    const double stat = ks_statistic(samples, cdf);
    const double crit = ks_critical_1pct(samples.size());
    rep.checks.push_back({"ks_statistic", stat < crit, stat, crit});
    return rep;
}

// Cross-checks between evaluators in overlapping regimes.
inline SuiteReport run_suite_reduction(const SuiteConfig& cfg) {
    SuiteReport rep{"reduction", {}};
    const SkewParams& p = cfg.params;
    RandomStream rng{cfg.seed, cfg.stream + 17, 0};

    // Single-barrier crosswalk: two-barrier series with beta2 = 0 against the
    // closed-form one-barrier density at mu = 0.
    {
        SkewParams q = p;
        q.mu = 0.0;
        q.beta2 = 0.0;
        double worst = 0.0;
        for (int i = 0; i < 50; ++i) {
            const double x = q.z1 + 6.0 * rng.uniform01() - 3.0;
            const double y = q.z1 + 6.0 * rng.uniform01() - 3.0;
            const double a = density_driftless(cfg.t, x, y, q, cfg.policy).value;
            const double b = density_one_barrier_drift(cfg.t, x, y, q.z1, q.beta1, 0.0).value;
            worst = std::max(worst, detail::rel_diff(a, b));
        }
        rep.checks.push_back({"one_barrier_crosswalk", worst <= 1e-12, worst, 1e-12});
    }

    // Fully reflecting barrier: beta = 1 at mu = 0 equals the image method.
    {
        double worst = 0.0;
        for (int i = 0; i < 50; ++i) {
            const double x = p.z1 + 3.0 * rng.uniform01();
            const double y = p.z1 + 3.0 * rng.uniform01();
            const double a = density_one_barrier_drift(cfg.t, x, y, p.z1, 1.0, 0.0).value;
            const double rt = std::sqrt(cfg.t);
            const double b = (normal_pdf((y - x) / rt) + normal_pdf((y + x - 2.0 * p.z1) / rt)) / rt;
            worst = std::max(worst, detail::rel_diff(a, b));
        }
        rep.checks.push_back({"reflecting_image_method", worst <= 1e-12, worst, 1e-12});
    }
    return rep;
}

inline SuiteReport run_suite_oracle_equivalence(const SuiteConfig& cfg) {
    SuiteReport rep{"oracle-equivalence", {}};
    RandomStream rng{cfg.seed, cfg.stream + 19, 0};
    const SkewParams& p = cfg.params;
    const double mid = 0.5 * (p.z1 + p.z2);
    if (p.mu == 0.0) {
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            const double x = mid + 4.0 * (2.0 * rng.uniform01() - 1.0);
            const double y = mid + 4.0 * (2.0 * rng.uniform01() - 1.0);
            const DensityValue dv = density_driftless(cfg.t, x, y, p, cfg.policy);
            const double oracle = fourier_density_driftless(cfg.t, x, y, p);
            const double excess = std::fabs(dv.value - oracle) - dv.error_bound;
            worst = std::max(worst, excess);
        }
        rep.checks.push_back({"series_vs_quadrature", worst <= 1e-9, worst, 1e-9});
    } else {
        double worst = 0.0;
        for (int i = 0; i < 50; ++i) {
            const double x = mid + 3.0 * (2.0 * rng.uniform01() - 1.0);
            const double y = mid + 3.0 * (2.0 * rng.uniform01() - 1.0);
            const DensityValue dv = density_two_barrier_drift(cfg.t, x, y, p, cfg.policy);
            const double oracle = fourier_density_drift(cfg.t, x, y, p);
            worst = std::max(worst, std::fabs(dv.value - oracle));
        }
        rep.checks.push_back({"drift_series_vs_quadrature", worst <= 1e-6, worst, 1e-6});
    }
    return rep;
}

// Lattice-walk goodness of fit: chi-square of binned endpoints against the
// series density (driftless).
inline SuiteReport run_suite_walk(const SuiteConfig& cfg) {
    SuiteReport rep{"walk", {}};
    if (cfg.params.mu != 0.0) throw std::domain_error("walk suite requires mu = 0");
    RandomStream rng{cfg.seed, cfg.stream, 0};
    const WalkHistogram h =
        skew_walk_simulate(cfg.t, cfg.x, cfg.params, cfg.dx, cfg.n, rng);

    // After `steps` steps the walk only reaches lattice sites of one parity,
    // so bin edges must sit on sites of the opposite parity; otherwise bins
    // alternate between covering ceil and floor of the same site count and
    // the test rejects even a plain random walk. Merge everything outside
    // +-3.5 sqrt(t) into the end bins.
    const double rt = std::sqrt(cfg.t);
    const double span = 3.5 * rt;
    const int bins = 20;
    const long long start_idx = h.base + h.steps;
    const long long reach_parity = ((start_idx + h.steps) % 2 + 2) % 2;
    std::vector<double> edges(static_cast<std::size_t>(bins) + 1);
    for (int i = 0; i <= bins; ++i) {
        const double e = cfg.x - span + 2.0 * span * i / bins;
        long long k = static_cast<long long>(std::llround((e - h.origin) / h.dx));
        if (((k % 2 + 2) % 2) == reach_parity) ++k;
        edges[static_cast<std::size_t>(i)] = h.origin + static_cast<double>(k) * h.dx;
    }
    std::vector<double> observed(static_cast<std::size_t>(bins), 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        if (h.counts[i] == 0) continue;
        const double pos = h.position(i);
        total += static_cast<double>(h.counts[i]);
        int b = static_cast<int>(std::floor((pos - edges.front()) / (edges.back() - edges.front()) * bins));
        b = std::max(0, std::min(bins - 1, b));
        // linear edge lookup is fine at this scale but respect snapped edges
        while (b > 0 && pos < edges[static_cast<std::size_t>(b)]) --b;
        while (b < bins - 1 && pos >= edges[static_cast<std::size_t>(b) + 1]) ++b;
        observed[static_cast<std::size_t>(b)] += static_cast<double>(h.counts[i]);
    }

    const DensityFn f = detail::evaluator_for(cfg);
    std::vector<double> expected(static_cast<std::size_t>(bins), 0.0);
    auto dens = [&](double y) { return f(cfg.t, cfg.x, y); };
    double pmass = 0.0;
    for (int b = 0; b < bins; ++b) {
        double lo = edges[static_cast<std::size_t>(b)], hi = edges[static_cast<std::size_t>(b) + 1];
        if (b == 0) lo = std::min(lo, cfg.x - 40.0 * rt);
        if (b == bins - 1) hi = std::max(hi, cfg.x + 40.0 * rt);
        expected[static_cast<std::size_t>(b)] = detail::integrate_split(dens, lo, hi, cfg.params, 1e-10);
        pmass += expected[static_cast<std::size_t>(b)];
    }
    for (double& e : expected) e *= total / pmass;

    double stat = 0.0;
    int df = -1;
    for (int b = 0; b < bins; ++b) {
        const double e = expected[static_cast<std::size_t>(b)];
        if (e < 5.0) continue;  // drop ultra-thin bins rather than merging
        const double o = observed[static_cast<std::size_t>(b)];
        stat += (o - e) * (o - e) / e;
        ++df;
    }
    const double pval = chi_square_pvalue(stat, std::max(df, 1));
    rep.checks.push_back({"walk_chi_square_pvalue", pval > 0.01, pval, 0.01});
    return rep;
}

inline SuiteReport run_suite(const std::string& name, const SuiteConfig& cfg) {
    if (name == "normalization") return run_suite_normalization(cfg);
    if (name == "transmission") return run_suite_transmission(cfg);
    if (name == "chapman") return run_suite_chapman(cfg);
    if (name == "balance") return run_suite_balance(cfg);
    if (name == "ks") return run_suite_ks(cfg);
    if (name == "reduction") return run_suite_reduction(cfg);
    if (name == "oracle-equivalence") return run_suite_oracle_equivalence(cfg);
    if (name == "walk") return run_suite_walk(cfg);
    throw std::invalid_argument("unknown validation suite: " + name);
}

}  // namespace skewbm

#endif
