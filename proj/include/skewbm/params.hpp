#ifndef SKEWBM_PARAMS_HPP
#define SKEWBM_PARAMS_HPP

#include <cmath>
#include <stdexcept>
#include <string>

namespace skewbm {

// Model parameters: two barriers z1 < z2 with skewness coefficients beta1,
// beta2 in [-1,1], plus a constant drift mu. At barrier z_j the process is
// pushed upward with probability (1+beta_j)/2.
struct SkewParams {
    double z1 = 0.0;
    double z2 = 1.0;
    double beta1 = 0.0;
    double beta2 = 0.0;
    double mu = 0.0;

    double barrier_gap() const { return z2 - z1; }
    double beta_product() const { return beta1 * beta2; }
};

// Series truncation controls. tol is an absolute target on the density ratio
// v; n_max is the hard cap on the series index.
struct TruncationPolicy {
    int n_max = 10;
    double tol = 1e-10;
};

// A density evaluation together with its truncation metadata. error_bound is
// rigorous for the driftless series (geometric tail bound) and heuristic for
// the drifted double series (flagged by exact_formula = false there as well).
struct DensityValue {
    double value = 0.0;
    double error_bound = 0.0;
    int terms_used = 0;
    bool exact_formula = false;
};

inline void validate_params(const SkewParams& p) {
    if (!(std::isfinite(p.z1) && std::isfinite(p.z2) && std::isfinite(p.beta1) &&
          std::isfinite(p.beta2) && std::isfinite(p.mu)))
        throw std::domain_error("skew parameters must be finite");
    if (!(p.z1 < p.z2))
        throw std::domain_error("barriers must satisfy z1 < z2");
    if (std::fabs(p.beta1) > 1.0 || std::fabs(p.beta2) > 1.0)
        throw std::domain_error("skewness coefficients must lie in [-1, 1]");
    if (std::fabs(p.beta1 * p.beta2) >= 1.0)
        throw std::domain_error("|beta1*beta2| must be < 1 for the series to converge");
}

// Both beta_i*mu > 0 is required by the drifted two-barrier series; other sign
// combinations are not covered by the closed-form expansion.
inline void validate_drift_regime(const SkewParams& p) {
    validate_params(p);
    if (!(p.beta1 * p.mu > 0.0 && p.beta2 * p.mu > 0.0))
        throw std::domain_error(
            "drifted two-barrier density requires beta1*mu > 0 and beta2*mu > 0 "
            "(other sign regimes are not covered by the series expansion)");
}

inline void require_time(double t) {
    if (!(t > 0.0) || !std::isfinite(t)) throw std::domain_error("time t must be positive and finite");
}

// Piecewise speed-measure weight: three constant values, right-continuous at
// the barriers.
inline double weight_k(double x, const SkewParams& p) {
    if (x < p.z1) return 0.25 * (1.0 - p.beta1) * (1.0 - p.beta2);
    if (x < p.z2) return 0.25 * (1.0 + p.beta1) * (1.0 - p.beta2);
    return 0.25 * (1.0 + p.beta1) * (1.0 + p.beta2);
}

// Drift-adjusted weight; the density is reversible with respect to h(x)dx.
inline double weight_h(double x, const SkewParams& p) {
    return weight_k(x, p) * std::exp(2.0 * p.mu * x);
}

// Uniform envelope bound on the density ratio v = p / p_gaussian.
inline double vbar(const SkewParams& p) {
    const double bb = std::fabs(p.beta1 * p.beta2);
    return (1.0 + std::fabs(p.beta1)) * (1.0 + std::fabs(p.beta2)) / (1.0 - bb);
}

// Geometric bound on the ratio-series tail after the first n+1 terms.
inline double delta_n(const SkewParams& p, int n) {
    const double bb = std::fabs(p.beta1 * p.beta2);
    if (bb == 0.0) return 0.0;
    return std::pow(bb, n + 1);
}

inline double rest_bound(const SkewParams& p, int n) { return vbar(p) * delta_n(p, n); }

}  // namespace skewbm

#endif
