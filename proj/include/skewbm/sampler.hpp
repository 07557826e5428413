#ifndef SKEWBM_SAMPLER_HPP
#define SKEWBM_SAMPLER_HPP

#include <array>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "density.hpp"
#include "params.hpp"
#include "rng.hpp"
#include "special.hpp"

namespace skewbm {

struct BernoulliDecision {
    bool value = false;  // the decided event {u < p}
    int index = 0;       // first series index at which the gap test fired
    bool exact = false;  // false only when n_max was exhausted
};

// Decide {u < p} from approximants f_n with |p - f_n| <= delta_n, evaluating
// as few indices as possible: the decision is safe as soon as
// |u - f_n| > delta_n. On failure the next index tried is the smallest one
// whose bound delta is already below the observed gap (never less than n+1),
// so repeated near-misses cannot stall progress. Exhausting n_max degrades to
// the truncated decision {u < f_{n_max}} with exact = false.
template <class Approx, class Bound>
BernoulliDecision lazy_bernoulli(double u, Approx&& f, Bound&& delta, int n_max) {
    if (n_max < 0) throw std::domain_error("lazy_bernoulli requires n_max >= 0");
    int n = 0;
    for (;;) {
        const double fn = f(n);
        const double dn = delta(n);
        const double gap = std::fabs(u - fn);
        if (gap > dn) return {u < fn, n, true};
        if (n >= n_max) return {u < fn, n, false};
        int m = n + 1;
        while (m < n_max && gap > 0.0 && delta(m) >= gap) ++m;
        n = m;
    }
}

// One proposal's audit trail. decision_index counts series terms consumed
// (head index + 1), so an immediate decision records 1.
struct AcceptanceRecord {
    double proposal = 0.0;
    double uniform = 0.0;
    int decision_index = 0;
    bool accepted = false;
    bool exact = false;
};

struct SampleStats {
    double mean_decision_index = 0.0;
    double exact_fraction = 0.0;
    double acceptance_rate = 0.0;
};

inline SampleStats acceptance_stats(const std::vector<AcceptanceRecord>& records) {
    if (records.empty()) throw std::domain_error("acceptance_stats needs at least one record");
    double idx = 0.0, ex = 0.0, acc = 0.0;
    for (const AcceptanceRecord& r : records) {
        idx += r.decision_index;
        ex += r.exact ? 1.0 : 0.0;
        acc += r.accepted ? 1.0 : 0.0;
    }
    const double n = static_cast<double>(records.size());
    return {idx / n, ex / n, acc / n};
}

// Exact draw from the driftless transition law at time t started at x, by
// rejection from N(x, t) with the lazily evaluated ratio series as the
// acceptance probability. Every proposal (accepted or not) is appended to
// sink when provided.
inline std::pair<double, AcceptanceRecord> sample_transition(
    double t, double x, const SkewParams& p, const TruncationPolicy& policy, RandomStream& rng,
    std::vector<AcceptanceRecord>* sink = nullptr) {
    validate_params(p);
    require_time(t);
    if (p.mu != 0.0) throw std::domain_error("sample_transition covers the driftless law only");
    const double vb = vbar(p);
    const double bb = std::fabs(p.beta_product());
    const double rt = std::sqrt(t);
    for (;;) {
        const double y = x + rt * rng.gaussian();
        const double u = rng.uniform01();
        const std::array<double, 4> c = coeffs_driftless(y, p);
        const std::array<double, 4> a = path_lengths(x, y, p);
        double partial = 0.0;
        int computed_to = -1;
        auto f = [&](int n) {
            for (int k = computed_to + 1; k <= n; ++k)
                partial += detail::ratio_term(t, x, y, p, k, c, a);
            computed_to = std::max(computed_to, n);
            return partial / vb;
        };
        auto d = [&](int n) { return (bb == 0.0) ? 0.0 : std::pow(bb, n + 1); };
        const BernoulliDecision dec = lazy_bernoulli(u, f, d, policy.n_max);
        const AcceptanceRecord rec{y, u, dec.index + 1, dec.value, dec.exact};
        if (sink) sink->push_back(rec);
        if (dec.value) return {y, rec};
    }
}

struct PathSample {
    std::vector<double> times;
    std::vector<double> positions;
    std::vector<AcceptanceRecord> records;
};

// Skeleton of the process on the given time grid, chaining exact transition
// draws over the increments. times must start at the initial time and be
// strictly increasing.
inline PathSample sample_path(const std::vector<double>& times, double x0, const SkewParams& p,
                              const TruncationPolicy& policy, RandomStream& rng) {
    if (times.size() < 2) throw std::domain_error("sample_path needs at least two time points");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1])) throw std::domain_error("times must be strictly increasing");
    PathSample out;
    out.times = times;
    out.positions.reserve(times.size());
    out.positions.push_back(x0);
    double x = x0;
    for (std::size_t i = 1; i < times.size(); ++i) {
        const double dt = times[i] - times[i - 1];
        auto [y, rec] = sample_transition(dt, x, p, policy, rng, &out.records);
        x = y;
        out.positions.push_back(x);
    }
    return out;
}

}  // namespace skewbm

#endif
