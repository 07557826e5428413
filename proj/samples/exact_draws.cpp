// Usage example: draw exact transition samples of skew Brownian motion and
// summarize the rejection sampler's bookkeeping.
#include <cstdio>
#include <vector>

#include <skewbm/skewbm.hpp>

int main() {
    using namespace skewbm;

    const SkewParams params{0.0, 1.0, 0.3, -0.7, 0.0};
    const TruncationPolicy policy{10, 1e-10};
    const double t = 1.0;
    const double x = 0.5;

    RandomStream rng{20260814, 0, 0};
    std::vector<AcceptanceRecord> records;
    std::vector<double> draws;
    for (int i = 0; i < 10000; ++i)
        draws.push_back(sample_transition(t, x, params, policy, rng, &records).first);

    double mean = 0.0;
    for (double d : draws) mean += d;
    mean /= static_cast<double>(draws.size());

    const SampleStats stats = acceptance_stats(records);
    std::printf("draws: %zu, sample mean: %.6f\n", draws.size(), mean);
    std::printf("envelope vbar: %.4f, acceptance rate: %.4f\n", vbar(params),
                stats.acceptance_rate);
    std::printf("mean decision index: %.4f, exact decisions: %.2f%%\n",
                stats.mean_decision_index, 100.0 * stats.exact_fraction);
    std::printf("first draws: %.6f %.6f %.6f %.6f\n", draws[0], draws[1], draws[2], draws[3]);
    return 0;
}
