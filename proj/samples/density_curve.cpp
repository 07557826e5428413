// Usage example: evaluate the transition density of skew Brownian motion
// with barriers at 0 and 1 on a grid of endpoints and print a CSV curve.
#include <cstdio>

#include <skewbm/skewbm.hpp>

int main() {
    using namespace skewbm;

    const SkewParams params{0.0, 1.0, 0.5, -0.5, 0.0};  // z1, z2, beta1, beta2, mu
    const TruncationPolicy policy{10, 1e-10};
    const double t = 1.0;
    const double x = 0.5;

    std::printf("y,density,error_bound\n");
    for (int i = 0; i <= 140; ++i) {
        const double y = -3.0 + 7.0 * i / 140.0;
        const DensityValue dv = density_driftless(t, x, y, params, policy);
        std::printf("%.12g,%.12g,%.3g\n", y, dv.value, dv.error_bound);
    }
    return 0;
}
