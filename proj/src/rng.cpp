#include "synthwright/rng.hpp"

#include <cmath>

namespace synthwright {

std::uint64_t Rng::below(std::uint64_t n) {
    if (n <= 1) return 0;
    // Reject draws from the partial block at the top of the 64-bit range.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
        x = eng_();
    } while (x >= limit);
    return x % n;
}

double Rng::normal01() {
    double u1 = uniform01();
    // Guard the log; uniform01 can return exactly 0.
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return r * std::cos(2.0 * M_PI * u2);
}

double Rng::exponential(double scale) {
    double u = uniform01();
    while (u <= 0.0) u = uniform01();
    return -scale * std::log(u);
}

double Rng::gamma(double shape, double scale) {
    if (shape < 1.0) {
        // Boost to shape+1 and correct with a power of a uniform.
        double u = uniform01();
        while (u <= 0.0) u = uniform01();
        return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = normal01();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        double u = uniform01();
        while (u <= 0.0) u = uniform01();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v * scale;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v * scale;
    }
}

double Rng::beta(double a, double b) {
    const double x = gamma(a, 1.0);
    const double y = gamma(b, 1.0);
    return x / (x + y);
}

} // namespace synthwright
