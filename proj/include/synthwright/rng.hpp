#ifndef SYNTHWRIGHT_RNG_HPP
#define SYNTHWRIGHT_RNG_HPP

#include <cstdint>
#include <random>
#include <vector>

namespace synthwright {

// Deterministic random source. The engine is mt19937_64, whose output
// sequence is fixed by the C++ standard, and every variate below is derived
// from it with explicit transforms. std::normal_distribution and friends are
// deliberately avoided: their algorithms differ between standard libraries,
// which would break byte-identical artifacts across platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // Uniform on [0, 1), 53-bit resolution.
    double uniform01() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }

    // Unbiased integer in [0, n) via rejection on the top of the range.
    std::uint64_t below(std::uint64_t n);

    // Standard normal via Box-Muller. No spare is cached so that the draw
    // count per call is fixed, keeping replay independent of call history.
    double normal01();

    double normal(double mean, double sd) { return mean + sd * normal01(); }

    double exponential(double scale);

    // Marsaglia-Tsang for shape >= 1, boosted for shape < 1.
    double gamma(double shape, double scale);

    double beta(double a, double b);

    // Fisher-Yates.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 eng_;
};

} // namespace synthwright

#endif
