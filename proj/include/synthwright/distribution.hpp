#ifndef SYNTHWRIGHT_DISTRIBUTION_HPP
#define SYNTHWRIGHT_DISTRIBUTION_HPP

#include <string>

#include "synthwright/rng.hpp"

namespace synthwright {

enum class DistFamily { Uniform, Normal, Exponential, Gamma, Beta };

std::string family_name(DistFamily f);
DistFamily family_from_name(const std::string& name);

// One parametric continuous distribution. Parameter slots by family:
//   uniform:     loc = lower bound, scale = width
//   normal:      a = mean, b = standard deviation
//   exponential: loc = origin, scale = mean - origin (1/rate)
//   gamma:       a = shape, loc, scale
//   beta:        a = alpha, b = beta, loc = lower bound, scale = width
struct ContinuousDistribution {
    DistFamily family = DistFamily::Uniform;
    double a = 0.0;
    double b = 0.0;
    double loc = 0.0;
    double scale = 1.0;

    double pdf(double x) const;
    double cdf(double x) const;
    double quantile(double p) const;
    double sample(Rng& rng) const;

    double log_pdf(double x) const;

    // Human-readable, e.g. "normal(mean=10, std=2)".
    std::string describe() const;
};

ContinuousDistribution make_uniform(double lo, double hi);
ContinuousDistribution make_normal(double mean, double sd);
ContinuousDistribution make_exponential(double loc, double scale);
ContinuousDistribution make_gamma(double shape, double loc, double scale);
ContinuousDistribution make_beta(double alpha, double beta, double loc, double scale);

} // namespace synthwright

#endif
