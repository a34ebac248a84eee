#ifndef SYNTHWRIGHT_STATS_HPP
#define SYNTHWRIGHT_STATS_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "synthwright/distribution.hpp"

namespace synthwright {

// Value counts for one categorical column. std::map keeps the value order
// deterministic everywhere the table is iterated or serialized.
struct FrequencyTable {
    std::map<std::string, std::int64_t> counts;

    std::int64_t total() const;
    void add(const std::string& value, std::int64_t n = 1);
    static FrequencyTable from_column(const std::vector<std::string>& values);
};

struct FitResult {
    ContinuousDistribution distribution;
    double ks_p_value = 0.0;
    bool accepted = false;
};

struct KsResult {
    double statistic = 0.0;
    double p_value = 0.0;
};

struct Chi2Result {
    double statistic = 0.0;
    double p_value = 0.0;
    std::int64_t dof = 0;
};

// One-sample Kolmogorov-Smirnov against an arbitrary CDF. The p-value is the
// asymptotic Kolmogorov series evaluated at (sqrt(n) + 0.12 + 0.11/sqrt(n)) * D,
// truncated once a term drops below 1e-10.
KsResult ks_test(std::vector<double> data,
                 const std::function<double(double)>& cdf);
KsResult ks_test(std::vector<double> data, const ContinuousDistribution& dist);

// Exposed for the p-value unit tests: the series itself on a precomputed
// statistic, without re-sorting data.
double kolmogorov_p_value(std::size_t n, double d_statistic);

// Pearson chi-square independence test on two paired categorical columns.
Chi2Result chi_square_independence(const std::vector<std::string>& a,
                                   const std::vector<std::string>& b);

// Shannon entropy in bits of a frequency table.
double entropy_bits(const FrequencyTable& table);

// Theil's uncertainty coefficient U(tgt | src) = (H(tgt) - H(tgt|src)) / H(tgt),
// in [0, 1]; defined as 0 when H(tgt) = 0. Asymmetric on purpose.
double theils_u(const std::vector<std::string>& src,
                const std::vector<std::string>& tgt);

// KL divergence between two numeric samples over a shared histogram:
// bins span the union range, bin count is ceil(sqrt(min(|p|, |q|))) clamped to
// [10, 50], and every bin mass gets +1e-9 before normalizing so the ratio is
// always finite. Base-2 logarithm.
double kl_divergence(const std::vector<double>& p_samples,
                     const std::vector<double>& q_samples);

// Jensen-Shannon divergence, base 2, in [0, 1]. The numeric overload shares
// the KL binning; the categorical overload works on raw frequency tables so
// disjoint supports score exactly 1.
double js_divergence(const std::vector<double>& p_samples,
                     const std::vector<double>& q_samples);
double js_divergence(const FrequencyTable& p, const FrequencyTable& q);

// Fits uniform, normal, beta, exponential and gamma by maximum likelihood
// (method-of-moments + Nelder-Mead refinement where no closed form exists)
// and returns the family with the highest KS p-value, provided that p-value
// exceeds 0.05. Degenerate input (all values equal) yields no fit; fewer than
// two samples is an error.
std::optional<FitResult> fit_distribution(const std::vector<double>& data);

double ks_acceptance_threshold();

} // namespace synthwright

#endif
