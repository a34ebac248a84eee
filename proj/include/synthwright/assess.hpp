#ifndef SYNTHWRIGHT_ASSESS_HPP
#define SYNTHWRIGHT_ASSESS_HPP

#include <cstdint>
#include <string>
#include <utility>

#include "synthwright/constraints.hpp"
#include "synthwright/dataset.hpp"

namespace synthwright {

struct RealisticityReport {
    std::int64_t association_range_anomalies = 0;
    std::int64_t density_anomalies = 0;
    double js_divergence = 0.0;
    double association_js_divergence = 0.0;
    std::int64_t sample_size = 0;
};

// Rows of synth that violate any global numeric range or any per-value
// range of a cat_num association; each row counts once.
std::int64_t association_range_anomaly(const Dataset& real, const Dataset& synth,
                                       const Cdg& cdg);

// Rows of synth whose kth-nearest-neighbor distance to the real data
// exceeds the 95th percentile of the real rows' own leave-self-out
// kth-neighbor distances. Numeric cells are z-scored by real statistics;
// a categorical mismatch adds 1 to the squared distance.
std::int64_t density_anomaly(const Dataset& real, const Dataset& synth, std::size_t k = 5);

// (mean per-column JS divergence, mean JS over per-source-value numeric
// slices of each cat_num association). The smaller dataset is first grown
// to the larger one's size by whole copies plus a seeded random remainder.
std::pair<double, double> js_report(const Dataset& real, const Dataset& synth,
                                    const Cdg& cdg, std::uint64_t seed = 42);

// Train M1 on a split of real data, synthesize a same-size training set
// from constraints inferred on that split, label it with M1, train M2 on
// it, and score both models on the held-out rows.
std::pair<double, double> accuracy_transfer(const Dataset& real, const std::string& label,
                                            double split_ratio, std::uint64_t seed);

RealisticityReport assess_realisticity(const Dataset& real, const Dataset& synth,
                                       const Cdg& cdg, std::size_t k = 5,
                                       std::uint64_t seed = 42);

std::string realisticity_to_json_text(const RealisticityReport& report);
void save_realisticity(const RealisticityReport& report, const std::string& path);

} // namespace synthwright

#endif
