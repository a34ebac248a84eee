#ifndef SYNTHWRIGHT_PROPTEST_HPP
#define SYNTHWRIGHT_PROPTEST_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "synthwright/constraints.hpp"
#include "synthwright/dataset.hpp"
#include "synthwright/model.hpp"
#include "synthwright/udc.hpp"

namespace synthwright {

// Which values of the protected column count as privileged/unprivileged,
// and which predicted label is the favorable outcome.
struct FairnessSpec {
    std::string protected_attribute;
    std::vector<std::string> privileged;
    std::vector<std::string> unprivileged;
    std::string favorable_label;
};

enum class PropertyKind { GroupFairness, IndividualFairness, Robustness };

// A stored counterexample: the generated sample, the variant that exposed
// the failure (counterfactual twin or perturbed neighbor; empty for group
// fairness), and both predictions.
struct Witness {
    std::vector<std::string> sample;
    std::vector<std::string> variant;
    std::string sample_prediction;
    std::string variant_prediction;
};

struct PropertyReport {
    PropertyKind property = PropertyKind::GroupFairness;
    double metric_value = 0.0;
    bool flagged = false;
    std::int64_t generated = 0;
    std::int64_t failing = 0;
    std::int64_t total_failure_count = 0; // robustness: failing neighbors overall
    std::vector<std::string> columns;     // order used by witness cells
    std::vector<Witness> witnesses;       // capped
};

// Ratio of favorable prediction rates, unprivileged over privileged.
// Returns +infinity when the privileged group has no favorable predictions.
double disparate_impact(const Classifier& model, const Dataset& data,
                        const FairnessSpec& spec);

// Synthesizes a population with the protected attribute made independent
// (label column and the protected column's incoming edges removed, user
// edits applied first) and evaluates disparate impact; flagged when < 0.8.
PropertyReport group_fairness_test(const Cdg& cdg, const std::vector<Udc>& udcs,
                                   const Classifier& model, const FairnessSpec& spec,
                                   std::size_t n, std::uint64_t seed);

// Synthesizes n samples and, for each, predicts every privileged/unprivileged
// counterfactual twin pair; a sample fails when any pair disagrees.
PropertyReport individual_fairness_test(const Cdg& cdg, const std::vector<Udc>& udcs,
                                        const Classifier& model, const FairnessSpec& spec,
                                        std::size_t n, std::uint64_t seed);

// Synthesizes n samples and perturbs one feature at a time: categorical
// cells try every alternate observed value, numeric cells move by
// max(1, 1% of range) in both directions, clamped to the column range.
// A sample fails when any neighbor's prediction differs.
PropertyReport robustness_test(const Cdg& cdg, const std::vector<Udc>& udcs,
                               const Classifier& model, std::size_t n, std::uint64_t seed);

std::string report_to_json_text(const PropertyReport& report);
void save_report(const PropertyReport& report, const std::string& path);

} // namespace synthwright

#endif
