#ifndef SYNTHWRIGHT_UDC_HPP
#define SYNTHWRIGHT_UDC_HPP

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "synthwright/constraints.hpp"
#include "synthwright/distribution.hpp"

namespace synthwright {

enum class UdcKind { Add, Modify, Delete };

// One user-supplied constraint edit. Exactly one of column/edge is set.
// The payload fields are populated according to what the edit carries:
// a frequency table or a distribution-plus-range for column edits, a
// conditional table or per-value ranges for edge edits, an element name
// ("distribution" or "range") for partial deletes, nothing for full deletes.
struct Udc {
    UdcKind kind = UdcKind::Modify;
    std::optional<std::string> column;
    std::optional<std::pair<std::string, std::string>> edge;

    std::optional<FrequencyTable> frequency;
    std::optional<ContinuousDistribution> distribution;
    std::optional<double> min;
    std::optional<double> max;
    std::optional<std::string> element;
    std::map<std::string, FrequencyTable> table;          // cat_cat edge payload
    std::map<std::string, PerValueNumeric> per_value;     // cat_num edge payload
};

// The graph after user edits: edited columns are pinned as leaves (their
// incoming edges dropped), and range-only edits are deferred to an affine
// rescale applied to the generated values.
struct MergedCdg {
    Cdg cdg;
    std::set<std::string> pinned_leaves;
    std::map<std::string, ScalingDirective> scaling;
};

std::vector<Udc> udcs_from_json_text(const std::string& text);
std::vector<Udc> load_udcs(const std::string& path);

// Applies the edits with user-over-data precedence. Two edits touching the
// same column or the same edge are rejected rather than silently ordered.
MergedCdg merge(const Cdg& cdg, const std::vector<Udc>& udcs);

// v -> min_user + (v - min_data) * (max_user - min_user) / (max_data - min_data)
std::vector<double> apply_scaling(const std::vector<double>& values,
                                  const ScalingDirective& d);

} // namespace synthwright

#endif
