#ifndef SYNTHWRIGHT_CONSTRAINTS_HPP
#define SYNTHWRIGHT_CONSTRAINTS_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "synthwright/dataset.hpp"
#include "synthwright/stats.hpp"

namespace synthwright {

struct NumericConstraint {
    double min = 0.0;
    double max = 0.0;
    std::optional<FitResult> fit;
};

// Per-column statistical summary: a frequency table for categorical columns,
// bounds plus an optional fitted distribution for numeric ones.
struct ColumnConstraint {
    std::string column;
    ColumnKind kind = ColumnKind::Categorical;
    FrequencyTable frequency; // categorical only
    NumericConstraint numeric; // numeric only
};

enum class EdgeType { CatCat, CatNum };

// Directed dependency between two columns, annotated with how well the
// underlying association explained the data.
struct Edge {
    std::string src;
    std::string tgt;
    EdgeType type = EdgeType::CatCat;
    double u_value = 0.0; // cat_cat only
    double inf_error = 0.0;

    std::pair<std::string, std::string> key() const { return {src, tgt}; }
};

// Conditional frequency tables for one categorical target, keyed by the
// joint value-combination of all its source columns (sorted by name).
// A single-source target is just the one-column special case.
struct CatCatAssociation {
    std::vector<std::string> sources;
    std::string target;
    std::map<std::vector<std::string>, FrequencyTable> table;
};

struct PerValueNumeric {
    double min = 0.0;
    double max = 0.0;
    std::optional<FitResult> fit;
    std::int64_t count = 0;
};

// Per-category numeric summaries for a (categorical source, numeric target)
// pair. Source values with too few rows carry no entry; consumers fall back
// to the target's own column constraint.
struct CatNumAssociation {
    std::string source;
    std::string target;
    std::map<std::string, PerValueNumeric> per_value;
};

struct CdgNode {
    ColumnConstraint constraint;
    double inf_error = 0.0;
    bool gen_node = false;
};

// Range-rescaling request attached to one column: values generated against
// the data range are mapped affinely onto the user range afterwards.
struct ScalingDirective {
    double min_data = 0.0;
    double max_data = 0.0;
    double min_user = 0.0;
    double max_user = 0.0;
};

// Constraint dependency graph: one node per column, directed association
// edges, and the association payloads needed to generate each target.
struct Cdg {
    std::vector<std::string> column_order;
    std::map<std::string, CdgNode> nodes;
    std::vector<Edge> edges; // kept sorted by (src, tgt)
    std::map<std::string, CatCatAssociation> cat_cat;             // by target
    std::map<std::pair<std::string, std::string>, CatNumAssociation> cat_num;

    std::string dataset_name;
    std::int64_t source_rows = 0;
    std::optional<std::string> label_column;

    const CdgNode& node(const std::string& name) const;
    bool has_node(const std::string& name) const;
    std::vector<Edge> incoming(const std::string& tgt) const;
    void sort_edges();
    void remove_edge(const std::string& src, const std::string& tgt);
};

struct InferenceOptions {
    double chi2_alpha = 0.05;
    double u_threshold = 0.10;
    std::int64_t min_group_size = 30;
    double group_row_coverage = 0.90;
};

std::vector<ColumnConstraint> infer_column_constraints(const Dataset& ds);

struct InferredAssociations {
    std::vector<Edge> cat_cat_edges;
    std::vector<Edge> cat_num_edges;
    std::vector<CatNumAssociation> cat_num;
};

// Pairwise association discovery. A cat_cat edge s->t is kept when the
// chi-square test rejects independence, U(t|s) clears the threshold, and the
// s->t orientation explains at least as much entropy as t->s (exact ties keep
// both directions, leaving a 2-cycle for the planner to break). A cat_num
// edge is kept when groups of at least min_group_size cover enough rows and
// at least one group accepts a distribution fit.
InferredAssociations infer_associations(const Dataset& ds,
                                        const InferenceOptions& opt = {});

Cdg build_cdg(const Dataset& ds, const InferenceOptions& opt = {});

// Projects a joint table onto a subset of its sources by summing counts.
CatCatAssociation marginalize_cat_cat(const CatCatAssociation& assoc,
                                      const std::vector<std::string>& keep);

// Removes a column and everything referring to it: its node, incident
// edges, conditional payloads, and its column_order slot.
void drop_column(Cdg& cdg, const std::string& name);

void save_constraints(const Cdg& cdg, const std::string& path);
Cdg load_constraints(const std::string& path);
std::string constraints_to_json_text(const Cdg& cdg);
Cdg constraints_from_json_text(const std::string& text);

} // namespace synthwright

#endif
