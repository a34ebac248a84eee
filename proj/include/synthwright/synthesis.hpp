#ifndef SYNTHWRIGHT_SYNTHESIS_HPP
#define SYNTHWRIGHT_SYNTHESIS_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "synthwright/constraints.hpp"
#include "synthwright/dataset.hpp"
#include "synthwright/rng.hpp"

namespace synthwright {

struct RemovedEdge {
    std::string src;
    std::string tgt;
    std::string reason;
};

// Acyclic generation plan: the input graph with cycle-breaking removals
// applied, a topological column order, and the seed the run will use.
struct GenerationPlan {
    Cdg dag;
    std::vector<std::string> order;
    std::vector<RemovedEdge> removed_edges;
    std::map<std::string, ScalingDirective> scaling;
    std::uint64_t seed = 42;
};

using EdgeKey = std::pair<std::string, std::string>;

// Bookkeeping of how much estimation error each generated column carries,
// composed along the chain: edge_error(e) = inf_error(e) + node_error(src),
// node_error(target) = edge_error(chosen) + kl_error(chosen) * inf_error(n).
// Leaves carry their own inf_error; kl_error is zero except for numeric
// generator nodes, where it is measured against the node's own marginal.
struct SynthesisErrorLedger {
    std::map<std::string, double> node_error;
    std::map<EdgeKey, double> edge_error;
    std::map<std::string, std::optional<EdgeKey>> chosen_edge;
    std::map<EdgeKey, double> kl_error;
};

// Removes directed cycles: for each cycle found, delete the edge with the
// largest inf_error among those whose target can regenerate itself (a
// GenNode); ties go to the lexicographically greatest (src,tgt) so the
// smaller-source orientation survives. Errors if a cycle has no such edge,
// or a non-generator node is left with no incoming edges.
GenerationPlan preprocess(const Cdg& cdg, std::uint64_t seed = 42);

Dataset synthesize(const GenerationPlan& plan, std::size_t n,
                   SynthesisErrorLedger& ledger);
Dataset synthesize(const GenerationPlan& plan, std::size_t n);

// Exact apportionment of n into the table's values: floor of each quota,
// leftovers to the largest fractional parts (ties to the smaller value).
std::map<std::string, std::int64_t> largest_remainder_counts(const FrequencyTable& freq,
                                                             std::int64_t n);

// Marginal generation for leaf nodes.
std::vector<std::string> gen_marginal_categorical(const CdgNode& node, std::size_t n,
                                                  Rng& rng);
std::vector<double> gen_marginal_numeric(const CdgNode& node, std::size_t n, Rng& rng);

std::string ledger_to_json_text(const SynthesisErrorLedger& ledger);
void save_ledger(const SynthesisErrorLedger& ledger, const std::string& path);

} // namespace synthwright

#endif
