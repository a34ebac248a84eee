#include "synthwright/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "synthwright/errors.hpp"
#include "synthwright/stats.hpp"
#include "synthwright/udc.hpp"

namespace synthwright {

using nlohmann::json;

namespace {

constexpr int kRejectionBudget = 100;

using AdjacencyMap = std::map<std::string, std::vector<std::string>>;

AdjacencyMap adjacency(const std::vector<Edge>& edges) {
    AdjacencyMap adj;
    for (const auto& e : edges) adj[e.src].push_back(e.tgt);
    for (auto& [src, tgts] : adj) std::sort(tgts.begin(), tgts.end());
    return adj;
}

// Kahn with a lexicographic frontier. Returns the order of the acyclic part;
// nodes left with positive in-degree belong to cycles.
std::vector<std::string> kahn_order(const Cdg& cdg, std::map<std::string, int>& in_degree) {
    in_degree.clear();
    for (const auto& [name, node] : cdg.nodes) in_degree[name] = 0;
    for (const auto& e : cdg.edges) ++in_degree[e.tgt];
    AdjacencyMap adj = adjacency(cdg.edges);

    std::set<std::string> frontier;
    for (const auto& [name, deg] : in_degree)
        if (deg == 0) frontier.insert(name);

    std::vector<std::string> order;
    while (!frontier.empty()) {
        std::string u = *frontier.begin();
        frontier.erase(frontier.begin());
        order.push_back(u);
        auto it = adj.find(u);
        if (it == adj.end()) continue;
        for (const auto& v : it->second)
            if (--in_degree[v] == 0) frontier.insert(v);
    }
    return order;
}

// Walks the cyclic remainder of the graph from its smallest node and returns
// the node sequence of the first cycle closed by the walk.
std::vector<std::string> find_cycle(const Cdg& cdg, const std::map<std::string, int>& in_degree) {
    std::set<std::string> remaining;
    for (const auto& [name, deg] : in_degree)
        if (deg > 0) remaining.insert(name);
    AdjacencyMap adj = adjacency(cdg.edges);

    // Every remaining node has an in-edge from a remaining node, so a walk
    // along remaining successors must eventually revisit one.
    std::string cur = *remaining.begin();
    std::vector<std::string> path;
    std::map<std::string, std::size_t> pos;
    while (pos.find(cur) == pos.end()) {
        pos[cur] = path.size();
        path.push_back(cur);
        const auto& tgts = adj.at(cur);
        std::string next;
        for (const auto& t : tgts)
            if (remaining.count(t)) {
                next = t;
                break;
            }
        if (next.empty()) throw Error("internal: cyclic region walk escaped");
        cur = next;
    }
    return {path.begin() + static_cast<std::ptrdiff_t>(pos[cur]), path.end()};
}

std::string join_names(const std::vector<std::string>& names) {
    std::string out;
    for (const auto& n : names) {
        if (!out.empty()) out += ", ";
        out += n;
    }
    return out;
}

double clamp_to(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

// Draw from the distribution, retrying until the value lands in [lo,hi];
// after the budget is spent, clamp the last draw in.
double sample_within(const ContinuousDistribution& dist, double lo, double hi, Rng& rng) {
    double v = 0.0;
    for (int attempt = 0; attempt < kRejectionBudget; ++attempt) {
        v = dist.sample(rng);
        if (v >= lo && v <= hi) return v;
    }
    return clamp_to(v, lo, hi);
}

struct RowBounds {
    double lo;
    double hi;
};

} // namespace

GenerationPlan preprocess(const Cdg& cdg, std::uint64_t seed) {
    GenerationPlan plan;
    plan.dag = cdg;
    plan.seed = seed;

    while (true) {
        std::map<std::string, int> in_degree;
        std::vector<std::string> order = kahn_order(plan.dag, in_degree);
        if (order.size() == plan.dag.nodes.size()) {
            plan.order = std::move(order);
            break;
        }
        std::vector<std::string> cycle = find_cycle(plan.dag, in_degree);
        std::vector<Edge> cycle_edges;
        for (std::size_t i = 0; i < cycle.size(); ++i) {
            const std::string& src = cycle[i];
            const std::string& tgt = cycle[(i + 1) % cycle.size()];
            for (const auto& e : plan.dag.edges)
                if (e.src == src && e.tgt == tgt) cycle_edges.push_back(e);
        }
        const Edge* victim = nullptr;
        for (const auto& e : cycle_edges) {
            if (!plan.dag.node(e.tgt).gen_node) continue;
            if (!victim || e.inf_error > victim->inf_error ||
                (e.inf_error == victim->inf_error && e.key() > victim->key()))
                victim = &e;
        }
        if (!victim)
            throw ValidationError(
                "cannot break cycle: no edge targets a generator node (columns: " +
                join_names(cycle) + ")");
        plan.removed_edges.push_back({victim->src, victim->tgt, "cycle"});
        plan.dag.remove_edge(victim->src, victim->tgt);
    }

    for (const auto& [name, node] : plan.dag.nodes) {
        if (node.gen_node) continue;
        if (plan.dag.incoming(name).empty())
            throw ValidationError("column " + name +
                                  " has no distribution fit and no incoming edges; "
                                  "cannot generate it");
    }
    return plan;
}

std::map<std::string, std::int64_t> largest_remainder_counts(const FrequencyTable& freq,
                                                             std::int64_t n) {
    std::int64_t total = freq.total();
    if (total <= 0) throw ValidationError("frequency table is empty");

    std::map<std::string, std::int64_t> out;
    std::vector<std::pair<std::int64_t, std::string>> remainders; // (-rem, value)
    std::int64_t assigned = 0;
    for (const auto& [value, count] : freq.counts) {
        std::int64_t scaled = n * count;
        std::int64_t base = scaled / total;
        out[value] = base;
        assigned += base;
        remainders.emplace_back(-(scaled % total), value);
    }
    std::sort(remainders.begin(), remainders.end());
    std::int64_t leftover = n - assigned;
    for (std::size_t i = 0; leftover > 0; i = (i + 1) % remainders.size(), --leftover)
        ++out[remainders[i].second];
    return out;
}

namespace {

// Lay out the exact counts in value order, then shuffle.
std::vector<std::string> enumerate_and_shuffle(const FrequencyTable& freq, std::size_t n,
                                               Rng& rng) {
    auto counts = largest_remainder_counts(freq, static_cast<std::int64_t>(n));
    std::vector<std::string> values;
    values.reserve(n);
    for (const auto& [value, count] : counts)
        for (std::int64_t i = 0; i < count; ++i) values.push_back(value);
    rng.shuffle(values);
    return values;
}

} // namespace

std::vector<std::string> gen_marginal_categorical(const CdgNode& node, std::size_t n,
                                                  Rng& rng) {
    return enumerate_and_shuffle(node.constraint.frequency, n, rng);
}

std::vector<double> gen_marginal_numeric(const CdgNode& node, std::size_t n, Rng& rng) {
    const NumericConstraint& nc = node.constraint.numeric;
    std::vector<double> out;
    out.reserve(n);
    if (nc.fit) {
        for (std::size_t i = 0; i < n; ++i)
            out.push_back(sample_within(nc.fit->distribution, nc.min, nc.max, rng));
    } else {
        // Pinned leaf without a usable fit: fall back to uniform in range.
        for (std::size_t i = 0; i < n; ++i) out.push_back(rng.uniform(nc.min, nc.max));
    }
    return out;
}

namespace {

class Synthesizer {
public:
    Synthesizer(const GenerationPlan& plan, std::size_t n, SynthesisErrorLedger& ledger)
        : plan_(plan), dag_(plan.dag), n_(n), ledger_(ledger), rng_(plan.seed) {}

    Dataset run() {
        if (n_ == 0) throw ValidationError("row count must be positive");
        for (const auto& name : plan_.order) generate_column(name);

        Dataset out;
        for (const auto& name : dag_.column_order) {
            if (!dag_.has_node(name)) continue; // column dropped by a constraint edit
            const CdgNode& node = dag_.node(name);
            Column col;
            col.name = name;
            col.kind = node.constraint.kind;
            if (col.kind == ColumnKind::Categorical)
                col.cat = std::move(cat_values_.at(name));
            else
                col.num = std::move(num_values_.at(name));
            out.add_column(std::move(col));
        }
        return out;
    }

private:
    const GenerationPlan& plan_;
    const Cdg& dag_;
    std::size_t n_;
    SynthesisErrorLedger& ledger_;
    Rng rng_;
    std::map<std::string, std::vector<std::string>> cat_values_;
    std::map<std::string, std::vector<double>> num_values_;

    void generate_column(const std::string& name) {
        const CdgNode& node = dag_.node(name);
        std::vector<Edge> in = dag_.incoming(name);
        for (const auto& e : in)
            ledger_.edge_error[e.key()] = e.inf_error + ledger_.node_error.at(e.src);

        if (in.empty()) {
            ledger_.chosen_edge[name] = std::nullopt;
            ledger_.node_error[name] = node.inf_error;
            if (node.constraint.kind == ColumnKind::Categorical)
                cat_values_[name] = gen_marginal_categorical(node, n_, rng_);
            else
                num_values_[name] = gen_marginal_numeric(node, n_, rng_);
        } else if (node.constraint.kind == ColumnKind::Categorical) {
            generate_categorical_conditional(name, node, in);
        } else if (node.gen_node) {
            generate_numeric_multi_edge(name, node, in);
        } else {
            generate_numeric_min_error(name, node, in);
        }

        if (auto it = plan_.scaling.find(name); it != plan_.scaling.end())
            num_values_[name] = apply_scaling(num_values_[name], it->second);
    }

    // Group rows by the joint source combination and enumerate the target
    // counts exactly within each group; combinations absent from the table
    // fall back to the column's marginal frequencies.
    void generate_categorical_conditional(const std::string& name, const CdgNode& node,
                                          const std::vector<Edge>& in) {
        std::vector<std::string> sources;
        for (const auto& e : in) sources.push_back(e.src);
        std::sort(sources.begin(), sources.end());

        auto it = dag_.cat_cat.find(name);
        if (it == dag_.cat_cat.end())
            throw ValidationError("no conditional table for column " + name);
        CatCatAssociation table = it->second.sources == sources
                                      ? it->second
                                      : marginalize_cat_cat(it->second, sources);

        std::vector<const std::vector<std::string>*> source_cols;
        for (const auto& s : sources) source_cols.push_back(&cat_values_.at(s));

        std::map<std::vector<std::string>, std::vector<std::size_t>> groups;
        for (std::size_t r = 0; r < n_; ++r) {
            std::vector<std::string> key;
            key.reserve(source_cols.size());
            for (const auto* sc : source_cols) key.push_back((*sc)[r]);
            groups[key].push_back(r);
        }

        std::vector<std::string> column(n_);
        for (const auto& [key, rows] : groups) {
            auto entry = table.table.find(key);
            const FrequencyTable& freq =
                entry != table.table.end() ? entry->second : node.constraint.frequency;
            std::vector<std::string> values = enumerate_and_shuffle(freq, rows.size(), rng_);
            for (std::size_t i = 0; i < rows.size(); ++i) column[rows[i]] = values[i];
        }
        cat_values_[name] = std::move(column);

        const Edge* chosen = min_error_edge(in);
        ledger_.chosen_edge[name] = chosen->key();
        ledger_.node_error[name] = ledger_.edge_error.at(chosen->key());
    }

    const Edge* min_error_edge(const std::vector<Edge>& in) const {
        const Edge* best = nullptr;
        for (const auto& e : in) {
            double err = ledger_.edge_error.at(e.key());
            if (!best || err < ledger_.edge_error.at(best->key())) best = &e;
        }
        return best;
    }

    const CatNumAssociation* association(const Edge& e) const {
        auto it = dag_.cat_num.find(e.key());
        return it == dag_.cat_num.end() ? nullptr : &it->second;
    }

    // One conditional draw for a row: the per-value fit when there is one,
    // uniform in the per-value range otherwise, and the node's own marginal
    // when the source value has no entry at all.
    double conditional_draw(const CdgNode& node, const CatNumAssociation& assoc,
                            const std::string& source_value, double lo, double hi) {
        auto it = assoc.per_value.find(source_value);
        if (it == assoc.per_value.end()) return marginal_draw(node, lo, hi);
        const PerValueNumeric& pv = it->second;
        double plo = std::max(pv.min, lo);
        double phi = std::min(pv.max, hi);
        if (plo > phi) {
            // Empty intersection with the imposed bounds: honor the chosen
            // edge's own interval.
            plo = pv.min;
            phi = pv.max;
        }
        if (pv.fit) return sample_within(pv.fit->distribution, plo, phi, rng_);
        return rng_.uniform(plo, phi);
    }

    double marginal_draw(const CdgNode& node, double lo, double hi) {
        const NumericConstraint& nc = node.constraint.numeric;
        double plo = std::max(nc.min, lo);
        double phi = std::min(nc.max, hi);
        if (plo > phi) {
            plo = nc.min;
            phi = nc.max;
        }
        if (nc.fit) return sample_within(nc.fit->distribution, plo, phi, rng_);
        return rng_.uniform(plo, phi);
    }

    // Numeric generator node: score each incoming edge by the KL divergence
    // of its conditional trial column against a fresh sample of the node's
    // own marginal, then regenerate from the winner while honoring every
    // other edge's per-value range.
    void generate_numeric_multi_edge(const std::string& name, const CdgNode& node,
                                     const std::vector<Edge>& in) {
        std::vector<const Edge*> usable;
        for (const auto& e : in)
            if (association(e)) usable.push_back(&e);
        if (usable.empty())
            throw ValidationError("no usable per-value constraints to generate column " +
                                  name);

        const NumericConstraint& nc = node.constraint.numeric;
        std::vector<double> marginal = gen_marginal_numeric(node, n_, rng_);

        const Edge* chosen = nullptr;
        for (const Edge* e : usable) {
            const CatNumAssociation& assoc = *association(*e);
            const std::vector<std::string>& src_col = cat_values_.at(e->src);
            std::vector<double> trial(n_);
            for (std::size_t r = 0; r < n_; ++r)
                trial[r] = conditional_draw(node, assoc, src_col[r], nc.min, nc.max);
            double kl = kl_divergence(trial, marginal);
            ledger_.kl_error[e->key()] = kl;
            if (!chosen || kl < ledger_.kl_error.at(chosen->key())) chosen = e;
        }

        const CatNumAssociation& assoc = *association(*chosen);
        const std::vector<std::string>& src_col = cat_values_.at(chosen->src);
        std::vector<double> column(n_);
        for (std::size_t r = 0; r < n_; ++r) {
            RowBounds b = other_edge_bounds(usable, chosen, r, nc);
            column[r] = conditional_draw(node, assoc, src_col[r], b.lo, b.hi);
        }
        num_values_[name] = std::move(column);

        ledger_.chosen_edge[name] = chosen->key();
        ledger_.node_error[name] = ledger_.edge_error.at(chosen->key()) +
                                   ledger_.kl_error.at(chosen->key()) * node.inf_error;
    }

    RowBounds other_edge_bounds(const std::vector<const Edge*>& usable, const Edge* chosen,
                                std::size_t row, const NumericConstraint& nc) const {
        RowBounds b{nc.min, nc.max};
        for (const Edge* e : usable) {
            if (e == chosen) continue;
            const CatNumAssociation& assoc = *association(*e);
            const std::string& v = cat_values_.at(e->src)[row];
            auto it = assoc.per_value.find(v);
            if (it == assoc.per_value.end()) continue;
            b.lo = std::max(b.lo, it->second.min);
            b.hi = std::min(b.hi, it->second.max);
        }
        return b;
    }

    // Numeric column without its own fit: generate purely from the incoming
    // edge whose accumulated error is smallest.
    void generate_numeric_min_error(const std::string& name, const CdgNode& node,
                                    const std::vector<Edge>& in) {
        const Edge* chosen = min_error_edge(in);
        const CatNumAssociation* assoc = association(*chosen);
        if (!assoc)
            throw ValidationError("no per-value constraints for edge " + chosen->src +
                                  " -> " + name);
        const NumericConstraint& nc = node.constraint.numeric;
        const std::vector<std::string>& src_col = cat_values_.at(chosen->src);
        std::vector<double> column(n_);
        for (std::size_t r = 0; r < n_; ++r)
            column[r] = conditional_draw(node, *assoc, src_col[r], nc.min, nc.max);
        num_values_[name] = std::move(column);

        ledger_.chosen_edge[name] = chosen->key();
        ledger_.node_error[name] = ledger_.edge_error.at(chosen->key());
    }
};

} // namespace

Dataset synthesize(const GenerationPlan& plan, std::size_t n, SynthesisErrorLedger& ledger) {
    return Synthesizer(plan, n, ledger).run();
}

Dataset synthesize(const GenerationPlan& plan, std::size_t n) {
    SynthesisErrorLedger ledger;
    return synthesize(plan, n, ledger);
}

std::string ledger_to_json_text(const SynthesisErrorLedger& ledger) {
    json j;
    j["schema"] = "synthwright-ledger/v1";
    json node_error = json::object();
    for (const auto& [name, err] : ledger.node_error) node_error[name] = err;
    j["node_error"] = std::move(node_error);

    json edge_error = json::array();
    for (const auto& [key, err] : ledger.edge_error)
        edge_error.push_back(json{{"src", key.first}, {"tgt", key.second}, {"error", err}});
    j["edge_error"] = std::move(edge_error);

    json chosen = json::object();
    for (const auto& [name, edge] : ledger.chosen_edge) {
        if (edge)
            chosen[name] = json{{"src", edge->first}, {"tgt", edge->second}};
        else
            chosen[name] = nullptr;
    }
    j["chosen_edge"] = std::move(chosen);

    json kl = json::array();
    for (const auto& [key, v] : ledger.kl_error)
        kl.push_back(json{{"src", key.first}, {"tgt", key.second}, {"kl", v}});
    j["kl_error"] = std::move(kl);
    return j.dump(2) + "\n";
}

void save_ledger(const SynthesisErrorLedger& ledger, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << ledger_to_json_text(ledger);
    if (!out) throw IoError("write failed: " + path);
}

} // namespace synthwright
