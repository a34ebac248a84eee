#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

// End-to-end gates, one per shipped guarantee. Each case prints exactly one
// [PASS]/[FAIL] line; tolerances are pinned in the checks themselves.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "synthwright/assess.hpp"
#include "synthwright/constraints.hpp"
#include "synthwright/dataset.hpp"
#include "synthwright/demo.hpp"
#include "synthwright/errors.hpp"
#include "synthwright/model.hpp"
#include "synthwright/proptest.hpp"
#include "synthwright/stats.hpp"
#include "synthwright/synthesis.hpp"
#include "synthwright/toy.hpp"
#include "synthwright/udc.hpp"

using namespace synthwright;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Gate {
    bool ok = true;
    std::vector<std::string> failures;

    void expect(bool condition, const std::string& what) {
        if (!condition) {
            ok = false;
            failures.push_back(what);
        }
    }
};

void conclude(int number, const char* what, const Gate& gate) {
    std::printf("[%s] criterion %d: %s\n", gate.ok ? "PASS" : "FAIL", number, what);
    for (const auto& f : gate.failures) std::printf("        failed: %s\n", f.c_str());
    std::fflush(stdout);
    CHECK_MESSAGE(gate.ok, "criterion " << number);
}

FrequencyTable table(std::initializer_list<std::pair<const char*, std::int64_t>> items) {
    FrequencyTable t;
    for (const auto& [k, v] : items) t.add(k, v);
    return t;
}

CdgNode cat_node(const std::string& name, FrequencyTable freq) {
    CdgNode n;
    n.constraint.column = name;
    n.constraint.kind = ColumnKind::Categorical;
    n.constraint.frequency = std::move(freq);
    n.gen_node = true;
    return n;
}

CdgNode fitted_num_node(const std::string& name, ContinuousDistribution dist, double lo,
                        double hi) {
    CdgNode n;
    n.constraint.column = name;
    n.constraint.kind = ColumnKind::Numeric;
    n.constraint.numeric.min = lo;
    n.constraint.numeric.max = hi;
    FitResult fit;
    fit.distribution = std::move(dist);
    fit.ks_p_value = 1.0;
    fit.accepted = true;
    n.constraint.numeric.fit = std::move(fit);
    n.gen_node = true;
    n.inf_error = 0.0;
    return n;
}

// gender in {M, F} plus an independent uniform score column.
Cdg gender_score_cdg() {
    Cdg cdg;
    cdg.column_order = {"gender", "w"};
    cdg.nodes["gender"] = cat_node("gender", table({{"M", 1}, {"F", 1}}));
    cdg.nodes["w"] = fitted_num_node("w", make_uniform(0.0, 1.0), 0.0, 1.0);
    return cdg;
}

FairnessSpec gender_spec() {
    FairnessSpec spec;
    spec.protected_attribute = "gender";
    spec.privileged = {"M"};
    spec.unprivileged = {"F"};
    spec.favorable_label = "yes";
    return spec;
}

// gender == M ? (w < m_rate ? yes : no) : (w < f_rate ? yes : no)
DecisionTreeModel rate_split_tree(double m_rate, double f_rate) {
    std::vector<DecisionTreeModel::Node> nodes(7);
    nodes[0].leaf = false;
    nodes[0].column = "gender";
    nodes[0].kind = ColumnKind::Categorical;
    nodes[0].value = "M";
    nodes[0].left = 1;
    nodes[0].right = 2;
    for (int side = 0; side < 2; ++side) {
        int at = 1 + side;
        nodes[at].leaf = false;
        nodes[at].column = "w";
        nodes[at].kind = ColumnKind::Numeric;
        nodes[at].threshold = side == 0 ? m_rate : f_rate;
        nodes[at].left = 3 + 2 * side;
        nodes[at].right = 4 + 2 * side;
        nodes[3 + 2 * side].label = "yes";
        nodes[4 + 2 * side].label = "no";
    }
    return DecisionTreeModel::from_parts(
        nodes, {{"gender", ColumnKind::Categorical}, {"w", ColumnKind::Numeric}}, "loan");
}

DecisionTreeModel numeric_threshold_tree(const std::string& column, double threshold,
                                         const std::string& below, const std::string& above) {
    std::vector<DecisionTreeModel::Node> nodes(3);
    nodes[0].leaf = false;
    nodes[0].column = column;
    nodes[0].kind = ColumnKind::Numeric;
    nodes[0].threshold = threshold;
    nodes[0].left = 1;
    nodes[0].right = 2;
    nodes[1].label = below;
    nodes[2].label = above;
    return DecisionTreeModel::from_parts(nodes, {{column, ColumnKind::Numeric}}, "label");
}

DecisionTreeModel protected_split_tree() {
    std::vector<DecisionTreeModel::Node> nodes(3);
    nodes[0].leaf = false;
    nodes[0].column = "gender";
    nodes[0].kind = ColumnKind::Categorical;
    nodes[0].value = "M";
    nodes[0].left = 1;
    nodes[0].right = 2;
    nodes[1].label = "yes";
    nodes[2].label = "no";
    return DecisionTreeModel::from_parts(
        nodes, {{"gender", ColumnKind::Categorical}, {"w", ColumnKind::Numeric}}, "loan");
}

class ConstantModel : public Classifier {
public:
    std::vector<std::string> predict(const Dataset& rows) const override {
        return std::vector<std::string>(rows.row_count(), "same");
    }
};

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return "<missing: " + path.string() + ">";
    return std::string((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
}

} // namespace

TEST_CASE("acceptance 1: range conformance") {
    Gate gate;
    const auto start = Clock::now();

    const Dataset real = make_toy_dataset(1000, 42).drop_column("loan");
    const Cdg cdg = build_cdg(real);
    const GenerationPlan plan = preprocess(cdg, 42);
    const Dataset synth = synthesize(plan, 1000);
    const std::int64_t anomalies = association_range_anomaly(real, synth, cdg);
    const double elapsed = seconds_since(start);

    gate.expect(synth.row_count() == 1000, "synthesized row count");
    gate.expect(anomalies == 0, "anomaly count " + std::to_string(anomalies));
    gate.expect(elapsed < 5.0, "runtime " + std::to_string(elapsed) + " s");
    conclude(1, "synthesized rows violate no learned numeric range (1000 rows, < 5 s)",
             gate);
}

TEST_CASE("acceptance 2: marginal fidelity") {
    Gate gate;

    // Exact enumeration of a 2:1 categorical marginal at n = 9.
    Cdg cat;
    cat.column_order = {"g"};
    cat.nodes["g"] = cat_node("g", table({{"M", 2}, {"F", 1}}));
    const Dataset nine = synthesize(preprocess(cat, 42), 9);
    std::map<std::string, int> counts;
    for (const auto& v : nine.column("g").cat) ++counts[v];
    gate.expect(counts["M"] == 6 && counts["F"] == 3,
                "2:1 marginal at n=9 gave " + std::to_string(counts["M"]) + ":" +
                    std::to_string(counts["F"]));

    // Fitted numeric marginals keep passing their own goodness-of-fit test.
    Cdg num;
    num.column_order = {"v"};
    num.nodes["v"] = fitted_num_node("v", make_normal(10.0, 2.0), -6.0, 26.0);
    int passing = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const Dataset out = synthesize(preprocess(num, seed), 5000);
        const KsResult ks =
            ks_test(out.column("v").num, num.nodes["v"].constraint.numeric.fit->distribution);
        if (ks.p_value > 0.05) ++passing;
    }
    gate.expect(passing >= 18, "only " + std::to_string(passing) +
                                   "/20 seeds passed KS against the generating fit");
    conclude(2, "marginals reproduce exactly (categorical) and statistically (numeric)",
             gate);
}

TEST_CASE("acceptance 3: conditional fidelity") {
    Gate gate;

    const Dataset source = make_toy_dataset(50000, 42).drop_column("loan");
    const Cdg cdg = build_cdg(source);
    const Dataset synth = synthesize(preprocess(cdg, 42), 6000);

    const auto& gender = synth.column("gender").cat;
    const auto& age = synth.column("age-grp").cat;
    const auto& education = synth.column("education").cat;
    std::map<std::string, double> dist;
    std::int64_t group = 0;
    for (std::size_t r = 0; r < synth.row_count(); ++r) {
        if (gender[r] != "F" || age[r] != "senior") continue;
        ++group;
        dist[education[r]] += 1.0;
    }
    gate.expect(group > 300, "female-senior group has only " + std::to_string(group));
    const std::map<std::string, double> expected{
        {"primary", 1.0 / 6.0}, {"secondary", 2.0 / 6.0}, {"tertiary", 3.0 / 6.0}};
    for (const auto& [value, share] : expected) {
        const double got = dist[value] / static_cast<double>(group);
        gate.expect(std::abs(got - share) <= 0.02,
                    value + " share off by " + std::to_string(std::abs(got - share)));
    }
    conclude(3, "a 1:2:3 conditional shard is recovered within 2% per cell at n=6000",
             gate);
}

TEST_CASE("acceptance 4: error ledger composition") {
    Gate gate;

    const Dataset real = make_toy_dataset(1000, 42).drop_column("loan");
    const Cdg cdg = build_cdg(real);
    const GenerationPlan plan = preprocess(cdg, 42);
    SynthesisErrorLedger ledger;
    synthesize(plan, 1000, ledger);

    // Recompute every error from the graph's inference errors and the
    // ledger's measured divergences, walking the generation order.
    std::map<std::string, double> node_err;
    std::map<EdgeKey, double> edge_err;
    std::map<std::string, std::optional<EdgeKey>> chosen;
    bool oracle_ok = true;
    for (const std::string& name : plan.order) {
        const CdgNode& node = plan.dag.node(name);
        const std::vector<Edge> in = plan.dag.incoming(name);
        for (const Edge& e : in) edge_err[e.key()] = e.inf_error + node_err.at(e.src);
        if (in.empty()) {
            node_err[name] = node.inf_error;
            chosen[name] = std::nullopt;
            continue;
        }
        const Edge* best = nullptr;
        if (node.constraint.kind == ColumnKind::Numeric && node.gen_node) {
            for (const Edge& e : in) {
                if (!ledger.kl_error.count(e.key())) continue;
                if (!best || ledger.kl_error.at(e.key()) < ledger.kl_error.at(best->key()))
                    best = &e;
            }
            if (!best) {
                oracle_ok = false;
                break;
            }
            node_err[name] =
                edge_err.at(best->key()) + ledger.kl_error.at(best->key()) * node.inf_error;
        } else {
            for (const Edge& e : in)
                if (!best || edge_err.at(e.key()) < edge_err.at(best->key())) best = &e;
            node_err[name] = edge_err.at(best->key());
        }
        chosen[name] = best->key();
    }
    gate.expect(oracle_ok, "oracle could not follow the plan");

    gate.expect(node_err.size() == ledger.node_error.size(), "node error count");
    for (const auto& [name, err] : node_err) {
        const auto it = ledger.node_error.find(name);
        gate.expect(it != ledger.node_error.end() && std::abs(it->second - err) <= 1e-9,
                    "node error mismatch at " + name);
    }
    gate.expect(edge_err.size() == ledger.edge_error.size(), "edge error count");
    for (const auto& [key, err] : edge_err) {
        const auto it = ledger.edge_error.find(key);
        gate.expect(it != ledger.edge_error.end() && std::abs(it->second - err) <= 1e-9,
                    "edge error mismatch at " + key.first + " -> " + key.second);
    }
    for (const auto& [name, key] : chosen)
        gate.expect(ledger.chosen_edge.count(name) && ledger.chosen_edge.at(name) == key,
                    "chosen edge mismatch at " + name);
    gate.expect(!ledger.kl_error.empty(), "no divergence was measured for any numeric node");
    conclude(4, "ledger errors equal an independent recomputation to 1e-9", gate);
}

TEST_CASE("acceptance 5: cycle breaking") {
    Gate gate;

    Cdg cdg;
    cdg.column_order = {"a", "b", "c"};
    for (const char* n : {"a", "b", "c"})
        cdg.nodes[n] = cat_node(n, table({{"x", 1}, {"y", 1}}));
    auto add_edge = [&](const char* src, const char* tgt, double inf) {
        Edge e;
        e.src = src;
        e.tgt = tgt;
        e.type = EdgeType::CatCat;
        e.u_value = 1.0 - inf;
        e.inf_error = inf;
        cdg.edges.push_back(e);
        CatCatAssociation assoc;
        assoc.sources = {src};
        assoc.target = tgt;
        assoc.table[{"x"}] = table({{"x", 1}});
        assoc.table[{"y"}] = table({{"y", 1}});
        cdg.cat_cat[tgt] = assoc;
    };
    add_edge("a", "b", 0.1);
    add_edge("b", "c", 0.2);
    add_edge("c", "a", 0.3);
    cdg.sort_edges();

    const GenerationPlan plan = preprocess(cdg, 1);
    gate.expect(plan.removed_edges.size() == 1, "exactly one edge removed");
    if (plan.removed_edges.size() == 1) {
        gate.expect(plan.removed_edges[0].src == "c" && plan.removed_edges[0].tgt == "a",
                    "removed " + plan.removed_edges[0].src + " -> " +
                        plan.removed_edges[0].tgt + " instead of the worst edge");
    }
    std::map<std::string, std::size_t> pos;
    for (std::size_t i = 0; i < plan.order.size(); ++i) pos[plan.order[i]] = i;
    gate.expect(plan.order.size() == 3, "plan covers all columns");
    for (const Edge& e : plan.dag.edges)
        gate.expect(pos.at(e.src) < pos.at(e.tgt),
                    "order puts " + e.tgt + " before its source " + e.src);
    conclude(5, "the worst edge of a 3-cycle is removed, leaving a topological order",
             gate);
}

TEST_CASE("acceptance 6: range rescaling") {
    Gate gate;

    ScalingDirective d;
    d.min_data = 2000.0;
    d.max_data = 30000.0;
    d.min_user = 5000.0;
    d.max_user = 50000.0;
    const std::vector<double> values{2000.0, 9000.0, 16000.0, 23000.0, 30000.0};
    const std::vector<double> scaled = apply_scaling(values, d);

    gate.expect(std::abs(scaled.front() - 5000.0) <= 1e-9, "lower endpoint");
    gate.expect(std::abs(scaled.back() - 50000.0) <= 1e-9, "upper endpoint");

    auto mean = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x;
        return s / static_cast<double>(v.size());
    };
    const double mapped_mean =
        d.min_user + (mean(values) - d.min_data) * (d.max_user - d.min_user) /
                         (d.max_data - d.min_data);
    gate.expect(std::abs(mean(scaled) - mapped_mean) <= 1e-9, "affine mean law");
    conclude(6, "rescaling maps endpoints and means exactly (2k-30k onto 5k-50k)", gate);
}

TEST_CASE("acceptance 7: group fairness detection") {
    Gate gate;

    const Cdg cdg = gender_score_cdg();
    const DecisionTreeModel biased = rate_split_tree(0.9, 0.4);
    const PropertyReport flagged =
        group_fairness_test(cdg, {}, biased, gender_spec(), 10000, 42);
    gate.expect(std::abs(flagged.metric_value - 4.0 / 9.0) <= 0.05,
                "biased ratio " + std::to_string(flagged.metric_value));
    gate.expect(flagged.flagged, "biased model was not flagged");

    const DecisionTreeModel even = rate_split_tree(0.6, 0.6);
    const PropertyReport clean =
        group_fairness_test(cdg, {}, even, gender_spec(), 10000, 42);
    gate.expect(clean.metric_value >= 0.9 && clean.metric_value <= 1.1,
                "unbiased ratio " + std::to_string(clean.metric_value));
    conclude(7, "a 0.9/0.4 favorable-rate gap lands near 0.444 and is flagged below 0.8",
             gate);
}

TEST_CASE("acceptance 8: individual fairness detection") {
    Gate gate;

    const Cdg cdg = gender_score_cdg();
    const PropertyReport caught =
        individual_fairness_test(cdg, {}, protected_split_tree(), gender_spec(), 200, 7);
    gate.expect(caught.metric_value > 0.0, "keyed model scored zero");
    gate.expect(caught.failing > 0, "keyed model had no failing samples");
    std::size_t protected_at = caught.columns.size();
    for (std::size_t c = 0; c < caught.columns.size(); ++c)
        if (caught.columns[c] == "gender") protected_at = c;
    gate.expect(protected_at < caught.columns.size(), "protected column missing");
    gate.expect(!caught.witnesses.empty(), "no witnesses recorded");
    for (const Witness& w : caught.witnesses) {
        bool only_protected = w.sample.size() == w.variant.size();
        for (std::size_t c = 0; only_protected && c < w.sample.size(); ++c) {
            if (c == protected_at)
                only_protected = w.sample[c] != w.variant[c];
            else
                only_protected = w.sample[c] == w.variant[c];
        }
        if (!only_protected) {
            gate.expect(false, "a failing pair differs outside the protected column");
            break;
        }
    }

    const DecisionTreeModel blind = numeric_threshold_tree("w", 0.6, "yes", "no");
    const PropertyReport clean =
        individual_fairness_test(cdg, {}, blind, gender_spec(), 200, 7);
    gate.expect(clean.metric_value == 0.0 && clean.failing == 0,
                "blind model scored " + std::to_string(clean.metric_value));
    conclude(8, "counterfactual twins expose protected-column splits and nothing else",
             gate);
}

TEST_CASE("acceptance 9: robustness detection") {
    Gate gate;

    Cdg cdg;
    cdg.column_order = {"x"};
    cdg.nodes["x"] = fitted_num_node("x", make_uniform(0.0, 100.0), 0.0, 100.0);

    const DecisionTreeModel tree = numeric_threshold_tree("x", 50.0, "lo", "hi");
    const std::size_t n = 200;
    const PropertyReport r = robustness_test(cdg, {}, tree, n, 11);

    gate.expect(r.metric_value >= 0.0 && r.metric_value <= 1.0, "score outside [0,1]");
    gate.expect(r.total_failure_count >= r.failing, "neighbor count below sample count");

    // Trace each sample by hand: the step is max(1, 1% of range) = 1, and a
    // sample fails exactly when the nudge crosses the model's threshold.
    const Dataset synth = synthesize(preprocess(cdg, 11), n);
    std::multiset<std::string> expected;
    std::size_t x_at = 0;
    for (std::size_t c = 0; c < synth.column_count(); ++c)
        if (synth.columns()[c].name == "x") x_at = c;
    for (std::size_t row = 0; row < n; ++row) {
        const double v = synth.column("x").num[row];
        const bool base = v < 50.0;
        bool fails = false;
        for (double candidate : {std::max(0.0, v - 1.0), std::min(100.0, v + 1.0)})
            if (candidate != v && (candidate < 50.0) != base) fails = true;
        if (fails) expected.insert(synth.cell_text(row, x_at));
    }
    gate.expect(!expected.empty(), "fixture produced no boundary samples");
    gate.expect(r.failing == static_cast<std::int64_t>(expected.size()),
                "failing " + std::to_string(r.failing) + " vs traced " +
                    std::to_string(expected.size()));
    std::multiset<std::string> witnessed;
    for (const Witness& w : r.witnesses) witnessed.insert(w.sample[x_at]);
    gate.expect(witnessed == expected, "failing samples differ from the traced set");

    const ConstantModel constant;
    const PropertyReport still = robustness_test(cdg, {}, constant, n, 11);
    gate.expect(still.total_failure_count == 0 && still.failing == 0 &&
                    still.metric_value == 0.0,
                "constant model was not perfectly stable");
    conclude(9, "perturbation failures are exactly the threshold-crossing samples", gate);
}

TEST_CASE("acceptance 10: accuracy transfer") {
    Gate gate;
    const auto start = Clock::now();

    Dataset real;
    Column x;
    x.name = "x";
    x.kind = ColumnKind::Numeric;
    Column label;
    label.name = "label";
    label.kind = ColumnKind::Categorical;
    for (int i = 0; i < 1000; ++i) {
        const double v = (i + 0.5) / 100.0; // even grid over (0, 10)
        x.num.push_back(v);
        label.cat.push_back(v < 5.0 ? "lo" : "hi");
    }
    real.add_column(std::move(x));
    real.add_column(std::move(label));

    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto [direct, transferred] = accuracy_transfer(real, "label", 0.7, seed);
        gate.expect(std::abs(direct - transferred) <= 0.05,
                    "seed " + std::to_string(seed) + " gap " +
                        std::to_string(std::abs(direct - transferred)));
    }
    const double elapsed = seconds_since(start);
    gate.expect(elapsed < 30.0, "runtime " + std::to_string(elapsed) + " s");
    conclude(10, "a model relearned from synthetic data scores within 5% (5 seeds, < 30 s)",
             gate);
}

TEST_CASE("acceptance 11: numeric kernels") {
    Gate gate;

    // Tail-probability series against high-precision reference values.
    struct Ref {
        std::size_t n;
        double d;
        double p;
    };
    const Ref refs[] = {
        {5, 0.3, 0.67507815371659552},     {10, 0.2, 0.77095294467658693},
        {20, 0.15, 0.72366542454367844},   {30, 0.1, 0.91055368802996017},
        {50, 0.08, 0.89375155241057314},   {100, 0.06, 0.85370713521650188},
        {200, 0.05, 0.68866738727690668},  {500, 0.03, 0.75304729615225896},
        {1000, 0.02, 0.81494803353316037}, {5000, 0.012, 0.46533926619601063},
    };
    for (const Ref& ref : refs)
        gate.expect(std::abs(kolmogorov_p_value(ref.n, ref.d) - ref.p) <= 1e-6,
                    "series value off at n=" + std::to_string(ref.n));

    const std::vector<std::string> left{"a", "a", "b", "b"};
    const std::vector<std::string> right{"x", "y", "x", "y"};
    gate.expect(theils_u(left, left) == 1.0, "uncertainty coefficient of a copy");
    gate.expect(theils_u(left, right) == 0.0 && theils_u(right, left) == 0.0,
                "uncertainty coefficient of an independent pair");

    std::vector<double> p, q;
    for (int i = 0; i < 100; ++i) {
        p.push_back(i);
        q.push_back(i + 10.0);
    }
    const double pq = js_divergence(p, q);
    gate.expect(pq == js_divergence(q, p), "divergence is not symmetric");
    gate.expect(pq >= 0.0 && pq <= 1.0, "divergence out of bounds");
    gate.expect(js_divergence(p, p) == 0.0, "nonzero divergence on identity");
    gate.expect(js_divergence(table({{"a", 3}}), table({{"b", 3}})) == doctest::Approx(1.0),
                "disjoint supports should score 1");
    conclude(11, "statistical kernels match precomputed references and identities", gate);
}

TEST_CASE("acceptance 12: determinism") {
    Gate gate;
    namespace fs = std::filesystem;

    const fs::path a = "/tmp/synthwright_acceptance_demo_a";
    const fs::path b = "/tmp/synthwright_acceptance_demo_b";
    fs::remove_all(a);
    fs::remove_all(b);

    std::ostringstream out_a, out_b;
    run_demo(a.string(), 42, 1000, out_a);
    run_demo(b.string(), 42, 1000, out_b);
    gate.expect(out_a.str() == out_b.str(), "console output differs between runs");

    const char* artifacts[] = {"toy.csv",           "constraints.json",
                               "synth.csv",          "ledger.json",
                               "model.json",         "report_group.json",
                               "report_individual.json", "report_robustness.json",
                               "assess.json"};
    for (const char* name : artifacts) {
        const std::string left = slurp(a / name);
        const std::string right = slurp(b / name);
        gate.expect(left.rfind("<missing", 0) != 0, std::string(name) + " was not written");
        gate.expect(left == right, std::string(name) + " differs between runs");
    }
    fs::remove_all(a);
    fs::remove_all(b);
    conclude(12, "same-seed pipeline runs produce byte-identical artifacts", gate);
}

TEST_CASE("acceptance 13: synthesis throughput") {
    Gate gate;

    const Dataset real = make_toy_dataset(1000, 42).drop_column("loan");
    const Cdg cdg = build_cdg(real);
    const GenerationPlan plan = preprocess(cdg, 42);

    const auto start = Clock::now();
    const Dataset synth = synthesize(plan, 10000);
    const double elapsed = seconds_since(start);

    gate.expect(synth.row_count() == 10000, "row count");
    gate.expect(synth.column_count() == 6, "column count");
    gate.expect(elapsed < 30.0, "synthesis took " + std::to_string(elapsed) + " s");
    conclude(13, "10,000 rows of the 6-column fixture synthesize in under 30 s", gate);
}
