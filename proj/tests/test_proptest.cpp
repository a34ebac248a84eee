#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "synthwright/constraints.hpp"
#include "synthwright/dataset.hpp"
#include "synthwright/errors.hpp"
#include "synthwright/model.hpp"
#include "synthwright/proptest.hpp"
#include "synthwright/synthesis.hpp"

using namespace synthwright;

namespace {

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

FitResult uniform_fit(double lo, double hi, double ks_p = 1.0) {
    FitResult f;
    f.distribution = make_uniform(lo, hi);
    f.ks_p_value = ks_p;
    f.accepted = true;
    return f;
}

CdgNode num_node(const std::string& name, double lo, double hi) {
    CdgNode n;
    n.constraint.column = name;
    n.constraint.kind = ColumnKind::Numeric;
    n.constraint.numeric.min = lo;
    n.constraint.numeric.max = hi;
    n.constraint.numeric.fit = uniform_fit(lo, hi);
    n.gen_node = true;
    n.inf_error = 0.0;
    return n;
}

// One categorical protected column with an even two-value marginal.
Cdg protected_only_cdg() {
    Cdg cdg;
    cdg.column_order = {"g"};
    cdg.nodes["g"] = cat_node("g", table({{"P", 1}, {"U", 1}}));
    return cdg;
}

FairnessSpec pu_spec() {
    FairnessSpec spec;
    spec.protected_attribute = "g";
    spec.privileged = {"P"};
    spec.unprivileged = {"U"};
    spec.favorable_label = "yes";
    return spec;
}

// Labels the first `quota[value]` rows of each protected-column group
// favorably; everything after the quota gets the unfavorable label.
class QuotaModel : public Classifier {
public:
    QuotaModel(std::string column, std::map<std::string, std::int64_t> quota)
        : column_(std::move(column)), quota_(std::move(quota)) {}

    std::vector<std::string> predict(const Dataset& rows) const override {
        const Column& col = rows.column(column_);
        std::map<std::string, std::int64_t> seen;
        std::vector<std::string> out;
        out.reserve(rows.row_count());
        for (const auto& v : col.cat) {
            auto it = quota_.find(v);
            std::int64_t quota = it == quota_.end() ? 0 : it->second;
            out.push_back(seen[v]++ < quota ? "yes" : "no");
        }
        return out;
    }

private:
    std::string column_;
    std::map<std::string, std::int64_t> quota_;
};

class ConstantModel : public Classifier {
public:
    explicit ConstantModel(std::string label) : label_(std::move(label)) {}
    std::vector<std::string> predict(const Dataset& rows) const override {
        return std::vector<std::string>(rows.row_count(), label_);
    }

private:
    std::string label_;
};

// Returns a constant label but keeps a copy of the last batch it saw.
class CapturingModel : public Classifier {
public:
    std::vector<std::string> predict(const Dataset& rows) const override {
        seen = rows;
        return std::vector<std::string>(rows.row_count(), "same");
    }
    mutable Dataset seen;
};

DecisionTreeModel split_on(const std::string& column, const std::string& match,
                           const std::string& yes, const std::string& no) {
    std::vector<DecisionTreeModel::Node> nodes(3);
    nodes[0].leaf = false;
    nodes[0].column = column;
    nodes[0].kind = ColumnKind::Categorical;
    nodes[0].value = match;
    nodes[0].left = 1;
    nodes[0].right = 2;
    nodes[1].label = yes;
    nodes[2].label = no;
    return DecisionTreeModel::from_parts(nodes, {{column, ColumnKind::Categorical}},
                                         "outcome");
}

DecisionTreeModel threshold_on(const std::string& column, double threshold,
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
    return DecisionTreeModel::from_parts(nodes, {{column, ColumnKind::Numeric}},
                                         "outcome");
}

} // namespace

TEST_CASE("disparate impact is the ratio of favorable rates") {
    // 2 of 4 privileged and 2 of 5 unprivileged rows get the favorable label.
    const Dataset ds = parse_csv_text(
        "g,grant\nP,yes\nP,yes\nP,no\nP,no\nU,yes\nU,yes\nU,no\nU,no\nU,no\n");
    class EchoModel : public Classifier {
    public:
        std::vector<std::string> predict(const Dataset& rows) const override {
            return rows.column("grant").cat;
        }
    } echo;

    CHECK(disparate_impact(echo, ds, pu_spec()) == doctest::Approx(0.8).epsilon(1e-15));

    // No favorable privileged outcome: the ratio blows up.
    const Dataset skew = parse_csv_text("g,grant\nP,no\nU,yes\n");
    CHECK(std::isinf(disparate_impact(echo, skew, pu_spec())));

    // A group with no rows at all is an input error.
    const Dataset lonely = parse_csv_text("g,grant\nP,yes\nP,no\n");
    CHECK_THROWS_AS(disparate_impact(echo, lonely, pu_spec()), ValidationError);
}

TEST_CASE("group fairness is flagged strictly below the 0.8 threshold") {
    const Cdg cdg = protected_only_cdg();

    // n=20 over an even two-value table lands exactly 10 rows per group.
    const QuotaModel at_threshold("g", {{"P", 5}, {"U", 4}});
    PropertyReport r = group_fairness_test(cdg, {}, at_threshold, pu_spec(), 20, 7);
    CHECK(r.metric_value == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(!r.flagged);
    CHECK(r.generated == 20);
    CHECK(r.columns == std::vector<std::string>{"g"});

    const QuotaModel below("g", {{"P", 5}, {"U", 3}});
    PropertyReport bad = group_fairness_test(cdg, {}, below, pu_spec(), 20, 7);
    CHECK(bad.metric_value == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(bad.flagged);

    // An infinite ratio is reported but never flagged: only the unprivileged
    // group is being shortchanged by a ratio below 1.
    const QuotaModel starved("g", {{"P", 0}, {"U", 4}});
    PropertyReport inf = group_fairness_test(cdg, {}, starved, pu_spec(), 20, 7);
    CHECK(std::isinf(inf.metric_value));
    CHECK(!inf.flagged);
}

TEST_CASE("group fairness severs the protected attribute from its parents") {
    // c drives g deterministically (a -> P, b -> U) with a lopsided marginal
    // for g. Once the c -> g edge is cut, g must follow its own even marginal.
    Cdg cdg;
    cdg.column_order = {"c", "g", "lbl"};
    cdg.nodes["c"] = cat_node("c", table({{"a", 1}, {"b", 1}}));
    cdg.nodes["g"] = cat_node("g", table({{"P", 1}, {"U", 1}}));
    cdg.nodes["lbl"] = cat_node("lbl", table({{"y", 1}, {"n", 1}}));
    cdg.label_column = "lbl";
    Edge e;
    e.src = "c";
    e.tgt = "g";
    e.type = EdgeType::CatCat;
    e.u_value = 1.0;
    e.inf_error = 0.0;
    cdg.edges.push_back(e);
    CatCatAssociation assoc;
    assoc.sources = {"c"};
    assoc.target = "g";
    assoc.table[{"a"}] = table({{"P", 1}});
    assoc.table[{"b"}] = table({{"U", 1}});
    cdg.cat_cat["g"] = assoc;

    CapturingModel capture;
    PropertyReport r = group_fairness_test(cdg, {}, capture, pu_spec(), 20, 5);

    // The label column never reaches the population.
    CHECK(r.columns == std::vector<std::string>{"c", "g"});
    REQUIRE(capture.seen.row_count() == 20);
    std::map<std::string, int> counts;
    for (const auto& v : capture.seen.column("g").cat) ++counts[v];
    CHECK(counts.at("P") == 10);
    CHECK(counts.at("U") == 10);
}

TEST_CASE("fairness specs are validated against the constraints") {
    const Cdg cdg = protected_only_cdg();
    const ConstantModel yes("yes");

    FairnessSpec ghost = pu_spec();
    ghost.protected_attribute = "ghost";
    CHECK_THROWS_WITH_AS(group_fairness_test(cdg, {}, yes, ghost, 10, 1),
                         "protected attribute not in constraints: ghost",
                         ValidationError);

    Cdg numeric;
    numeric.column_order = {"g"};
    numeric.nodes["g"] = num_node("g", 0.0, 1.0);
    CHECK_THROWS_WITH_AS(group_fairness_test(numeric, {}, yes, pu_spec(), 10, 1),
                         "protected attribute must be categorical: g", ValidationError);

    FairnessSpec empty = pu_spec();
    empty.unprivileged.clear();
    CHECK_THROWS_WITH_AS(group_fairness_test(cdg, {}, yes, empty, 10, 1),
                         "privileged and unprivileged value sets must be nonempty",
                         ValidationError);

    FairnessSpec overlap = pu_spec();
    overlap.unprivileged.push_back("P");
    CHECK_THROWS_WITH_AS(group_fairness_test(cdg, {}, yes, overlap, 10, 1),
                         "value in both privileged and unprivileged sets: P",
                         ValidationError);

    FairnessSpec unseen = pu_spec();
    unseen.privileged = {"Z"};
    CHECK_THROWS_WITH_AS(group_fairness_test(cdg, {}, yes, unseen, 10, 1),
                         "privileged value not observed in g: Z", ValidationError);

    FairnessSpec unseen2 = pu_spec();
    unseen2.unprivileged = {"W"};
    CHECK_THROWS_WITH_AS(group_fairness_test(cdg, {}, yes, unseen2, 10, 1),
                         "unprivileged value not observed in g: W", ValidationError);
}

TEST_CASE("individual fairness catches a model that keys on the protected column") {
    Cdg cdg;
    cdg.column_order = {"g", "x"};
    cdg.nodes["g"] = cat_node("g", table({{"P", 1}, {"U", 1}}));
    cdg.nodes["x"] = num_node("x", 0.0, 1.0);

    const DecisionTreeModel biased = split_on("g", "P", "yes", "no");
    PropertyReport r = individual_fairness_test(cdg, {}, biased, pu_spec(), 10, 3);

    CHECK(r.generated == 10);
    CHECK(r.failing == 10);
    CHECK(r.metric_value == doctest::Approx(1.0));
    CHECK(r.flagged);
    CHECK(r.columns == std::vector<std::string>{"g", "x"});
    REQUIRE(r.witnesses.size() == 10);
    for (const Witness& w : r.witnesses) {
        REQUIRE(w.sample.size() == 2);
        REQUIRE(w.variant.size() == 2);
        // Twins agree everywhere except the protected column.
        CHECK(w.sample[0] == "P");
        CHECK(w.variant[0] == "U");
        CHECK(w.sample[1] == w.variant[1]);
        CHECK(w.sample_prediction == "yes");
        CHECK(w.variant_prediction == "no");
    }
}

TEST_CASE("individual fairness passes a model that ignores the protected column") {
    Cdg cdg;
    cdg.column_order = {"g", "x"};
    cdg.nodes["g"] = cat_node("g", table({{"P", 1}, {"U", 1}}));
    cdg.nodes["x"] = num_node("x", 0.0, 1.0);

    const DecisionTreeModel fair = threshold_on("x", 0.5, "yes", "no");
    PropertyReport r = individual_fairness_test(cdg, {}, fair, pu_spec(), 25, 3);
    CHECK(r.failing == 0);
    CHECK(r.metric_value == doctest::Approx(0.0));
    CHECK(!r.flagged);
    CHECK(r.witnesses.empty());
}

TEST_CASE("robustness reproduces an independent count of boundary flips") {
    Cdg cdg;
    cdg.column_order = {"x"};
    cdg.nodes["x"] = num_node("x", 0.0, 100.0);

    const DecisionTreeModel model = threshold_on("x", 50.0, "lo", "hi");
    const std::size_t n = 200;
    const std::uint64_t seed = 11;
    PropertyReport r = robustness_test(cdg, {}, model, n, seed);

    // Re-derive the expected failures from the same population. The range is
    // 100 wide, so each value is nudged by exactly 1.0 (clamped to [0,100]).
    GenerationPlan plan = preprocess(cdg, seed);
    const Dataset synth = synthesize(plan, n);
    std::int64_t failing = 0, flips = 0;
    for (double v : synth.column("x").num) {
        const bool base = v < 50.0;
        int local = 0;
        for (double candidate : {std::max(0.0, v - 1.0), std::min(100.0, v + 1.0)}) {
            if (candidate == v) continue;
            if ((candidate < 50.0) != base) ++local;
        }
        flips += local;
        if (local > 0) ++failing;
    }
    REQUIRE(failing > 0); // the fixture must actually exercise the boundary
    CHECK(r.failing == failing);
    CHECK(r.total_failure_count == flips);
    CHECK(r.metric_value == doctest::Approx(static_cast<double>(failing) / n));
    CHECK(r.flagged);
    CHECK(r.witnesses.size() == static_cast<std::size_t>(failing));
    for (const Witness& w : r.witnesses) {
        CHECK(w.sample_prediction != w.variant_prediction);
        CHECK(w.sample != w.variant);
    }
}

TEST_CASE("robustness passes a constant model") {
    Cdg cdg;
    cdg.column_order = {"x"};
    cdg.nodes["x"] = num_node("x", 0.0, 100.0);

    const ConstantModel same("same");
    PropertyReport r = robustness_test(cdg, {}, same, 50, 2);
    CHECK(r.failing == 0);
    CHECK(r.total_failure_count == 0);
    CHECK(r.metric_value == doctest::Approx(0.0));
    CHECK(!r.flagged);
    CHECK(r.witnesses.empty());
}

TEST_CASE("robustness perturbs within the user range when one is declared") {
    Cdg cdg;
    cdg.column_order = {"x"};
    cdg.nodes["x"] = num_node("x", 0.0, 1.0);

    // Rescale x onto [0, 1000]: the step becomes 1% of the user range.
    const std::string udc_text = R"({
      "schema": "synthwright-udc/v1",
      "udcs": [{"kind": "modify", "target": {"column": "x"},
                "payload": {"min": 0, "max": 1000}}]
    })";
    const std::vector<Udc> udcs = udcs_from_json_text(udc_text);

    CapturingModel capture;
    const std::size_t n = 30;
    robustness_test(cdg, udcs, capture, n, 9);

    const Dataset& batch = capture.seen;
    REQUIRE(batch.row_count() == 3 * n); // every sample has both neighbors
    const auto& x = batch.column("x").num;
    for (std::size_t i = n; i < batch.row_count(); ++i) {
        // Neighbors of sample rows appear in sample order, two per sample.
        const std::size_t sample = (i - n) / 2;
        const double diff = x[i] - x[sample];
        CHECK(std::abs(diff) <= 10.0 + 1e-9);
        const bool full_step = std::abs(std::abs(diff) - 10.0) < 1e-9;
        const bool clamped = x[i] == 0.0 || x[i] == 1000.0;
        CHECK((full_step || clamped));
    }
}

TEST_CASE("robustness walks every alternate categorical value and caps witnesses") {
    Cdg cdg;
    cdg.column_order = {"g"};
    cdg.nodes["g"] = cat_node("g", table({{"a", 1}, {"b", 1}, {"c", 1}}));

    // Three distinct labels: every alternate value flips the prediction.
    std::vector<DecisionTreeModel::Node> nodes(5);
    nodes[0].leaf = false;
    nodes[0].column = "g";
    nodes[0].kind = ColumnKind::Categorical;
    nodes[0].value = "a";
    nodes[0].left = 1;
    nodes[0].right = 2;
    nodes[1].label = "A";
    nodes[2].leaf = false;
    nodes[2].column = "g";
    nodes[2].kind = ColumnKind::Categorical;
    nodes[2].value = "b";
    nodes[2].left = 3;
    nodes[2].right = 4;
    nodes[3].label = "B";
    nodes[4].label = "C";
    const DecisionTreeModel spiky = DecisionTreeModel::from_parts(
        nodes, {{"g", ColumnKind::Categorical}}, "outcome");

    const std::size_t n = 150;
    PropertyReport r = robustness_test(cdg, {}, spiky, n, 4);
    CHECK(r.failing == static_cast<std::int64_t>(n));
    CHECK(r.total_failure_count == static_cast<std::int64_t>(2 * n));
    CHECK(r.metric_value == doctest::Approx(1.0));
    CHECK(r.witnesses.size() == 100); // capped below the failing count
}

TEST_CASE("reports serialize with per-property metric names") {
    PropertyReport group;
    group.property = PropertyKind::GroupFairness;
    group.metric_value = std::numeric_limits<double>::infinity();
    group.flagged = false;
    group.generated = 20;
    group.columns = {"g"};

    const nlohmann::json g = nlohmann::json::parse(report_to_json_text(group));
    CHECK(g.at("schema") == "synthwright-report/v1");
    CHECK(g.at("property") == "group_fairness");
    CHECK(g.at("metric") == "disparate_impact");
    CHECK(g.at("metric_value") == -1);
    CHECK(g.at("infinite") == true);
    CHECK(g.at("flagged") == false);
    CHECK(g.at("generated") == 20);
    CHECK(!g.contains("total_failure_count"));

    PropertyReport indiv;
    indiv.property = PropertyKind::IndividualFairness;
    indiv.metric_value = 0.25;
    indiv.flagged = true;
    indiv.generated = 8;
    indiv.failing = 2;
    indiv.columns = {"g", "x"};
    Witness w;
    w.sample = {"P", "1"};
    w.variant = {"U", "1"};
    w.sample_prediction = "yes";
    w.variant_prediction = "no";
    indiv.witnesses.push_back(w);

    const nlohmann::json i = nlohmann::json::parse(report_to_json_text(indiv));
    CHECK(i.at("metric") == "success_score");
    CHECK(i.at("metric_value") == doctest::Approx(0.25));
    CHECK(!i.contains("infinite"));
    CHECK(i.at("failing") == 2);
    REQUIRE(i.at("witnesses").size() == 1);
    CHECK(i.at("witnesses")[0].at("sample") == std::vector<std::string>({"P", "1"}));
    CHECK(i.at("witnesses")[0].at("variant_prediction") == "no");

    PropertyReport rob;
    rob.property = PropertyKind::Robustness;
    rob.metric_value = 0.1;
    rob.generated = 10;
    rob.failing = 1;
    rob.total_failure_count = 3;
    const nlohmann::json r = nlohmann::json::parse(report_to_json_text(rob));
    CHECK(r.at("metric") == "robustness_score");
    CHECK(r.at("total_failure_count") == 3);

    const std::string path = "/tmp/synthwright_test_report.json";
    save_report(rob, path);
    std::ifstream in(path);
    REQUIRE(in.good());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(text == report_to_json_text(rob));
    std::remove(path.c_str());
}
