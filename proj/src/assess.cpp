#include "synthwright/assess.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "synthwright/errors.hpp"
#include "synthwright/model.hpp"
#include "synthwright/rng.hpp"
#include "synthwright/stats.hpp"
#include "synthwright/synthesis.hpp"

namespace synthwright {

using nlohmann::json;

namespace {

void require_same_schema(const Dataset& a, const Dataset& b) {
    bool same = a.column_count() == b.column_count();
    for (std::size_t c = 0; same && c < a.column_count(); ++c)
        same = a.columns()[c].name == b.columns()[c].name &&
               a.columns()[c].kind == b.columns()[c].kind;
    if (!same) throw ValidationError("datasets have different schemas");
}

// Grow `small` to `target` rows: whole copies, then a seeded random sample
// of the remainder.
Dataset equalize(const Dataset& small, std::size_t target, std::uint64_t seed) {
    std::size_t m = small.row_count();
    std::vector<std::size_t> idx;
    idx.reserve(target);
    for (std::size_t c = 0; c < target / m; ++c)
        for (std::size_t r = 0; r < m; ++r) idx.push_back(r);
    std::size_t remainder = target - idx.size();
    if (remainder > 0) {
        std::vector<std::size_t> pool(m);
        std::iota(pool.begin(), pool.end(), std::size_t{0});
        Rng rng(seed);
        rng.shuffle(pool);
        idx.insert(idx.end(), pool.begin(),
                   pool.begin() + static_cast<std::ptrdiff_t>(remainder));
    }
    return small.select_rows(idx);
}

struct ColumnStats {
    double mean = 0.0;
    double sd = 0.0;
};

// Mixed-type squared distance on pre-encoded rows: z-score gaps for numeric
// cells, +1 per categorical mismatch.
struct EncodedTable {
    std::vector<std::vector<double>> num;       // per numeric column
    std::vector<const std::vector<std::string>*> cat;

    static EncodedTable build(const Dataset& ds, const std::vector<ColumnStats>& stats) {
        EncodedTable t;
        std::size_t stat_index = 0;
        for (const auto& col : ds.columns()) {
            if (col.kind == ColumnKind::Numeric) {
                const ColumnStats& s = stats[stat_index++];
                std::vector<double> z;
                z.reserve(col.num.size());
                for (double v : col.num) z.push_back(s.sd == 0.0 ? 0.0 : (v - s.mean) / s.sd);
                t.num.push_back(std::move(z));
            } else {
                t.cat.push_back(&col.cat);
            }
        }
        return t;
    }
};

double squared_distance(const EncodedTable& a, std::size_t ra, const EncodedTable& b,
                        std::size_t rb) {
    double d = 0.0;
    for (std::size_t c = 0; c < a.num.size(); ++c) {
        double gap = a.num[c][ra] - b.num[c][rb];
        d += gap * gap;
    }
    for (std::size_t c = 0; c < a.cat.size(); ++c)
        if ((*a.cat[c])[ra] != (*b.cat[c])[rb]) d += 1.0;
    return d;
}

double kth_smallest(std::vector<double>& values, std::size_t k) {
    auto nth = values.begin() + static_cast<std::ptrdiff_t>(k - 1);
    std::nth_element(values.begin(), nth, values.end());
    return *nth;
}

double percentile_interpolated(std::vector<double> values, double q) {
    std::sort(values.begin(), values.end());
    if (values.size() == 1) return values[0];
    double pos = q * static_cast<double>(values.size() - 1);
    std::size_t lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= values.size()) return values.back();
    double frac = pos - static_cast<double>(lo);
    return values[lo] * (1.0 - frac) + values[lo + 1] * frac;
}

} // namespace

std::int64_t association_range_anomaly(const Dataset& real, const Dataset& synth,
                                       const Cdg& cdg) {
    require_same_schema(real, synth);

    struct NumericCheck {
        const std::vector<double>* values;
        double min, max;
    };
    std::vector<NumericCheck> globals;
    for (const auto& [name, node] : cdg.nodes) {
        if (node.constraint.kind != ColumnKind::Numeric) continue;
        if (!synth.has_column(name))
            throw ValidationError("constraints reference missing column: " + name);
        globals.push_back({&synth.column(name).num, node.constraint.numeric.min,
                           node.constraint.numeric.max});
    }

    struct PerValueCheck {
        const std::vector<std::string>* source;
        const std::vector<double>* target;
        const std::map<std::string, PerValueNumeric>* per_value;
    };
    std::vector<PerValueCheck> locals;
    for (const auto& e : cdg.edges) {
        if (e.type != EdgeType::CatNum) continue;
        auto it = cdg.cat_num.find(e.key());
        if (it == cdg.cat_num.end()) continue;
        if (!synth.has_column(e.src) || !synth.has_column(e.tgt))
            throw ValidationError("constraints reference missing column: " + e.src + "/" +
                                  e.tgt);
        locals.push_back(
            {&synth.column(e.src).cat, &synth.column(e.tgt).num, &it->second.per_value});
    }

    std::int64_t anomalies = 0;
    for (std::size_t r = 0; r < synth.row_count(); ++r) {
        bool bad = false;
        for (const auto& g : globals) {
            double v = (*g.values)[r];
            if (v < g.min || v > g.max) {
                bad = true;
                break;
            }
        }
        for (std::size_t i = 0; !bad && i < locals.size(); ++i) {
            auto pv = locals[i].per_value->find((*locals[i].source)[r]);
            if (pv == locals[i].per_value->end()) continue;
            double v = (*locals[i].target)[r];
            if (v < pv->second.min || v > pv->second.max) bad = true;
        }
        if (bad) ++anomalies;
    }
    return anomalies;
}

std::int64_t density_anomaly(const Dataset& real, const Dataset& synth, std::size_t k) {
    require_same_schema(real, synth);
    if (k == 0) throw ValidationError("neighbor count must be positive");
    if (k >= real.row_count())
        throw ValidationError("neighbor count must be below the real row count");

    std::vector<ColumnStats> stats;
    for (const auto& col : real.columns()) {
        if (col.kind != ColumnKind::Numeric) continue;
        double mean = std::accumulate(col.num.begin(), col.num.end(), 0.0) /
                      static_cast<double>(col.num.size());
        double ss = 0.0;
        for (double v : col.num) ss += (v - mean) * (v - mean);
        stats.push_back({mean, std::sqrt(ss / static_cast<double>(col.num.size()))});
    }

    EncodedTable real_enc = EncodedTable::build(real, stats);
    EncodedTable synth_enc = EncodedTable::build(synth, stats);
    std::size_t nr = real.row_count();

    std::vector<double> real_scores;
    real_scores.reserve(nr);
    for (std::size_t i = 0; i < nr; ++i) {
        std::vector<double> dists;
        dists.reserve(nr - 1);
        for (std::size_t j = 0; j < nr; ++j)
            if (j != i) dists.push_back(squared_distance(real_enc, i, real_enc, j));
        real_scores.push_back(std::sqrt(kth_smallest(dists, k)));
    }
    double threshold = percentile_interpolated(std::move(real_scores), 0.95);

    std::int64_t anomalies = 0;
    for (std::size_t i = 0; i < synth.row_count(); ++i) {
        std::vector<double> dists;
        dists.reserve(nr);
        for (std::size_t j = 0; j < nr; ++j)
            dists.push_back(squared_distance(synth_enc, i, real_enc, j));
        if (std::sqrt(kth_smallest(dists, k)) > threshold) ++anomalies;
    }
    return anomalies;
}

std::pair<double, double> js_report(const Dataset& real, const Dataset& synth,
                                    const Cdg& cdg, std::uint64_t seed) {
    require_same_schema(real, synth);

    const Dataset* a = &real;
    const Dataset* b = &synth;
    Dataset grown;
    if (real.row_count() < synth.row_count()) {
        grown = equalize(real, synth.row_count(), seed);
        a = &grown;
    } else if (synth.row_count() < real.row_count()) {
        grown = equalize(synth, real.row_count(), seed);
        b = &grown;
    }

    double js_sum = 0.0;
    for (std::size_t c = 0; c < a->column_count(); ++c) {
        const Column& ca = a->columns()[c];
        const Column& cb = b->columns()[c];
        if (ca.kind == ColumnKind::Categorical)
            js_sum += js_divergence(FrequencyTable::from_column(ca.cat),
                                    FrequencyTable::from_column(cb.cat));
        else
            js_sum += js_divergence(ca.num, cb.num);
    }
    double js = js_sum / static_cast<double>(a->column_count());

    // Numeric target slices per source value of each cat_num association;
    // a slice participates only when both sides have rows for that value.
    double assoc_sum = 0.0;
    std::int64_t assoc_slices = 0;
    for (const auto& e : cdg.edges) {
        if (e.type != EdgeType::CatNum) continue;
        const Column& sa = a->column(e.src);
        const Column& sb = b->column(e.src);
        const Column& ta = a->column(e.tgt);
        const Column& tb = b->column(e.tgt);
        std::set<std::string> values(sa.cat.begin(), sa.cat.end());
        values.insert(sb.cat.begin(), sb.cat.end());
        for (const auto& v : values) {
            std::vector<double> slice_a, slice_b;
            for (std::size_t r = 0; r < sa.cat.size(); ++r)
                if (sa.cat[r] == v) slice_a.push_back(ta.num[r]);
            for (std::size_t r = 0; r < sb.cat.size(); ++r)
                if (sb.cat[r] == v) slice_b.push_back(tb.num[r]);
            if (slice_a.empty() || slice_b.empty()) continue;
            assoc_sum += js_divergence(slice_a, slice_b);
            ++assoc_slices;
        }
    }
    double assoc_js = assoc_slices == 0 ? 0.0 : assoc_sum / static_cast<double>(assoc_slices);
    return {js, assoc_js};
}

std::pair<double, double> accuracy_transfer(const Dataset& real, const std::string& label,
                                            double split_ratio, std::uint64_t seed) {
    std::size_t n = real.row_count();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    rng.shuffle(order);

    auto train_size = static_cast<std::size_t>(std::llround(split_ratio * static_cast<double>(n)));
    if (train_size == 0 || train_size >= n)
        throw ValidationError("split leaves an empty train or test set");

    std::vector<std::size_t> train_idx(order.begin(),
                                       order.begin() + static_cast<std::ptrdiff_t>(train_size));
    std::vector<std::size_t> test_idx(order.begin() + static_cast<std::ptrdiff_t>(train_size),
                                      order.end());
    Dataset train = real.select_rows(train_idx);
    Dataset test = real.select_rows(test_idx);

    DecisionTreeModel m1 = DecisionTreeModel::train(train, label);

    Cdg cdg = build_cdg(train.drop_column(label));
    GenerationPlan plan = preprocess(cdg, seed);
    Dataset synth = synthesize(plan, train.row_count());

    Column labels;
    labels.name = label;
    labels.kind = ColumnKind::Categorical;
    labels.cat = m1.predict(synth);
    synth.add_column(std::move(labels));

    DecisionTreeModel m2 = DecisionTreeModel::train(synth, label);
    return {accuracy(m1, test, label), accuracy(m2, test, label)};
}

RealisticityReport assess_realisticity(const Dataset& real, const Dataset& synth,
                                       const Cdg& cdg, std::size_t k, std::uint64_t seed) {
    RealisticityReport report;
    report.sample_size = static_cast<std::int64_t>(synth.row_count());
    report.association_range_anomalies = association_range_anomaly(real, synth, cdg);
    report.density_anomalies = density_anomaly(real, synth, k);
    auto [js, assoc_js] = js_report(real, synth, cdg, seed);
    report.js_divergence = js;
    report.association_js_divergence = assoc_js;
    return report;
}

std::string realisticity_to_json_text(const RealisticityReport& report) {
    json j;
    j["schema"] = "synthwright-assess/v1";
    j["association_range_anomalies"] = report.association_range_anomalies;
    j["density_anomalies"] = report.density_anomalies;
    j["js_divergence"] = report.js_divergence;
    j["association_js_divergence"] = report.association_js_divergence;
    j["sample_size"] = report.sample_size;
    return j.dump(2) + "\n";
}

void save_realisticity(const RealisticityReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << realisticity_to_json_text(report);
    if (!out) throw IoError("write failed: " + path);
}

} // namespace synthwright
