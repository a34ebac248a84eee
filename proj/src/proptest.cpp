#include "synthwright/proptest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>

#include <json.hpp>

#include "synthwright/errors.hpp"
#include "synthwright/synthesis.hpp"

namespace synthwright {

using nlohmann::json;

namespace {

constexpr double kDiThreshold = 0.8;
constexpr std::size_t kWitnessCap = 100;

std::vector<std::string> row_cells(const Dataset& ds, std::size_t row) {
    std::vector<std::string> cells;
    cells.reserve(ds.column_count());
    for (std::size_t c = 0; c < ds.column_count(); ++c) cells.push_back(ds.cell_text(row, c));
    return cells;
}

void validate_spec(const Cdg& cdg, const FairnessSpec& spec) {
    if (!cdg.has_node(spec.protected_attribute))
        throw ValidationError("protected attribute not in constraints: " +
                              spec.protected_attribute);
    const CdgNode& node = cdg.node(spec.protected_attribute);
    if (node.constraint.kind != ColumnKind::Categorical)
        throw ValidationError("protected attribute must be categorical: " +
                              spec.protected_attribute);
    if (spec.privileged.empty() || spec.unprivileged.empty())
        throw ValidationError("privileged and unprivileged value sets must be nonempty");
    std::set<std::string> priv(spec.privileged.begin(), spec.privileged.end());
    for (const auto& v : spec.unprivileged)
        if (priv.count(v))
            throw ValidationError("value in both privileged and unprivileged sets: " + v);
    for (const auto& v : spec.privileged)
        if (!node.constraint.frequency.counts.count(v))
            throw ValidationError("privileged value not observed in " +
                                  spec.protected_attribute + ": " + v);
    for (const auto& v : spec.unprivileged)
        if (!node.constraint.frequency.counts.count(v))
            throw ValidationError("unprivileged value not observed in " +
                                  spec.protected_attribute + ": " + v);
}

// Shared front half of every property test: drop the label column, apply
// user edits, optionally cut the protected attribute loose from its parents.
MergedCdg prepare(const Cdg& cdg, const std::vector<Udc>& udcs,
                  const std::string* independent_column) {
    Cdg working = cdg;
    if (working.label_column && working.has_node(*working.label_column))
        drop_column(working, *working.label_column);
    MergedCdg merged = merge(working, udcs);
    if (independent_column) {
        auto& edges = merged.cdg.edges;
        edges.erase(std::remove_if(edges.begin(), edges.end(),
                                   [&](const Edge& e) { return e.tgt == *independent_column; }),
                    edges.end());
    }
    return merged;
}

Dataset synth_population(const MergedCdg& merged, std::size_t n, std::uint64_t seed) {
    GenerationPlan plan = preprocess(merged.cdg, seed);
    plan.scaling = merged.scaling;
    return synthesize(plan, n);
}

} // namespace

double disparate_impact(const Classifier& model, const Dataset& data,
                        const FairnessSpec& spec) {
    const Column& prot = data.column(spec.protected_attribute);
    if (prot.kind != ColumnKind::Categorical)
        throw ValidationError("protected attribute must be categorical: " +
                              spec.protected_attribute);
    std::vector<std::string> predictions = model.predict(data);

    std::set<std::string> priv(spec.privileged.begin(), spec.privileged.end());
    std::set<std::string> unpriv(spec.unprivileged.begin(), spec.unprivileged.end());
    std::int64_t priv_total = 0, priv_fav = 0, unpriv_total = 0, unpriv_fav = 0;
    for (std::size_t r = 0; r < data.row_count(); ++r) {
        bool favorable = predictions[r] == spec.favorable_label;
        if (priv.count(prot.cat[r])) {
            ++priv_total;
            if (favorable) ++priv_fav;
        } else if (unpriv.count(prot.cat[r])) {
            ++unpriv_total;
            if (favorable) ++unpriv_fav;
        }
    }
    if (priv_total == 0) throw ValidationError("no rows in the privileged group");
    if (unpriv_total == 0) throw ValidationError("no rows in the unprivileged group");
    if (priv_fav == 0) return std::numeric_limits<double>::infinity();
    double priv_rate = static_cast<double>(priv_fav) / static_cast<double>(priv_total);
    double unpriv_rate = static_cast<double>(unpriv_fav) / static_cast<double>(unpriv_total);
    return unpriv_rate / priv_rate;
}

PropertyReport group_fairness_test(const Cdg& cdg, const std::vector<Udc>& udcs,
                                   const Classifier& model, const FairnessSpec& spec,
                                   std::size_t n, std::uint64_t seed) {
    MergedCdg merged = prepare(cdg, udcs, &spec.protected_attribute);
    validate_spec(merged.cdg, spec);
    Dataset synth = synth_population(merged, n, seed);

    PropertyReport report;
    report.property = PropertyKind::GroupFairness;
    report.generated = static_cast<std::int64_t>(n);
    report.metric_value = disparate_impact(model, synth, spec);
    report.flagged = report.metric_value < kDiThreshold;
    for (const auto& col : synth.columns()) report.columns.push_back(col.name);
    return report;
}

PropertyReport individual_fairness_test(const Cdg& cdg, const std::vector<Udc>& udcs,
                                        const Classifier& model, const FairnessSpec& spec,
                                        std::size_t n, std::uint64_t seed) {
    MergedCdg merged = prepare(cdg, udcs, nullptr);
    validate_spec(merged.cdg, spec);
    Dataset synth = synth_population(merged, n, seed);

    std::size_t prot_index = synth.column_count();
    for (std::size_t c = 0; c < synth.column_count(); ++c)
        if (synth.columns()[c].name == spec.protected_attribute) prot_index = c;
    if (prot_index == synth.column_count())
        throw ValidationError("protected attribute missing from synthesized data");

    const std::size_t pairs = spec.privileged.size() * spec.unprivileged.size();

    // Twin rows, two per (sample, privileged value, unprivileged value),
    // predicted in one batch.
    Dataset twins;
    for (std::size_t c = 0; c < synth.column_count(); ++c) {
        const Column& src = synth.columns()[c];
        Column col;
        col.name = src.name;
        col.kind = src.kind;
        for (std::size_t r = 0; r < n; ++r) {
            for (const auto& p : spec.privileged) {
                for (const auto& u : spec.unprivileged) {
                    if (src.kind == ColumnKind::Numeric) {
                        col.num.push_back(src.num[r]);
                        col.num.push_back(src.num[r]);
                    } else if (c == prot_index) {
                        col.cat.push_back(p);
                        col.cat.push_back(u);
                    } else {
                        col.cat.push_back(src.cat[r]);
                        col.cat.push_back(src.cat[r]);
                    }
                }
            }
        }
        twins.add_column(std::move(col));
    }

    std::vector<std::string> predictions = model.predict(twins);

    PropertyReport report;
    report.property = PropertyKind::IndividualFairness;
    report.generated = static_cast<std::int64_t>(n);
    for (const auto& col : synth.columns()) report.columns.push_back(col.name);

    for (std::size_t r = 0; r < n; ++r) {
        bool failed = false;
        for (std::size_t pair = 0; pair < pairs && !failed; ++pair) {
            std::size_t base = (r * pairs + pair) * 2;
            if (predictions[base] == predictions[base + 1]) continue;
            failed = true;
            if (report.witnesses.size() < kWitnessCap) {
                Witness w;
                w.sample = row_cells(twins, base);
                w.variant = row_cells(twins, base + 1);
                w.sample_prediction = predictions[base];
                w.variant_prediction = predictions[base + 1];
                report.witnesses.push_back(std::move(w));
            }
        }
        if (failed) ++report.failing;
    }
    report.metric_value = static_cast<double>(report.failing) / static_cast<double>(n);
    report.flagged = report.failing > 0;
    return report;
}

PropertyReport robustness_test(const Cdg& cdg, const std::vector<Udc>& udcs,
                               const Classifier& model, std::size_t n, std::uint64_t seed) {
    MergedCdg merged = prepare(cdg, udcs, nullptr);
    GenerationPlan plan = preprocess(merged.cdg, seed);
    plan.scaling = merged.scaling;
    Dataset synth = synthesize(plan, n);

    // Perturbation ranges follow what generation actually produced: the
    // rescaled interval when a scaling directive is in force, the column
    // constraint otherwise.
    struct NumericRange {
        double lo, hi, delta;
    };
    std::vector<NumericRange> ranges(synth.column_count());
    for (std::size_t c = 0; c < synth.column_count(); ++c) {
        const Column& col = synth.columns()[c];
        if (col.kind != ColumnKind::Numeric) continue;
        const NumericConstraint& nc = plan.dag.node(col.name).constraint.numeric;
        double lo = nc.min, hi = nc.max;
        if (auto it = plan.scaling.find(col.name); it != plan.scaling.end()) {
            lo = std::min(it->second.min_user, it->second.max_user);
            hi = std::max(it->second.min_user, it->second.max_user);
        }
        double range = hi - lo;
        double delta = std::max(1.0, 0.01 * range);
        ranges[c] = {lo, hi, delta};
    }

    // All neighbors of all samples, predicted together with the samples in
    // one batch. Neighbor rows remember which sample they perturb.
    Dataset batch = synth;
    std::vector<std::size_t> neighbor_of;
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < synth.column_count(); ++c) {
            const Column& col = synth.columns()[c];
            if (col.kind == ColumnKind::Categorical) {
                const auto& freq = plan.dag.node(col.name).constraint.frequency;
                for (const auto& [value, count] : freq.counts) {
                    if (value == col.cat[r]) continue;
                    batch.append_row_from(synth, r);
                    batch.set_cat(batch.row_count() - 1, c, value);
                    neighbor_of.push_back(r);
                }
            } else {
                double v = col.num[r];
                for (double candidate :
                     {std::max(ranges[c].lo, v - ranges[c].delta),
                      std::min(ranges[c].hi, v + ranges[c].delta)}) {
                    if (candidate == v) continue;
                    batch.append_row_from(synth, r);
                    batch.set_num(batch.row_count() - 1, c, candidate);
                    neighbor_of.push_back(r);
                }
            }
        }
    }

    std::vector<std::string> predictions = model.predict(batch);

    PropertyReport report;
    report.property = PropertyKind::Robustness;
    report.generated = static_cast<std::int64_t>(n);
    for (const auto& col : synth.columns()) report.columns.push_back(col.name);

    std::vector<bool> sample_failed(n, false);
    for (std::size_t i = 0; i < neighbor_of.size(); ++i) {
        std::size_t sample = neighbor_of[i];
        std::size_t row = n + i;
        if (predictions[row] == predictions[sample]) continue;
        ++report.total_failure_count;
        if (!sample_failed[sample] && report.witnesses.size() < kWitnessCap) {
            Witness w;
            w.sample = row_cells(batch, sample);
            w.variant = row_cells(batch, row);
            w.sample_prediction = predictions[sample];
            w.variant_prediction = predictions[row];
            report.witnesses.push_back(std::move(w));
        }
        sample_failed[sample] = true;
    }
    report.failing = std::count(sample_failed.begin(), sample_failed.end(), true);
    report.metric_value = static_cast<double>(report.failing) / static_cast<double>(n);
    report.flagged = report.failing > 0;
    return report;
}

std::string report_to_json_text(const PropertyReport& report) {
    json j;
    j["schema"] = "synthwright-report/v1";
    switch (report.property) {
    case PropertyKind::GroupFairness:
        j["property"] = "group_fairness";
        j["metric"] = "disparate_impact";
        break;
    case PropertyKind::IndividualFairness:
        j["property"] = "individual_fairness";
        j["metric"] = "success_score";
        break;
    case PropertyKind::Robustness:
        j["property"] = "robustness";
        j["metric"] = "robustness_score";
        break;
    }
    if (std::isinf(report.metric_value)) {
        j["metric_value"] = -1; // no favorable outcomes in the privileged group
        j["infinite"] = true;
    } else {
        j["metric_value"] = report.metric_value;
    }
    j["flagged"] = report.flagged;
    j["generated"] = report.generated;
    j["failing"] = report.failing;
    if (report.property == PropertyKind::Robustness)
        j["total_failure_count"] = report.total_failure_count;
    j["columns"] = report.columns;
    json witnesses = json::array();
    for (const auto& w : report.witnesses)
        witnesses.push_back(json{{"sample", w.sample},
                                 {"variant", w.variant},
                                 {"sample_prediction", w.sample_prediction},
                                 {"variant_prediction", w.variant_prediction}});
    j["witnesses"] = std::move(witnesses);
    return j.dump(2) + "\n";
}

void save_report(const PropertyReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << report_to_json_text(report);
    if (!out) throw IoError("write failed: " + path);
}

} // namespace synthwright
