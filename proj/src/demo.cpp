#include "synthwright/demo.hpp"

#include <filesystem>
#include <iomanip>

#include "synthwright/assess.hpp"
#include "synthwright/constraints.hpp"
#include "synthwright/errors.hpp"
#include "synthwright/model.hpp"
#include "synthwright/proptest.hpp"
#include "synthwright/synthesis.hpp"
#include "synthwright/toy.hpp"

namespace synthwright {

namespace {

std::string edge_label(const Edge& e) {
    return e.src + " -> " + e.tgt + (e.type == EdgeType::CatCat ? " (cat_cat" : " (cat_num");
}

void print_cdg(const Cdg& cdg, std::ostream& out) {
    out << "Columns and constraints:\n";
    for (const auto& name : cdg.column_order) {
        const CdgNode& node = cdg.node(name);
        out << "  " << name << ": " << kind_name(node.constraint.kind);
        if (node.constraint.kind == ColumnKind::Categorical) {
            out << ", " << node.constraint.frequency.counts.size() << " values";
        } else {
            const auto& nc = node.constraint.numeric;
            out << ", range [" << nc.min << ", " << nc.max << "]";
            if (nc.fit)
                out << ", fit " << nc.fit->distribution.describe() << " (ks_p "
                    << nc.fit->ks_p_value << ")";
            else
                out << ", no accepted fit";
        }
        out << (node.gen_node ? ", generator" : ", dependent")
            << ", inf_error " << node.inf_error << "\n";
    }
    out << "Association edges:\n";
    if (cdg.edges.empty()) out << "  (none)\n";
    for (const auto& e : cdg.edges) {
        out << "  " << edge_label(e);
        if (e.type == EdgeType::CatCat) out << ", u " << e.u_value;
        out << ", inf_error " << e.inf_error << ")\n";
    }
}

void print_report(const PropertyReport& r, std::ostream& out) {
    const char* name = r.property == PropertyKind::GroupFairness      ? "group fairness"
                       : r.property == PropertyKind::IndividualFairness ? "individual fairness"
                                                                        : "robustness";
    const char* metric = r.property == PropertyKind::GroupFairness      ? "disparate impact"
                         : r.property == PropertyKind::IndividualFairness ? "success score"
                                                                          : "robustness score";
    out << "  " << name << ": " << metric << " = " << r.metric_value
        << (r.flagged ? " (flagged)" : "") << ", " << r.failing << "/" << r.generated
        << " failing";
    if (r.property == PropertyKind::Robustness)
        out << ", " << r.total_failure_count << " failing neighbors";
    out << "\n";
}

} // namespace

void run_demo(const std::string& out_dir, std::uint64_t seed, std::size_t rows,
              std::ostream& out) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + out_dir + ": " + ec.message());
    auto path = [&](const char* name) { return (fs::path(out_dir) / name).string(); };

    out << std::setprecision(4);
    out << "== Toy data ==\n";
    Dataset toy = make_toy_dataset(rows, seed);
    write_csv(toy, path("toy.csv"));
    out << "Generated " << toy.row_count() << " rows x " << toy.column_count()
        << " columns (label: loan) -> toy.csv\n\n";

    out << "== Constraint inference ==\n";
    Dataset features = toy.drop_column("loan");
    Cdg cdg = build_cdg(features);
    cdg.dataset_name = "toy";
    cdg.label_column = "loan";
    save_constraints(cdg, path("constraints.json"));
    print_cdg(cdg, out);
    out << "Saved -> constraints.json\n\n";

    out << "== Generation plan ==\n";
    GenerationPlan plan = preprocess(cdg, seed);
    if (plan.removed_edges.empty()) {
        out << "Removed edges: (none, graph was already acyclic)\n";
    } else {
        out << "Removed edges:\n";
        for (const auto& r : plan.removed_edges)
            out << "  " << r.src << " -> " << r.tgt << " (" << r.reason << ")\n";
    }
    out << "Processing order:";
    for (const auto& name : plan.order) out << " " << name;
    out << "\n\n";

    out << "== Synthesis ==\n";
    SynthesisErrorLedger ledger;
    Dataset synth = synthesize(plan, rows, ledger);
    write_csv(synth, path("synth.csv"));
    save_ledger(ledger, path("ledger.json"));
    out << "Synthesized " << synth.row_count() << " rows -> synth.csv (ledger.json)\n";
    out << "Column errors:\n";
    for (const auto& [name, err] : ledger.node_error) {
        out << "  " << name << ": " << err;
        const auto& chosen = ledger.chosen_edge.at(name);
        if (chosen) out << " (via " << chosen->first << " -> " << chosen->second << ")";
        out << "\n";
    }
    out << "\n";

    out << "== Model under test ==\n";
    DecisionTreeModel model = DecisionTreeModel::train(toy, "loan");
    model.save(path("model.json"));
    out << "Trained decision tree on toy data, training accuracy "
        << accuracy(model, toy, "loan") << " -> model.json\n\n";

    out << "== Property tests ==\n";
    FairnessSpec spec;
    spec.protected_attribute = "gender";
    spec.privileged = {"M"};
    spec.unprivileged = {"F"};
    spec.favorable_label = "yes";
    PropertyReport group = group_fairness_test(cdg, {}, model, spec, 500, seed);
    save_report(group, path("report_group.json"));
    print_report(group, out);
    PropertyReport individual = individual_fairness_test(cdg, {}, model, spec, 500, seed);
    save_report(individual, path("report_individual.json"));
    print_report(individual, out);
    PropertyReport robustness = robustness_test(cdg, {}, model, 200, seed);
    save_report(robustness, path("report_robustness.json"));
    print_report(robustness, out);
    out << "Saved -> report_group.json, report_individual.json, report_robustness.json\n\n";

    out << "== Realisticity ==\n";
    RealisticityReport quality = assess_realisticity(features, synth, cdg, 5, seed);
    save_realisticity(quality, path("assess.json"));
    out << "  association-range anomalies: " << quality.association_range_anomalies << "\n";
    out << "  density anomalies: " << quality.density_anomalies << "\n";
    out << "  mean column JS divergence: " << quality.js_divergence << "\n";
    out << "  mean association JS divergence: " << quality.association_js_divergence << "\n";
    out << "Saved -> assess.json\n";
}

} // namespace synthwright
