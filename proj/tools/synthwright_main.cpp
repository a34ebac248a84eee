#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "synthwright/assess.hpp"
#include "synthwright/constraints.hpp"
#include "synthwright/dataset.hpp"
#include "synthwright/demo.hpp"
#include "synthwright/errors.hpp"
#include "synthwright/model.hpp"
#include "synthwright/proptest.hpp"
#include "synthwright/synthesis.hpp"
#include "synthwright/udc.hpp"

namespace {

using namespace synthwright;

constexpr std::uint64_t kDefaultSeed = 42;

int g_verbose = 0;

void note(const std::string& msg) {
    if (g_verbose > 0) std::cerr << msg << "\n";
}

struct TypeFlags {
    std::vector<std::string> categorical;
    std::vector<std::string> numeric;
    bool drop_missing = false;

    LoadOptions options() const {
        LoadOptions opt;
        opt.overrides.categorical.insert(categorical.begin(), categorical.end());
        opt.overrides.numeric.insert(numeric.begin(), numeric.end());
        opt.drop_missing_rows = drop_missing;
        return opt;
    }

    void attach(CLI::App* cmd) {
        cmd->add_option("--categorical", categorical,
                        "Force a column to be treated as categorical");
        cmd->add_option("--numeric", numeric, "Force a column to be treated as numeric");
        cmd->add_flag("--drop-missing", drop_missing,
                      "Drop rows with missing cells instead of failing");
    }
};

Dataset load_table(const std::string& path, const LoadOptions& options) {
    if (path != "-") return load_csv(path, options);
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return parse_csv_text(ss.str(), options);
}

void emit_csv(const Dataset& ds, const std::string& path) {
    if (path == "-")
        std::cout << csv_text(ds);
    else
        write_csv(ds, path);
}

// '-' streams the document to standard output, anything else is a file path.
void emit_text(const std::string& text, const std::string& path) {
    if (path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << text;
    if (!out) throw IoError("write failed: " + path);
}

std::string stem_of(const std::string& path) {
    std::size_t slash = path.find_last_of("/\\");
    std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
    std::size_t dot = base.find_last_of('.');
    return dot == std::string::npos ? base : base.substr(0, dot);
}

struct InferArgs {
    std::string input;
    std::string output;
    std::string label;
    TypeFlags types;
};

void run_infer(const InferArgs& args) {
    Dataset ds = load_table(args.input, args.types.options());
    note("loaded " + std::to_string(ds.row_count()) + " rows");
    std::optional<std::string> label;
    if (!args.label.empty()) {
        ds = ds.drop_column(args.label); // errors if absent
        label = args.label;
    }
    Cdg cdg = build_cdg(ds);
    cdg.dataset_name = stem_of(args.input);
    cdg.label_column = label;
    emit_text(constraints_to_json_text(cdg), args.output);
    note("wrote " + args.output + " (" + std::to_string(cdg.edges.size()) + " edges)");
}

struct SynthArgs {
    std::string constraints;
    std::string output;
    std::string udc_path;
    std::string ledger_path;
    std::uint64_t n = 0;
    std::uint64_t seed = kDefaultSeed;
};

void run_synth(const SynthArgs& args) {
    Cdg cdg = load_constraints(args.constraints);
    MergedCdg merged;
    if (!args.udc_path.empty()) {
        merged = merge(cdg, load_udcs(args.udc_path));
    } else {
        merged.cdg = std::move(cdg);
    }
    GenerationPlan plan = preprocess(merged.cdg, args.seed);
    plan.scaling = merged.scaling;
    for (const auto& removed : plan.removed_edges)
        note("removed cyclic edge " + removed.src + " -> " + removed.tgt);
    SynthesisErrorLedger ledger;
    Dataset synth = synthesize(plan, args.n, ledger);
    emit_csv(synth, args.output);
    if (!args.ledger_path.empty()) emit_text(ledger_to_json_text(ledger), args.ledger_path);
}

struct TestArgs {
    std::string constraints;
    std::string model_spec;
    std::string udc_path;
    std::string output;
    std::string protected_attr;
    std::vector<std::string> privileged;
    std::vector<std::string> unprivileged;
    std::string favorable;
    std::uint64_t n = 1000;
    std::uint64_t seed = kDefaultSeed;
    int timeout_ms = 60000;
};

FairnessSpec spec_of(const TestArgs& args) {
    FairnessSpec spec;
    spec.protected_attribute = args.protected_attr;
    spec.privileged = args.privileged;
    spec.unprivileged = args.unprivileged;
    spec.favorable_label = args.favorable;
    return spec;
}

void run_test(const TestArgs& args, PropertyKind kind) {
    Cdg cdg = load_constraints(args.constraints);
    std::vector<Udc> udcs;
    if (!args.udc_path.empty()) udcs = load_udcs(args.udc_path);
    std::unique_ptr<Classifier> model = make_classifier(args.model_spec, args.timeout_ms);

    PropertyReport report;
    switch (kind) {
    case PropertyKind::GroupFairness:
        report = group_fairness_test(cdg, udcs, *model, spec_of(args), args.n, args.seed);
        break;
    case PropertyKind::IndividualFairness:
        report = individual_fairness_test(cdg, udcs, *model, spec_of(args), args.n, args.seed);
        break;
    case PropertyKind::Robustness:
        report = robustness_test(cdg, udcs, *model, args.n, args.seed);
        break;
    }
    emit_text(report_to_json_text(report), args.output.empty() ? "-" : args.output);
}

struct AssessArgs {
    std::string real_path;
    std::string synth_path;
    std::string constraints;
    std::string output;
    std::uint64_t k = 5;
    std::uint64_t seed = kDefaultSeed;
    TypeFlags types;
};

void run_assess(const AssessArgs& args) {
    LoadOptions options = args.types.options();
    Dataset real = load_table(args.real_path, options);
    Dataset synth = load_table(args.synth_path, options);
    Cdg cdg = load_constraints(args.constraints);
    RealisticityReport report =
        assess_realisticity(real, synth, cdg, static_cast<std::size_t>(args.k), args.seed);
    emit_text(realisticity_to_json_text(report), args.output.empty() ? "-" : args.output);
}

struct TrainArgs {
    std::string input;
    std::string label;
    std::string output;
    int max_depth = 8;
    std::uint64_t min_samples_split = 2;
    TypeFlags types;
};

void run_train(const TrainArgs& args) {
    Dataset ds = load_table(args.input, args.types.options());
    TreeParams params;
    params.max_depth = args.max_depth;
    params.min_samples_split = static_cast<std::size_t>(args.min_samples_split);
    DecisionTreeModel model = DecisionTreeModel::train(ds, args.label, params);
    emit_text(model.to_json_text(), args.output);
    note("training accuracy " + std::to_string(accuracy(model, ds, args.label)));
}

struct PredictArgs {
    std::string model_spec;
    std::string input = "-";
    std::string output = "-";
    int timeout_ms = 60000;
};

void run_predict(const PredictArgs& args) {
    // The built-in tree knows its feature types, so the incoming CSV is
    // coerced to them instead of re-detected; this is what makes
    //   exec:"synthwright predict --model builtin:tree:model.json"
    // behave identically to in-process prediction.
    const std::string tree_prefix = "builtin:tree:";
    LoadOptions options;
    std::unique_ptr<Classifier> model;
    if (args.model_spec.rfind(tree_prefix, 0) == 0) {
        auto tree = std::make_unique<DecisionTreeModel>(
            DecisionTreeModel::load(args.model_spec.substr(tree_prefix.size())));
        for (const auto& [name, kind] : tree->features()) {
            if (kind == ColumnKind::Numeric)
                options.overrides.numeric.insert(name);
            else
                options.overrides.categorical.insert(name);
        }
        model = std::move(tree);
    } else {
        model = make_classifier(args.model_spec, args.timeout_ms);
    }

    Dataset rows = load_table(args.input, options);
    std::vector<std::string> labels = model->predict(rows);
    std::ostringstream body;
    for (const auto& label : labels) body << label << "\n";
    if (args.output == "-") {
        std::cout << body.str();
    } else {
        std::ofstream out(args.output, std::ios::binary);
        if (!out) throw IoError("cannot open for writing: " + args.output);
        out << body.str();
    }
}

struct DemoArgs {
    std::string out_dir = "demo_out";
    std::uint64_t seed = kDefaultSeed;
    std::uint64_t rows = 1000;
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Constraint-based synthetic tabular data generation and "
                 "property testing for black-box classifiers"};
    app.set_version_flag("--version", "synthwright 1.0.0");
    app.add_flag("-v,--verbose", g_verbose, "Verbose progress on stderr");
    app.fallthrough(); // subcommands inherit this, so -v works in any position
    app.require_subcommand(1);

    InferArgs infer_args;
    auto* infer = app.add_subcommand("infer", "Infer constraints from a CSV dataset");
    infer->add_option("csv", infer_args.input, "Input CSV ('-' for stdin)")->required();
    infer->add_option("-o,--output", infer_args.output, "Constraints JSON path")->required();
    infer->add_option("--label", infer_args.label,
                      "Label column: dropped before inference, recorded by name");
    infer_args.types.attach(infer);
    infer->callback([&] { run_infer(infer_args); });

    SynthArgs synth_args;
    auto* synth = app.add_subcommand("synth", "Synthesize rows from saved constraints");
    synth->add_option("constraints", synth_args.constraints, "Constraints JSON")->required();
    synth->add_option("-n,--rows", synth_args.n, "Rows to generate")->required();
    synth->add_option("--seed", synth_args.seed, "Generator seed (default 42)");
    synth->add_option("-o,--output", synth_args.output, "Output CSV ('-' for stdout)")
        ->required();
    synth->add_option("--udc", synth_args.udc_path, "User-defined constraints JSON");
    synth->add_option("--ledger", synth_args.ledger_path, "Write the error ledger here");
    synth->callback([&] { run_synth(synth_args); });

    TestArgs test_args;
    auto* test = app.add_subcommand("test", "Property-test a model on synthesized data");
    test->require_subcommand(1);
    auto add_common = [&](CLI::App* sub, bool fairness) {
        sub->add_option("constraints", test_args.constraints, "Constraints JSON")->required();
        sub->add_option("--model", test_args.model_spec,
                        "builtin:tree:<model.json> or exec:<command>")
            ->required();
        sub->add_option("-n,--rows", test_args.n, "Samples to generate (default 1000)");
        sub->add_option("--seed", test_args.seed, "Generator seed (default 42)");
        sub->add_option("--udc", test_args.udc_path, "User-defined constraints JSON");
        sub->add_option("-o,--output", test_args.output,
                        "Report JSON path (stdout if omitted)");
        sub->add_option("--timeout-ms", test_args.timeout_ms,
                        "External model timeout (default 60000)");
        if (fairness) {
            sub->add_option("--protected", test_args.protected_attr, "Protected column")
                ->required();
            sub->add_option("--privileged", test_args.privileged, "Privileged value(s)")
                ->required();
            sub->add_option("--unprivileged", test_args.unprivileged, "Unprivileged value(s)")
                ->required();
            sub->add_option("--favorable", test_args.favorable, "Favorable predicted label")
                ->required();
        }
    };
    auto* group = test->add_subcommand("group", "Disparate impact on an independent population");
    add_common(group, true);
    group->callback([&] { run_test(test_args, PropertyKind::GroupFairness); });
    auto* individual =
        test->add_subcommand("individual", "Counterfactual twin-pair discrimination");
    add_common(individual, true);
    individual->callback([&] { run_test(test_args, PropertyKind::IndividualFairness); });
    auto* robustness = test->add_subcommand(
        "robustness", "Prediction stability under one-feature perturbations");
    add_common(robustness, false);
    robustness->callback([&] { run_test(test_args, PropertyKind::Robustness); });

    AssessArgs assess_args;
    auto* assess = app.add_subcommand("assess", "Score synthetic data against real data");
    assess->add_option("real", assess_args.real_path, "Real CSV")->required();
    assess->add_option("synth", assess_args.synth_path, "Synthetic CSV")->required();
    assess->add_option("--constraints", assess_args.constraints, "Constraints JSON")
        ->required();
    assess->add_option("-o,--output", assess_args.output, "Report JSON (stdout if omitted)");
    assess->add_option("--k", assess_args.k, "Neighbor rank for density scoring (default 5)");
    assess->add_option("--seed", assess_args.seed, "Seed for size equalization (default 42)");
    assess_args.types.attach(assess);
    assess->callback([&] { run_assess(assess_args); });

    TrainArgs train_args;
    auto* train = app.add_subcommand("train", "Train the built-in decision tree");
    train->add_option("csv", train_args.input, "Training CSV ('-' for stdin)")->required();
    train->add_option("--label", train_args.label, "Label column")->required();
    train->add_option("-o,--output", train_args.output, "Model JSON path")->required();
    train->add_option("--max-depth", train_args.max_depth, "Maximum tree depth (default 8)");
    train->add_option("--min-samples-split", train_args.min_samples_split,
                      "Minimum rows to split a node (default 2)");
    train_args.types.attach(train);
    train->callback([&] { run_train(train_args); });

    PredictArgs predict_args;
    auto* predict =
        app.add_subcommand("predict", "Label CSV rows (stdin/stdout by default), one per line");
    predict->add_option("--model", predict_args.model_spec,
                        "builtin:tree:<model.json> or exec:<command>")
        ->required();
    predict->add_option("csv", predict_args.input, "Feature CSV ('-' for stdin)");
    predict->add_option("-o,--output", predict_args.output, "Label output ('-' for stdout)");
    predict->add_option("--timeout-ms", predict_args.timeout_ms,
                        "External model timeout (default 60000)");
    predict->callback([&] { run_predict(predict_args); });

    DemoArgs demo_args;
    auto* demo = app.add_subcommand("demo", "Full pipeline walkthrough on built-in toy data");
    demo->add_option("-o,--output-dir", demo_args.out_dir,
                     "Artifact directory (default demo_out)");
    demo->add_option("--seed", demo_args.seed, "Seed (default 42)");
    demo->add_option("-n,--rows", demo_args.rows, "Toy/synthetic row count (default 1000)");
    demo->callback([&] { run_demo(demo_args.out_dir, demo_args.seed, demo_args.rows,
                                  std::cout); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
