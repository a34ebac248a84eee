#include "synthwright/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "synthwright/errors.hpp"

namespace synthwright {

using nlohmann::json;

namespace {

struct TrainContext {
    const Dataset* ds;
    std::vector<const Column*> features;
    std::vector<int> labels; // class id per row
    std::vector<std::string> classes;
    TreeParams params;
};

double gini(const std::vector<std::int64_t>& counts, std::int64_t total) {
    if (total == 0) return 0.0;
    double g = 1.0;
    for (std::int64_t c : counts) {
        double p = static_cast<double>(c) / static_cast<double>(total);
        g -= p * p;
    }
    return g;
}

double weighted_gini(const std::vector<std::int64_t>& left, std::int64_t nl,
                     const std::vector<std::int64_t>& right, std::int64_t nr) {
    double total = static_cast<double>(nl + nr);
    return (static_cast<double>(nl) * gini(left, nl) +
            static_cast<double>(nr) * gini(right, nr)) /
           total;
}

std::string majority_label(const TrainContext& ctx, const std::vector<std::size_t>& rows) {
    std::vector<std::int64_t> counts(ctx.classes.size(), 0);
    for (std::size_t r : rows) ++counts[static_cast<std::size_t>(ctx.labels[r])];
    std::size_t best = 0;
    for (std::size_t i = 1; i < counts.size(); ++i)
        if (counts[i] > counts[best]) best = i; // ties keep the smaller class name
    return ctx.classes[best];
}

struct SplitChoice {
    bool found = false;
    std::size_t feature = 0;
    double threshold = 0.0;
    std::string value;
    double impurity = 0.0;
};

SplitChoice best_split(const TrainContext& ctx, const std::vector<std::size_t>& rows) {
    std::size_t k = ctx.classes.size();
    std::vector<std::int64_t> node_counts(k, 0);
    for (std::size_t r : rows) ++node_counts[static_cast<std::size_t>(ctx.labels[r])];
    double parent = gini(node_counts, static_cast<std::int64_t>(rows.size()));

    SplitChoice best;
    for (std::size_t f = 0; f < ctx.features.size(); ++f) {
        const Column& col = *ctx.features[f];
        if (col.kind == ColumnKind::Numeric) {
            std::vector<std::size_t> order = rows;
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return col.num[a] < col.num[b];
            });
            std::vector<std::int64_t> left(k, 0);
            std::vector<std::int64_t> right = node_counts;
            for (std::size_t i = 0; i + 1 < order.size(); ++i) {
                int cls = ctx.labels[order[i]];
                ++left[static_cast<std::size_t>(cls)];
                --right[static_cast<std::size_t>(cls)];
                double lo = col.num[order[i]];
                double hi = col.num[order[i + 1]];
                if (lo == hi) continue;
                double w = weighted_gini(left, static_cast<std::int64_t>(i + 1), right,
                                         static_cast<std::int64_t>(order.size() - i - 1));
                if (!best.found || w < best.impurity) {
                    best.found = true;
                    best.feature = f;
                    best.threshold = lo + (hi - lo) / 2.0;
                    best.value.clear();
                    best.impurity = w;
                }
            }
        } else {
            // Per-value class tallies, then one-vs-rest in value order.
            std::map<std::string, std::vector<std::int64_t>> tallies;
            for (std::size_t r : rows) {
                auto& t = tallies[col.cat[r]];
                if (t.empty()) t.assign(k, 0);
                ++t[static_cast<std::size_t>(ctx.labels[r])];
            }
            for (const auto& [value, counts] : tallies) {
                std::int64_t nl = std::accumulate(counts.begin(), counts.end(),
                                                  std::int64_t{0});
                std::int64_t nr = static_cast<std::int64_t>(rows.size()) - nl;
                if (nl == 0 || nr == 0) continue;
                std::vector<std::int64_t> right(k, 0);
                for (std::size_t i = 0; i < k; ++i) right[i] = node_counts[i] - counts[i];
                double w = weighted_gini(counts, nl, right, nr);
                if (!best.found || w < best.impurity) {
                    best.found = true;
                    best.feature = f;
                    best.value = value;
                    best.impurity = w;
                }
            }
        }
    }
    if (best.found && best.impurity >= parent) best.found = false; // no gain
    return best;
}

int build_node(TrainContext& ctx, std::vector<DecisionTreeModel::Node>& nodes,
               const std::vector<std::size_t>& rows, int depth) {
    int index = static_cast<int>(nodes.size());
    nodes.emplace_back();

    bool pure = true;
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (ctx.labels[rows[i]] != ctx.labels[rows[0]]) {
            pure = false;
            break;
        }

    SplitChoice split;
    if (!pure && depth < ctx.params.max_depth && rows.size() >= ctx.params.min_samples_split)
        split = best_split(ctx, rows);

    if (!split.found) {
        nodes[static_cast<std::size_t>(index)].leaf = true;
        nodes[static_cast<std::size_t>(index)].label = majority_label(ctx, rows);
        return index;
    }

    const Column& col = *ctx.features[split.feature];
    std::vector<std::size_t> left_rows, right_rows;
    for (std::size_t r : rows) {
        bool goes_left = col.kind == ColumnKind::Numeric ? col.num[r] < split.threshold
                                                         : col.cat[r] == split.value;
        (goes_left ? left_rows : right_rows).push_back(r);
    }

    {
        DecisionTreeModel::Node& n = nodes[static_cast<std::size_t>(index)];
        n.leaf = false;
        n.column = col.name;
        n.kind = col.kind;
        n.threshold = split.threshold;
        n.value = split.value;
    }
    int left = build_node(ctx, nodes, left_rows, depth + 1);
    nodes[static_cast<std::size_t>(index)].left = left;
    int right = build_node(ctx, nodes, right_rows, depth + 1);
    nodes[static_cast<std::size_t>(index)].right = right;
    return index;
}

} // namespace

DecisionTreeModel DecisionTreeModel::train(const Dataset& ds, const std::string& label,
                                           const TreeParams& params) {
    const Column& label_col = ds.column(label);
    if (label_col.kind != ColumnKind::Categorical)
        throw ValidationError("label column must be categorical: " + label);
    if (ds.row_count() < 2) throw ValidationError("need at least 2 rows to train");

    TrainContext ctx;
    ctx.ds = &ds;
    ctx.params = params;
    for (const auto& col : ds.columns())
        if (col.name != label) ctx.features.push_back(&col);

    std::map<std::string, int> class_ids;
    for (const auto& v : label_col.cat) class_ids.emplace(v, 0);
    if (class_ids.size() < 2)
        throw ValidationError("label column has a single class: " + label);
    for (auto& [name, id] : class_ids) {
        id = static_cast<int>(ctx.classes.size());
        ctx.classes.push_back(name);
    }
    ctx.labels.reserve(ds.row_count());
    for (const auto& v : label_col.cat) ctx.labels.push_back(class_ids.at(v));

    std::vector<std::size_t> rows(ds.row_count());
    std::iota(rows.begin(), rows.end(), std::size_t{0});

    DecisionTreeModel model;
    model.label_column_ = label;
    for (const Column* f : ctx.features) model.features_.emplace_back(f->name, f->kind);
    build_node(ctx, model.nodes_, rows, 0);
    return model;
}

std::vector<std::string> DecisionTreeModel::predict(const Dataset& rows) const {
    std::vector<const Column*> cols(features_.size(), nullptr);
    for (std::size_t f = 0; f < features_.size(); ++f) {
        const Column& col = rows.column(features_[f].first);
        if (col.kind != features_[f].second)
            throw ValidationError("column " + col.name + " has the wrong type for this model");
        cols[f] = &col;
    }
    std::map<std::string, std::size_t> feature_index;
    for (std::size_t f = 0; f < features_.size(); ++f) feature_index[features_[f].first] = f;

    std::vector<std::string> out;
    out.reserve(rows.row_count());
    for (std::size_t r = 0; r < rows.row_count(); ++r) {
        const Node* n = &nodes_.at(0);
        while (!n->leaf) {
            const Column& col = *cols[feature_index.at(n->column)];
            bool left = n->kind == ColumnKind::Numeric ? col.num[r] < n->threshold
                                                       : col.cat[r] == n->value;
            n = &nodes_.at(static_cast<std::size_t>(left ? n->left : n->right));
        }
        out.push_back(n->label);
    }
    return out;
}

DecisionTreeModel DecisionTreeModel::from_parts(
    std::vector<Node> nodes, std::vector<std::pair<std::string, ColumnKind>> features,
    std::string label_column) {
    DecisionTreeModel model;
    model.nodes_ = std::move(nodes);
    model.features_ = std::move(features);
    model.label_column_ = std::move(label_column);
    if (model.nodes_.empty()) throw ValidationError("tree has no nodes");
    return model;
}

std::string DecisionTreeModel::to_json_text() const {
    json j;
    j["schema"] = "synthwright-model/v1";
    j["label_column"] = label_column_;
    json feats = json::array();
    for (const auto& [name, kind] : features_)
        feats.push_back(json{{"name", name}, {"kind", kind_name(kind)}});
    j["features"] = std::move(feats);
    json nodes = json::array();
    for (const auto& n : nodes_) {
        if (n.leaf) {
            nodes.push_back(json{{"leaf", true}, {"label", n.label}});
        } else {
            json s{{"leaf", false},
                   {"column", n.column},
                   {"kind", kind_name(n.kind)},
                   {"left", n.left},
                   {"right", n.right}};
            if (n.kind == ColumnKind::Numeric)
                s["threshold"] = n.threshold;
            else
                s["value"] = n.value;
            nodes.push_back(std::move(s));
        }
    }
    j["nodes"] = std::move(nodes);
    return j.dump(2) + "\n";
}

DecisionTreeModel DecisionTreeModel::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("model file is not valid JSON: ") + e.what());
    }
    try {
        if (!j.contains("schema") || j.at("schema").get<std::string>() != "synthwright-model/v1")
            throw ValidationError("model file schema must be synthwright-model/v1");
        DecisionTreeModel model;
        model.label_column_ = j.at("label_column").get<std::string>();
        for (const json& f : j.at("features")) {
            std::string kind = f.at("kind").get<std::string>();
            model.features_.emplace_back(f.at("name").get<std::string>(),
                                         kind == "numeric" ? ColumnKind::Numeric
                                                           : ColumnKind::Categorical);
        }
        const json& nodes = j.at("nodes");
        for (const json& n : nodes) {
            Node node;
            node.leaf = n.at("leaf").get<bool>();
            if (node.leaf) {
                node.label = n.at("label").get<std::string>();
            } else {
                node.column = n.at("column").get<std::string>();
                node.kind = n.at("kind").get<std::string>() == "numeric"
                                ? ColumnKind::Numeric
                                : ColumnKind::Categorical;
                if (node.kind == ColumnKind::Numeric)
                    node.threshold = n.at("threshold").get<double>();
                else
                    node.value = n.at("value").get<std::string>();
                node.left = n.at("left").get<int>();
                node.right = n.at("right").get<int>();
                if (node.left < 0 || node.right < 0 ||
                    node.left >= static_cast<int>(nodes.size()) ||
                    node.right >= static_cast<int>(nodes.size()))
                    throw ValidationError("model file: child index out of range");
            }
            model.nodes_.push_back(std::move(node));
        }
        if (model.nodes_.empty()) throw ValidationError("model file has no nodes");
        return model;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("model file is malformed: ") + e.what());
    }
}

void DecisionTreeModel::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << to_json_text();
    if (!out) throw IoError("write failed: " + path);
}

DecisionTreeModel DecisionTreeModel::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

double accuracy(const Classifier& model, const Dataset& ds, const std::string& label) {
    const Column& truth = ds.column(label);
    if (truth.kind != ColumnKind::Categorical)
        throw ValidationError("label column must be categorical: " + label);
    std::vector<std::string> predicted = model.predict(ds);
    std::size_t hits = 0;
    for (std::size_t r = 0; r < ds.row_count(); ++r)
        if (predicted[r] == truth.cat[r]) ++hits;
    return static_cast<double>(hits) / static_cast<double>(ds.row_count());
}

std::unique_ptr<Classifier> make_classifier(const std::string& spec, int exec_timeout_ms) {
    const std::string tree_prefix = "builtin:tree:";
    const std::string exec_prefix = "exec:";
    if (spec.rfind(tree_prefix, 0) == 0)
        return std::make_unique<DecisionTreeModel>(
            DecisionTreeModel::load(spec.substr(tree_prefix.size())));
    if (spec.rfind(exec_prefix, 0) == 0)
        return std::make_unique<ExternalModel>(spec.substr(exec_prefix.size()),
                                               exec_timeout_ms);
    throw ValidationError("model spec must start with builtin:tree: or exec:");
}

} // namespace synthwright
