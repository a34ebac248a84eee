#include "synthwright/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "synthwright/errors.hpp"

namespace synthwright {

using nlohmann::json;

const CdgNode& Cdg::node(const std::string& name) const {
    auto it = nodes.find(name);
    if (it == nodes.end()) throw ValidationError("unknown column in graph: " + name);
    return it->second;
}

bool Cdg::has_node(const std::string& name) const { return nodes.count(name) > 0; }

std::vector<Edge> Cdg::incoming(const std::string& tgt) const {
    std::vector<Edge> out;
    for (const auto& e : edges)
        if (e.tgt == tgt) out.push_back(e);
    return out;
}

void Cdg::sort_edges() {
    std::sort(edges.begin(), edges.end(),
              [](const Edge& a, const Edge& b) { return a.key() < b.key(); });
}

void Cdg::remove_edge(const std::string& src, const std::string& tgt) {
    edges.erase(std::remove_if(edges.begin(), edges.end(),
                               [&](const Edge& e) { return e.src == src && e.tgt == tgt; }),
                edges.end());
}

std::vector<ColumnConstraint> infer_column_constraints(const Dataset& ds) {
    std::vector<ColumnConstraint> out;
    out.reserve(ds.column_count());
    for (const auto& col : ds.columns()) {
        ColumnConstraint cc;
        cc.column = col.name;
        cc.kind = col.kind;
        if (col.kind == ColumnKind::Categorical) {
            cc.frequency = FrequencyTable::from_column(col.cat);
        } else {
            auto [mn, mx] = std::minmax_element(col.num.begin(), col.num.end());
            cc.numeric.min = *mn;
            cc.numeric.max = *mx;
            if (col.num.size() >= 2) cc.numeric.fit = fit_distribution(col.num);
        }
        out.push_back(std::move(cc));
    }
    return out;
}

namespace {

// Mean of (1 - ks_p) over every observed source value; values without an
// accepted per-group fit count as total error 1.
double cat_num_edge_error(const CatNumAssociation& assoc,
                          const std::vector<std::string>& observed_values) {
    if (observed_values.empty()) return 1.0;
    double sum = 0.0;
    for (const auto& v : observed_values) {
        auto it = assoc.per_value.find(v);
        if (it != assoc.per_value.end() && it->second.fit && it->second.fit->accepted)
            sum += 1.0 - it->second.fit->ks_p_value;
        else
            sum += 1.0;
    }
    return sum / static_cast<double>(observed_values.size());
}

} // namespace

InferredAssociations infer_associations(const Dataset& ds, const InferenceOptions& opt) {
    InferredAssociations out;

    std::vector<const Column*> cats;
    std::vector<const Column*> nums;
    for (const auto& col : ds.columns())
        (col.kind == ColumnKind::Categorical ? cats : nums).push_back(&col);

    for (std::size_t i = 0; i < cats.size(); ++i) {
        for (std::size_t j = i + 1; j < cats.size(); ++j) {
            const Column& a = *cats[i];
            const Column& b = *cats[j];
            Chi2Result chi = chi_square_independence(a.cat, b.cat);
            if (chi.p_value >= opt.chi2_alpha) continue;
            double u_ab = theils_u(a.cat, b.cat); // how well a predicts b
            double u_ba = theils_u(b.cat, a.cat);
            if (u_ab >= opt.u_threshold && u_ab >= u_ba)
                out.cat_cat_edges.push_back({a.name, b.name, EdgeType::CatCat, u_ab, 1.0 - u_ab});
            if (u_ba >= opt.u_threshold && u_ba >= u_ab)
                out.cat_cat_edges.push_back({b.name, a.name, EdgeType::CatCat, u_ba, 1.0 - u_ba});
        }
    }

    for (const Column* s : cats) {
        for (const Column* t : nums) {
            std::map<std::string, std::vector<double>> groups;
            for (std::size_t r = 0; r < s->cat.size(); ++r)
                groups[s->cat[r]].push_back(t->num[r]);

            CatNumAssociation assoc;
            assoc.source = s->name;
            assoc.target = t->name;
            std::int64_t covered = 0;
            bool any_fit = false;
            for (auto& [value, data] : groups) {
                if (static_cast<std::int64_t>(data.size()) < opt.min_group_size) continue;
                covered += static_cast<std::int64_t>(data.size());
                PerValueNumeric pv;
                auto [mn, mx] = std::minmax_element(data.begin(), data.end());
                pv.min = *mn;
                pv.max = *mx;
                pv.count = static_cast<std::int64_t>(data.size());
                if (data.size() >= 2) pv.fit = fit_distribution(data);
                if (pv.fit && pv.fit->accepted) any_fit = true;
                assoc.per_value.emplace(value, std::move(pv));
            }
            double coverage = static_cast<double>(covered) / static_cast<double>(s->cat.size());
            if (coverage < opt.group_row_coverage || !any_fit) continue;

            std::vector<std::string> observed;
            observed.reserve(groups.size());
            for (const auto& [value, data] : groups) observed.push_back(value);
            double err = cat_num_edge_error(assoc, observed);
            out.cat_num_edges.push_back({s->name, t->name, EdgeType::CatNum, 0.0, err});
            out.cat_num.push_back(std::move(assoc));
        }
    }
    return out;
}

Cdg build_cdg(const Dataset& ds, const InferenceOptions& opt) {
    Cdg cdg;
    cdg.source_rows = static_cast<std::int64_t>(ds.row_count());
    for (const auto& col : ds.columns()) cdg.column_order.push_back(col.name);

    for (auto& cc : infer_column_constraints(ds)) {
        CdgNode node;
        node.gen_node = cc.kind == ColumnKind::Categorical ||
                        (cc.numeric.fit && cc.numeric.fit->accepted);
        node.inf_error = (cc.kind == ColumnKind::Numeric && cc.numeric.fit)
                             ? 1.0 - cc.numeric.fit->ks_p_value
                             : 0.0;
        std::string name = cc.column;
        node.constraint = std::move(cc);
        cdg.nodes.emplace(std::move(name), std::move(node));
    }

    InferredAssociations assoc = infer_associations(ds, opt);
    cdg.edges = assoc.cat_cat_edges;
    cdg.edges.insert(cdg.edges.end(), assoc.cat_num_edges.begin(), assoc.cat_num_edges.end());
    cdg.sort_edges();

    // Joint conditional tables, one per categorical target, over the sorted
    // set of that target's cat_cat sources.
    std::map<std::string, std::vector<std::string>> sources_by_target;
    for (const auto& e : assoc.cat_cat_edges) sources_by_target[e.tgt].push_back(e.src);
    for (auto& [target, sources] : sources_by_target) {
        std::sort(sources.begin(), sources.end());
        CatCatAssociation table;
        table.sources = sources;
        table.target = target;
        const Column& tcol = ds.column(target);
        std::vector<const Column*> scols;
        for (const auto& s : sources) scols.push_back(&ds.column(s));
        for (std::size_t r = 0; r < ds.row_count(); ++r) {
            std::vector<std::string> key;
            key.reserve(scols.size());
            for (const Column* sc : scols) key.push_back(sc->cat[r]);
            table.table[key].add(tcol.cat[r]);
        }
        cdg.cat_cat.emplace(target, std::move(table));
    }

    for (auto& a : assoc.cat_num)
        cdg.cat_num.emplace(std::make_pair(a.source, a.target), std::move(a));
    return cdg;
}

CatCatAssociation marginalize_cat_cat(const CatCatAssociation& assoc,
                                      const std::vector<std::string>& keep) {
    std::vector<std::size_t> idx;
    for (const auto& name : keep) {
        auto it = std::find(assoc.sources.begin(), assoc.sources.end(), name);
        if (it == assoc.sources.end())
            throw ValidationError("cannot marginalize onto unknown source: " + name);
        idx.push_back(static_cast<std::size_t>(it - assoc.sources.begin()));
    }
    CatCatAssociation out;
    out.sources = keep;
    out.target = assoc.target;
    for (const auto& [key, freq] : assoc.table) {
        std::vector<std::string> sub;
        sub.reserve(idx.size());
        for (std::size_t i : idx) sub.push_back(key[i]);
        auto& dst = out.table[sub];
        for (const auto& [value, count] : freq.counts) dst.counts[value] += count;
    }
    return out;
}

void drop_column(Cdg& cdg, const std::string& name) {
    if (!cdg.has_node(name)) throw ValidationError("cannot drop unknown column: " + name);
    cdg.edges.erase(std::remove_if(cdg.edges.begin(), cdg.edges.end(),
                                   [&](const Edge& e) {
                                       return e.src == name || e.tgt == name;
                                   }),
                    cdg.edges.end());
    cdg.cat_cat.erase(name);
    // Associations conditioning on the dropped column collapse onto their
    // surviving sources, or disappear with the last one.
    for (auto it = cdg.cat_cat.begin(); it != cdg.cat_cat.end();) {
        const auto& sources = it->second.sources;
        if (std::find(sources.begin(), sources.end(), name) == sources.end()) {
            ++it;
            continue;
        }
        std::vector<std::string> keep;
        for (const auto& s : sources)
            if (s != name) keep.push_back(s);
        if (keep.empty()) {
            it = cdg.cat_cat.erase(it);
        } else {
            it->second = marginalize_cat_cat(it->second, keep);
            ++it;
        }
    }
    for (auto it = cdg.cat_num.begin(); it != cdg.cat_num.end();)
        it = (it->first.first == name || it->first.second == name) ? cdg.cat_num.erase(it)
                                                                   : std::next(it);
    cdg.nodes.erase(name);
    cdg.column_order.erase(std::remove(cdg.column_order.begin(), cdg.column_order.end(), name),
                           cdg.column_order.end());
    if (cdg.label_column && *cdg.label_column == name) cdg.label_column.reset();
}

namespace {

constexpr const char* kSchema = "synthwright-constraints/v1";

// JSON has no literal for non-finite reals; encode them as tagged strings so
// files with open-ended ranges still round-trip.
json real_to_json(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

double real_from_json(const json& j, const std::string& what) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const std::string& s = j.get_ref<const std::string&>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    }
    throw ValidationError("constraint file: bad real value for " + what);
}

json fit_to_json(const FitResult& fit) {
    return json{{"family", family_name(fit.distribution.family)},
                {"a", real_to_json(fit.distribution.a)},
                {"b", real_to_json(fit.distribution.b)},
                {"loc", real_to_json(fit.distribution.loc)},
                {"scale", real_to_json(fit.distribution.scale)},
                {"ks_p", real_to_json(fit.ks_p_value)},
                {"accepted", fit.accepted}};
}

FitResult fit_from_json(const json& j) {
    FitResult fit;
    fit.distribution.family = family_from_name(j.at("family").get<std::string>());
    fit.distribution.a = real_from_json(j.at("a"), "fit.a");
    fit.distribution.b = real_from_json(j.at("b"), "fit.b");
    fit.distribution.loc = real_from_json(j.at("loc"), "fit.loc");
    fit.distribution.scale = real_from_json(j.at("scale"), "fit.scale");
    fit.ks_p_value = real_from_json(j.at("ks_p"), "fit.ks_p");
    fit.accepted = j.at("accepted").get<bool>();
    return fit;
}

json frequency_to_json(const FrequencyTable& freq) {
    json j = json::object();
    for (const auto& [value, count] : freq.counts) j[value] = count;
    return j;
}

FrequencyTable frequency_from_json(const json& j, const std::string& what) {
    FrequencyTable freq;
    for (auto it = j.begin(); it != j.end(); ++it) {
        std::int64_t count = it.value().get<std::int64_t>();
        if (count < 0)
            throw ValidationError("constraint file: negative count in " + what);
        freq.counts[it.key()] = count;
    }
    return freq;
}

} // namespace

std::string constraints_to_json_text(const Cdg& cdg) {
    json j;
    j["schema"] = kSchema;
    j["dataset_name"] = cdg.dataset_name;
    j["source_rows"] = cdg.source_rows;
    if (cdg.label_column)
        j["label_column"] = *cdg.label_column;
    else
        j["label_column"] = nullptr;
    j["columns"] = cdg.column_order;

    json nodes = json::object();
    for (const auto& [name, node] : cdg.nodes) {
        json n;
        n["kind"] = kind_name(node.constraint.kind);
        n["inf_error"] = real_to_json(node.inf_error);
        n["gen_node"] = node.gen_node;
        if (node.constraint.kind == ColumnKind::Categorical) {
            n["frequency"] = frequency_to_json(node.constraint.frequency);
        } else {
            n["min"] = real_to_json(node.constraint.numeric.min);
            n["max"] = real_to_json(node.constraint.numeric.max);
            n["fit"] = node.constraint.numeric.fit ? fit_to_json(*node.constraint.numeric.fit)
                                                   : json(nullptr);
        }
        nodes[name] = std::move(n);
    }
    j["nodes"] = std::move(nodes);

    json edges = json::array();
    for (const auto& e : cdg.edges) {
        json je{{"src", e.src},
                {"tgt", e.tgt},
                {"type", e.type == EdgeType::CatCat ? "cat_cat" : "cat_num"},
                {"inf_error", real_to_json(e.inf_error)}};
        if (e.type == EdgeType::CatCat) je["u_value"] = real_to_json(e.u_value);
        edges.push_back(std::move(je));
    }
    j["edges"] = std::move(edges);

    json cat_cat = json::object();
    for (const auto& [target, assoc] : cdg.cat_cat) {
        json rows = json::array();
        for (const auto& [key, freq] : assoc.table)
            rows.push_back(json{{"key", key}, {"counts", frequency_to_json(freq)}});
        cat_cat[target] = json{{"sources", assoc.sources}, {"table", std::move(rows)}};
    }
    j["cat_cat"] = std::move(cat_cat);

    json cat_num = json::array();
    for (const auto& [key, assoc] : cdg.cat_num) {
        json pv = json::object();
        for (const auto& [value, entry] : assoc.per_value) {
            json e{{"min", real_to_json(entry.min)},
                   {"max", real_to_json(entry.max)},
                   {"count", entry.count},
                   {"fit", entry.fit ? fit_to_json(*entry.fit) : json(nullptr)}};
            pv[value] = std::move(e);
        }
        cat_num.push_back(json{{"source", assoc.source},
                               {"target", assoc.target},
                               {"per_value", std::move(pv)}});
    }
    j["cat_num"] = std::move(cat_num);

    return j.dump(2) + "\n";
}

Cdg constraints_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("constraint file is not valid JSON: ") + e.what());
    }
    try {
        if (!j.contains("schema") || j.at("schema").get<std::string>() != kSchema)
            throw ValidationError(std::string("constraint file schema must be ") + kSchema);

        Cdg cdg;
        cdg.dataset_name = j.value("dataset_name", std::string());
        cdg.source_rows = j.value("source_rows", std::int64_t{0});
        if (j.contains("label_column") && !j.at("label_column").is_null())
            cdg.label_column = j.at("label_column").get<std::string>();
        cdg.column_order = j.at("columns").get<std::vector<std::string>>();

        for (auto it = j.at("nodes").begin(); it != j.at("nodes").end(); ++it) {
            const json& n = it.value();
            CdgNode node;
            node.constraint.column = it.key();
            std::string kind = n.at("kind").get<std::string>();
            if (kind == "categorical") {
                node.constraint.kind = ColumnKind::Categorical;
                node.constraint.frequency =
                    frequency_from_json(n.at("frequency"), "node " + it.key());
            } else if (kind == "numeric") {
                node.constraint.kind = ColumnKind::Numeric;
                node.constraint.numeric.min = real_from_json(n.at("min"), "node min");
                node.constraint.numeric.max = real_from_json(n.at("max"), "node max");
                if (n.contains("fit") && !n.at("fit").is_null())
                    node.constraint.numeric.fit = fit_from_json(n.at("fit"));
            } else {
                throw ValidationError("constraint file: unknown column kind " + kind);
            }
            node.inf_error = real_from_json(n.at("inf_error"), "node inf_error");
            node.gen_node = n.at("gen_node").get<bool>();
            if (node.inf_error < 0.0 || node.inf_error > 1.0)
                throw ValidationError("constraint file: node inf_error outside [0,1]");
            cdg.nodes.emplace(it.key(), std::move(node));
        }

        for (const json& je : j.at("edges")) {
            Edge e;
            e.src = je.at("src").get<std::string>();
            e.tgt = je.at("tgt").get<std::string>();
            std::string type = je.at("type").get<std::string>();
            if (type == "cat_cat")
                e.type = EdgeType::CatCat;
            else if (type == "cat_num")
                e.type = EdgeType::CatNum;
            else
                throw ValidationError("constraint file: unknown edge type " + type);
            e.inf_error = real_from_json(je.at("inf_error"), "edge inf_error");
            if (e.type == EdgeType::CatCat)
                e.u_value = real_from_json(je.at("u_value"), "edge u_value");
            if (!cdg.has_node(e.src) || !cdg.has_node(e.tgt))
                throw ValidationError("constraint file: edge endpoint is not a node: " +
                                      e.src + "->" + e.tgt);
            if (e.inf_error < 0.0 || e.inf_error > 1.0)
                throw ValidationError("constraint file: edge inf_error outside [0,1]");
            cdg.edges.push_back(std::move(e));
        }
        cdg.sort_edges();

        for (auto it = j.at("cat_cat").begin(); it != j.at("cat_cat").end(); ++it) {
            CatCatAssociation assoc;
            assoc.target = it.key();
            assoc.sources = it.value().at("sources").get<std::vector<std::string>>();
            for (const json& row : it.value().at("table")) {
                auto key = row.at("key").get<std::vector<std::string>>();
                if (key.size() != assoc.sources.size())
                    throw ValidationError("constraint file: table key arity mismatch for " +
                                          it.key());
                assoc.table[key] =
                    frequency_from_json(row.at("counts"), "table for " + it.key());
            }
            cdg.cat_cat.emplace(it.key(), std::move(assoc));
        }

        for (const json& ja : j.at("cat_num")) {
            CatNumAssociation assoc;
            assoc.source = ja.at("source").get<std::string>();
            assoc.target = ja.at("target").get<std::string>();
            for (auto it = ja.at("per_value").begin(); it != ja.at("per_value").end(); ++it) {
                PerValueNumeric pv;
                pv.min = real_from_json(it.value().at("min"), "per_value min");
                pv.max = real_from_json(it.value().at("max"), "per_value max");
                pv.count = it.value().at("count").get<std::int64_t>();
                if (pv.count < 0)
                    throw ValidationError("constraint file: negative count in per_value");
                if (it.value().contains("fit") && !it.value().at("fit").is_null())
                    pv.fit = fit_from_json(it.value().at("fit"));
                assoc.per_value.emplace(it.key(), std::move(pv));
            }
            cdg.cat_num.emplace(std::make_pair(assoc.source, assoc.target), std::move(assoc));
        }
        return cdg;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("constraint file is malformed: ") + e.what());
    }
}

void save_constraints(const Cdg& cdg, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << constraints_to_json_text(cdg);
    if (!out) throw IoError("write failed: " + path);
}

Cdg load_constraints(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return constraints_from_json_text(ss.str());
}

} // namespace synthwright
