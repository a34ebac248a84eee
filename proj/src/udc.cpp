#include "synthwright/udc.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "synthwright/errors.hpp"

namespace synthwright {

using nlohmann::json;

namespace {

constexpr const char* kSchema = "synthwright-udc/v1";

double require_real(const json& j, const char* field) {
    if (!j.contains(field) || !j.at(field).is_number())
        throw ValidationError(std::string("user constraint: missing numeric field '") +
                              field + "'");
    return j.at(field).get<double>();
}

double real_or(const json& j, const char* field, double fallback) {
    if (!j.contains(field)) return fallback;
    if (!j.at(field).is_number())
        throw ValidationError(std::string("user constraint: field '") + field +
                              "' must be a number");
    return j.at(field).get<double>();
}

// Distributions are written with per-family named parameters; normal also
// accepts loc/scale as synonyms for mean/sd.
ContinuousDistribution distribution_from_json(const json& j) {
    std::string family = j.at("family").get<std::string>();
    if (family == "uniform") return make_uniform(require_real(j, "min"), require_real(j, "max"));
    if (family == "normal") {
        double mean = j.contains("mean") ? require_real(j, "mean") : require_real(j, "loc");
        double sd = j.contains("sd") ? require_real(j, "sd") : require_real(j, "scale");
        return make_normal(mean, sd);
    }
    if (family == "exponential")
        return make_exponential(real_or(j, "loc", 0.0), require_real(j, "scale"));
    if (family == "gamma")
        return make_gamma(require_real(j, "shape"), real_or(j, "loc", 0.0),
                          require_real(j, "scale"));
    if (family == "beta")
        return make_beta(require_real(j, "alpha"), require_real(j, "beta"),
                         real_or(j, "loc", 0.0), real_or(j, "scale", 1.0));
    throw ValidationError("user constraint: unknown distribution family " + family);
}

FrequencyTable frequency_from_json(const json& j) {
    FrequencyTable freq;
    for (auto it = j.begin(); it != j.end(); ++it) {
        std::int64_t count = it.value().get<std::int64_t>();
        if (count < 0) throw ValidationError("user constraint: negative frequency count");
        freq.counts[it.key()] = count;
    }
    if (freq.total() <= 0)
        throw ValidationError("user constraint: frequency table has no mass");
    return freq;
}

FitResult user_fit(const ContinuousDistribution& dist) {
    // User-supplied distributions are taken at face value: a perfect fit.
    FitResult fit;
    fit.distribution = dist;
    fit.ks_p_value = 1.0;
    fit.accepted = true;
    return fit;
}

Udc udc_from_json(const json& j, std::size_t index) {
    auto fail = [&](const std::string& msg) -> ValidationError {
        return ValidationError("user constraint #" + std::to_string(index + 1) + ": " + msg);
    };

    Udc udc;
    std::string kind = j.value("kind", std::string());
    if (kind == "add")
        udc.kind = UdcKind::Add;
    else if (kind == "modify")
        udc.kind = UdcKind::Modify;
    else if (kind == "delete")
        udc.kind = UdcKind::Delete;
    else
        throw fail("kind must be add, modify, or delete");

    if (!j.contains("target") || !j.at("target").is_object())
        throw fail("missing target object");
    const json& target = j.at("target");
    if (target.contains("column") == target.contains("edge"))
        throw fail("target must name exactly one of column or edge");
    if (target.contains("column")) {
        udc.column = target.at("column").get<std::string>();
    } else {
        const json& e = target.at("edge");
        udc.edge = std::make_pair(e.at("src").get<std::string>(),
                                  e.at("tgt").get<std::string>());
    }

    const bool has_payload = j.contains("payload") && !j.at("payload").is_null();
    if (udc.kind == UdcKind::Delete) {
        if (udc.edge && has_payload) throw fail("edge delete carries no payload");
        if (udc.column && has_payload) {
            const json& p = j.at("payload");
            if (!p.contains("element") || p.size() != 1)
                throw fail("column delete payload may only name an element");
            udc.element = p.at("element").get<std::string>();
            if (*udc.element != "distribution" && *udc.element != "range")
                throw fail("deletable elements are 'distribution' and 'range'");
        }
        return udc;
    }

    if (!has_payload) throw fail("add/modify requires a payload");
    const json& p = j.at("payload");

    if (udc.column) {
        if (p.contains("frequency")) {
            udc.frequency = frequency_from_json(p.at("frequency"));
        } else if (p.contains("distribution")) {
            udc.distribution = distribution_from_json(p.at("distribution"));
            udc.min = require_real(p, "min");
            udc.max = require_real(p, "max");
        } else if (p.contains("min") || p.contains("max")) {
            udc.min = require_real(p, "min");
            udc.max = require_real(p, "max");
        } else {
            throw fail("column payload must carry frequency, distribution, or min/max");
        }
        if (udc.min && *udc.min > *udc.max) throw fail("min exceeds max");
        return udc;
    }

    if (p.contains("table")) {
        for (auto it = p.at("table").begin(); it != p.at("table").end(); ++it)
            udc.table.emplace(it.key(), frequency_from_json(it.value()));
        if (udc.table.empty()) throw fail("edge table payload is empty");
    } else if (p.contains("per_value")) {
        for (auto it = p.at("per_value").begin(); it != p.at("per_value").end(); ++it) {
            const json& e = it.value();
            PerValueNumeric pv;
            pv.min = require_real(e, "min");
            pv.max = require_real(e, "max");
            if (pv.min > pv.max) throw fail("per-value min exceeds max");
            pv.count = 0;
            if (e.contains("distribution") && !e.at("distribution").is_null())
                pv.fit = user_fit(distribution_from_json(e.at("distribution")));
            udc.per_value.emplace(it.key(), std::move(pv));
        }
        if (udc.per_value.empty()) throw fail("edge per_value payload is empty");
    } else {
        throw fail("edge payload must carry table or per_value");
    }
    return udc;
}

} // namespace

std::vector<Udc> udcs_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("user constraint file is not valid JSON: ") +
                              e.what());
    }
    try {
        if (!j.contains("schema") || j.at("schema").get<std::string>() != kSchema)
            throw ValidationError(std::string("user constraint file schema must be ") +
                                  kSchema);
        std::vector<Udc> out;
        const json& list = j.at("udcs");
        for (std::size_t i = 0; i < list.size(); ++i) out.push_back(udc_from_json(list[i], i));
        return out;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("user constraint file is malformed: ") + e.what());
    }
}

std::vector<Udc> load_udcs(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return udcs_from_json_text(ss.str());
}

namespace {

void drop_incoming_edges(Cdg& cdg, const std::string& tgt) {
    cdg.edges.erase(std::remove_if(cdg.edges.begin(), cdg.edges.end(),
                                   [&](const Edge& e) { return e.tgt == tgt; }),
                    cdg.edges.end());
}

void drop_conditional_payloads(Cdg& cdg, const std::string& tgt) {
    cdg.cat_cat.erase(tgt);
    for (auto it = cdg.cat_num.begin(); it != cdg.cat_num.end();)
        it = it->first.second == tgt ? cdg.cat_num.erase(it) : std::next(it);
}

// Pinned columns regenerate from their own (possibly user-written)
// constraint, so the generator flag is set even when no fit is present;
// fitless pinned leaves draw uniformly within their range.
void pin_leaf(MergedCdg& merged, const std::string& column) {
    drop_incoming_edges(merged.cdg, column);
    drop_conditional_payloads(merged.cdg, column);
    merged.cdg.nodes.at(column).gen_node = true;
    merged.pinned_leaves.insert(column);
}

void apply_column_udc(MergedCdg& merged, const Udc& udc) {
    Cdg& cdg = merged.cdg;
    const std::string& name = *udc.column;
    auto it = cdg.nodes.find(name);
    if (it == cdg.nodes.end())
        throw ValidationError("user constraint targets unknown column: " + name);
    CdgNode& node = it->second;

    if (udc.kind == UdcKind::Delete) {
        if (!udc.element) {
            drop_column(cdg, name);
            return;
        }
        if (node.constraint.kind != ColumnKind::Numeric)
            throw ValidationError("column " + name + " has no " + *udc.element +
                                  " element to delete");
        if (*udc.element == "distribution") {
            node.constraint.numeric.fit.reset();
            node.gen_node = false;
            node.inf_error = 0.0;
        } else { // range
            node.constraint.numeric.min = -std::numeric_limits<double>::infinity();
            node.constraint.numeric.max = std::numeric_limits<double>::infinity();
        }
        return;
    }

    if (udc.frequency) {
        if (node.constraint.kind != ColumnKind::Categorical)
            throw ValidationError("frequency payload on numeric column " + name);
        node.constraint.frequency = *udc.frequency;
        node.inf_error = 0.0;
        pin_leaf(merged, name);
        return;
    }
    if (udc.distribution) {
        if (node.constraint.kind != ColumnKind::Numeric)
            throw ValidationError("distribution payload on categorical column " + name);
        node.constraint.numeric.fit = user_fit(*udc.distribution);
        node.constraint.numeric.min = *udc.min;
        node.constraint.numeric.max = *udc.max;
        node.inf_error = 0.0;
        pin_leaf(merged, name);
        return;
    }
    // Range-only edit: keep the constraint, rescale generated values after.
    if (node.constraint.kind != ColumnKind::Numeric)
        throw ValidationError("range payload on categorical column " + name);
    const NumericConstraint& nc = node.constraint.numeric;
    if (!(nc.min < nc.max))
        throw ValidationError("column " + name +
                              " has a degenerate data range; cannot rescale");
    merged.scaling[name] = ScalingDirective{nc.min, nc.max, *udc.min, *udc.max};
    pin_leaf(merged, name);
}

void apply_edge_udc(MergedCdg& merged, const Udc& udc) {
    Cdg& cdg = merged.cdg;
    const auto& [src, tgt] = *udc.edge;
    if (!cdg.has_node(src))
        throw ValidationError("user constraint targets unknown column: " + src);
    if (!cdg.has_node(tgt))
        throw ValidationError("user constraint targets unknown column: " + tgt);

    if (udc.kind == UdcKind::Delete) {
        auto before = cdg.edges.size();
        cdg.remove_edge(src, tgt);
        if (cdg.edges.size() == before)
            throw ValidationError("user constraint deletes nonexistent association " + src +
                                  " -> " + tgt);
        cdg.cat_num.erase(std::make_pair(src, tgt));
        return;
    }

    if (cdg.node(src).constraint.kind != ColumnKind::Categorical)
        throw ValidationError("association source must be categorical: " + src);

    if (!udc.table.empty()) {
        if (cdg.node(tgt).constraint.kind != ColumnKind::Categorical)
            throw ValidationError("conditional table payload on numeric column " + tgt);
        drop_incoming_edges(cdg, tgt);
        drop_conditional_payloads(cdg, tgt);
        cdg.edges.push_back({src, tgt, EdgeType::CatCat, 1.0, 0.0});
        CatCatAssociation assoc;
        assoc.sources = {src};
        assoc.target = tgt;
        for (const auto& [value, freq] : udc.table) assoc.table[{value}] = freq;
        cdg.cat_cat.emplace(tgt, std::move(assoc));
    } else {
        if (cdg.node(tgt).constraint.kind != ColumnKind::Numeric)
            throw ValidationError("per-value range payload on categorical column " + tgt);
        drop_incoming_edges(cdg, tgt);
        drop_conditional_payloads(cdg, tgt);
        std::int64_t missing_fits = 0;
        for (const auto& [value, pv] : udc.per_value)
            if (!pv.fit) ++missing_fits;
        double inf_error =
            static_cast<double>(missing_fits) / static_cast<double>(udc.per_value.size());
        cdg.edges.push_back({src, tgt, EdgeType::CatNum, 0.0, inf_error});
        CatNumAssociation assoc;
        assoc.source = src;
        assoc.target = tgt;
        assoc.per_value = udc.per_value;
        cdg.cat_num.emplace(std::make_pair(src, tgt), std::move(assoc));
    }
    cdg.sort_edges();
}

std::vector<std::string> conflict_keys(const Udc& udc) {
    if (udc.column) return {"col:" + *udc.column};
    const auto& [src, tgt] = *udc.edge;
    std::string edge_key = "edge:" + src + "->" + tgt;
    if (udc.kind == UdcKind::Delete) return {edge_key};
    // Add/modify rewires every edge into the target, so it also claims the
    // target column.
    return {edge_key, "col:" + tgt};
}

} // namespace

MergedCdg merge(const Cdg& cdg, const std::vector<Udc>& udcs) {
    MergedCdg merged;
    merged.cdg = cdg;

    std::set<std::string> claimed;
    for (const auto& udc : udcs)
        for (const auto& key : conflict_keys(udc))
            if (!claimed.insert(key).second)
                throw ValidationError("conflicting user constraints on " + key);

    for (const auto& udc : udcs) {
        if (udc.column)
            apply_column_udc(merged, udc);
        else
            apply_edge_udc(merged, udc);
    }

    for (const auto& [name, node] : merged.cdg.nodes) {
        if (node.gen_node) continue;
        if (merged.cdg.incoming(name).empty())
            throw ValidationError("after user constraint edits, column " + name +
                                  " has no distribution fit and no incoming edges; "
                                  "cannot generate it");
    }
    return merged;
}

std::vector<double> apply_scaling(const std::vector<double>& values,
                                  const ScalingDirective& d) {
    if (d.min_data == d.max_data)
        throw ValidationError("scaling directive has a degenerate data range");
    double factor = (d.max_user - d.min_user) / (d.max_data - d.min_data);
    std::vector<double> out;
    out.reserve(values.size());
    for (double v : values) out.push_back(d.min_user + (v - d.min_data) * factor);
    return out;
}

} // namespace synthwright
