#include "greenberg/instance_io.hpp"

#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

namespace greenberg {

namespace {

using nlohmann::json;

json load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open file: " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
    for (const auto& [key, value] : obj.items())
        if (!allowed.count(key))
            throw ParseError("unknown key '" + key + "' in " + where);
}

int get_int(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key)) throw ParseError("missing key '" + key + "' in " + where);
    if (!obj[key].is_number_integer())
        throw ParseError("field '" + key + "' in " + where + " must be an integer");
    return obj[key].get<int>();
}

std::vector<int> get_exponents(const json& value, const std::string& where) {
    if (!value.is_array()) throw ParseError(where + " must be a list of exponents");
    std::vector<int> exps;
    for (const auto& e : value) {
        if (!e.is_number_integer() || e.get<int>() < 1)
            throw ParseError(where + " entries must be positive integers");
        exps.push_back(e.get<int>());
    }
    for (std::size_t i = 1; i < exps.size(); ++i)
        if (exps[i] > exps[i - 1])
            throw ParseError(where + " must be non-increasing");
    return exps;
}

AbelianPGroup get_group(const json& groups, const std::string& name, i64 p) {
    if (!groups.contains(name)) return AbelianPGroup(p, {});
    return AbelianPGroup(p, get_exponents(groups[name], "groups." + name));
}

}  // namespace

FieldInstance parse_instance(const std::string& path) {
    return parse_instance_json(load_file(path));
}

FieldInstance parse_instance_json(const json& doc) {
    if (!doc.is_object()) throw ParseError("instance document must be a JSON object");
    reject_unknown_keys(doc, {"label", "p", "s_count", "groups", "layers", "invariants",
                              "metadata"},
                        "instance");

    FieldInstance inst;
    inst.label = doc.value("label", std::string{});
    inst.p = get_int(doc, "p", "instance");
    inst.s_count = get_int(doc, "s_count", "instance");

    const json groups = doc.value("groups", json::object());
    if (!groups.is_object()) throw ParseError("'groups' must be an object");
    reject_unknown_keys(groups, {"ck", "tk", "rk", "rk_nr", "wk"}, "groups");
    try {
        inst.ck = get_group(groups, "ck", inst.p);
        inst.tk = get_group(groups, "tk", inst.p);
        inst.rk = get_group(groups, "rk", inst.p);
        inst.rk_nr = get_group(groups, "rk_nr", inst.p);
        if (groups.contains("wk")) {
            inst.wk_exponents = get_exponents(groups["wk"], "groups.wk");
            inst.wk_valuation =
                AbelianPGroup(inst.p, *inst.wk_exponents).order_valuation();
        }
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("invalid group structure: ") + e.what());
    }

    if (doc.contains("layers")) {
        if (!doc["layers"].is_array()) throw ParseError("'layers' must be a list");
        for (const auto& entry : doc["layers"]) {
            const std::string where = "layers[" + std::to_string(inst.layers.size()) + "]";
            reject_unknown_keys(entry, {"n", "class_exponents", "order_valuation", "b"}, where);
            FieldInstance::Layer layer;
            layer.n = get_int(entry, "n", where);
            if (entry.contains("class_exponents")) {
                layer.class_group = AbelianPGroup(
                    inst.p, get_exponents(entry["class_exponents"], where + ".class_exponents"));
                layer.order_valuation = layer.class_group->order_valuation();
                if (entry.contains("order_valuation") &&
                    get_int(entry, "order_valuation", where) != layer.order_valuation)
                    throw ParseError(where + ": order_valuation contradicts class_exponents");
            } else if (entry.contains("order_valuation")) {
                layer.order_valuation = get_int(entry, "order_valuation", where);
            } else {
                throw ParseError(where + ": needs class_exponents or order_valuation");
            }
            if (entry.contains("b")) layer.b = get_int(entry, "b", where);
            inst.layers.push_back(std::move(layer));
        }
    }

    if (doc.contains("invariants")) {
        const json& inv = doc["invariants"];
        reject_unknown_keys(inv, {"lambda", "mu", "nu"}, "invariants");
        inst.invariants = FieldInstance::Invariants{get_int(inv, "lambda", "invariants"),
                                                    get_int(inv, "mu", "invariants"),
                                                    get_int(inv, "nu", "invariants")};
    }

    try {
        inst.validate();
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("instance invariant violated: ") + e.what());
    }
    return inst;
}

nlohmann::json emit_instance(const FieldInstance& inst) {
    json doc;  // nlohmann::json orders object keys, normalizing the layout
    doc["label"] = inst.label;
    doc["p"] = inst.p;
    doc["s_count"] = inst.s_count;
    json groups;
    groups["ck"] = inst.ck.exponents;
    groups["tk"] = inst.tk.exponents;
    groups["rk"] = inst.rk.exponents;
    groups["rk_nr"] = inst.rk_nr.exponents;
    if (inst.wk_exponents) groups["wk"] = *inst.wk_exponents;
    doc["groups"] = groups;
    if (!inst.layers.empty()) {
        json layers = json::array();
        for (const auto& layer : inst.layers) {
            json entry;
            entry["n"] = layer.n;
            if (layer.class_group)
                entry["class_exponents"] = layer.class_group->exponents;
            else
                entry["order_valuation"] = layer.order_valuation;
            if (layer.b) entry["b"] = *layer.b;
            layers.push_back(entry);
        }
        doc["layers"] = layers;
    }
    if (inst.invariants)
        doc["invariants"] = {{"lambda", inst.invariants->lambda},
                             {"mu", inst.invariants->mu},
                             {"nu", inst.invariants->nu}};
    return doc;
}

GModule parse_module(const std::string& path) {
    return parse_module_json(load_file(path));
}

GModule parse_module_json(const json& doc) {
    if (!doc.is_object()) throw ParseError("module document must be a JSON object");
    reject_unknown_keys(doc, {"p", "n", "exponents", "sigma", "metadata"}, "module");
    const i64 p = get_int(doc, "p", "module");
    const int n = get_int(doc, "n", "module");
    if (!doc.contains("exponents")) throw ParseError("missing key 'exponents' in module");
    if (!doc.contains("sigma")) throw ParseError("missing key 'sigma' in module");

    try {
        AbelianPGroup group(p, get_exponents(doc["exponents"], "exponents"));
        if (!doc["sigma"].is_array()) throw ParseError("'sigma' must be a matrix");
        Matrix sigma;
        for (const auto& row : doc["sigma"]) {
            if (!row.is_array()) throw ParseError("'sigma' must be a matrix of integers");
            std::vector<i64> r;
            for (const auto& v : row) {
                if (!v.is_number_integer()) throw ParseError("'sigma' entries must be integers");
                r.push_back(v.get<i64>());
            }
            sigma.push_back(std::move(r));
        }
        return GModule(group, PHom(group, group, std::move(sigma)), n);
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("invalid module: ") + e.what());
    }
}

}  // namespace greenberg
