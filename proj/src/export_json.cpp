#include <fstream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "reckg/error.hpp"
#include "reckg/export.hpp"

namespace reckg {

namespace {

using nlohmann::json;

constexpr std::string_view kFormat = "reckg-graph";
constexpr int kVersion = 1;

json id_json(const NodeId& id) { return json{{"ns", id.ns}, {"local", id.local}}; }

json node_json(const Node& n) {
    json j{{"id", id_json(n.id)}, {"kind", to_string(n.kind())}, {"label", n.label}};
    if (n.type.attribute) {
        j["class"] = n.type.attribute->key();
        j["value"] = n.value;
    }
    if (n.payload) j["payload"] = *n.payload;
    j["provenance"] = n.provenance;
    if (!n.aliases.empty()) j["aliases"] = n.aliases;
    if (!n.alternates.empty()) {
        json alts = json::array();
        for (const auto& a : n.alternates) alts.push_back({{"attribute", a.attribute}, {"value", a.value}, {"source", a.source}});
        j["alternates"] = std::move(alts);
    }
    return j;
}

json edge_json(const Edge& e) {
    json j{{"source", id_json(e.source)}, {"target", id_json(e.target)}, {"relation", e.relation}};
    if (e.behavior) j["behavior"] = to_string(*e.behavior);
    if (e.weight) j["weight"] = *e.weight;
    if (e.timestamp) j["timestamp"] = *e.timestamp;
    if (e.payload) j["payload"] = *e.payload;
    j["provenance"] = e.provenance;
    return j;
}

[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorCode::MalformedDocument, what); }

const json& member(const json& obj, const char* name) {
    if (!obj.is_object() || !obj.contains(name)) malformed(std::string("missing field '") + name + "'");
    return obj.at(name);
}

std::string string_member(const json& obj, const char* name) {
    const auto& v = member(obj, name);
    if (!v.is_string()) malformed(std::string("field '") + name + "' is not a string");
    return v.get<std::string>();
}

std::set<std::string> string_set(const json& obj, const char* name) {
    std::set<std::string> out;
    if (!obj.contains(name)) return out;
    const auto& arr = obj.at(name);
    if (!arr.is_array()) malformed(std::string("field '") + name + "' is not an array");
    for (const auto& v : arr) {
        if (!v.is_string()) malformed(std::string("field '") + name + "' holds a non-string");
        out.insert(v.get<std::string>());
    }
    return out;
}

NodeId parse_id(const json& j) { return {string_member(j, "ns"), string_member(j, "local")}; }

Node parse_node(const json& j) {
    Node n;
    n.id = parse_id(member(j, "id"));
    auto kind = string_member(j, "kind");
    n.label = string_member(j, "label");
    if (kind == "User") {
        n.type = NodeType::user();
    } else if (kind == "Item") {
        n.type = NodeType::item();
    } else if (kind == "AttributeValue") {
        auto cls = parse_attribute_key(string_member(j, "class"));
        if (!cls) malformed("unknown attribute class " + string_member(j, "class"));
        n.type = NodeType::value(*cls);
        n.value = string_member(j, "value");
    } else {
        malformed("unknown node kind " + kind);
    }
    if (j.contains("payload")) n.payload = string_member(j, "payload");
    n.provenance = string_set(j, "provenance");
    n.aliases = string_set(j, "aliases");
    if (j.contains("alternates")) {
        const auto& alts = j.at("alternates");
        if (!alts.is_array()) malformed("field 'alternates' is not an array");
        for (const auto& a : alts) {
            n.alternates.insert({string_member(a, "attribute"), string_member(a, "value"), string_member(a, "source")});
        }
    }
    return n;
}

Edge parse_edge(const json& j) {
    Edge e;
    e.source = parse_id(member(j, "source"));
    e.target = parse_id(member(j, "target"));
    e.relation = string_member(j, "relation");
    if (j.contains("behavior")) {
        auto b = parse_behavior(string_member(j, "behavior"));
        if (!b) malformed("unknown behavior " + string_member(j, "behavior"));
        e.behavior = *b;
    }
    if (j.contains("weight")) {
        if (!j.at("weight").is_number()) malformed("edge weight is not a number");
        e.weight = j.at("weight").get<double>();
    }
    if (j.contains("timestamp")) {
        if (!j.at("timestamp").is_number_integer()) malformed("edge timestamp is not an integer");
        e.timestamp = j.at("timestamp").get<std::int64_t>();
    }
    if (j.contains("payload")) e.payload = string_member(j, "payload");
    e.provenance = string_member(j, "provenance");
    return e;
}

SchemaRegistry parse_registry(const json& doc) {
    std::map<int, std::string> roles;
    for (const auto& r : member(doc, "producer_roles")) {
        const auto& index = member(r, "index");
        if (!index.is_number_integer()) malformed("producer role index is not an integer");
        roles[index.get<int>()] = string_member(r, "label");
    }
    std::vector<AttributeClass> classes;
    const auto& keys = member(doc, "classes");
    if (!keys.is_array()) malformed("field 'classes' is not an array");
    for (const auto& k : keys) {
        if (!k.is_string()) malformed("class key is not a string");
        auto cls = parse_attribute_key(k.get<std::string>());
        if (!cls) malformed("unknown attribute class " + k.get<std::string>());
        classes.push_back(*cls);
    }
    try {
        return SchemaRegistry::from_declarations(classes, std::move(roles));
    } catch (const Error& e) {
        malformed(std::string("inconsistent schema declarations: ") + e.what());
    }
}

}  // namespace

std::string export_graph_json(const KnowledgeGraph& g) {
    json roles = json::array();
    for (const auto& [index, label] : g.registry().producer_role_labels()) roles.push_back({{"index", index}, {"label", label}});
    json classes = json::array();
    for (const auto& cls : g.registry().attribute_classes()) classes.push_back(cls.key());
    json nodes = json::array();
    for (const auto& n : g.nodes()) nodes.push_back(node_json(n));
    json edges = json::array();
    for (const auto& e : g.edges()) edges.push_back(edge_json(e));

    json doc{{"format", kFormat},  {"version", kVersion}, {"producer_roles", std::move(roles)},
             {"classes", std::move(classes)}, {"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
    return doc.dump(1) + "\n";
}

std::size_t export_graph_json(const KnowledgeGraph& g, std::ostream& sink) {
    auto text = export_graph_json(g);
    sink << text;
    sink.flush();
    if (!sink) throw Error(ErrorCode::SinkWriteError, "graph sink rejected output");
    return text.size();
}

KnowledgeGraph import_graph_json(std::string_view document) {
    json doc;
    try {
        doc = json::parse(document.begin(), document.end());
    } catch (const json::exception& e) {
        malformed(e.what());
    }
    if (string_member(doc, "format") != kFormat) malformed("not a reckg-graph document");
    const auto& version = member(doc, "version");
    if (!version.is_number_integer()) malformed("version is not an integer");
    if (version.get<int>() != kVersion) {
        throw Error(ErrorCode::SchemaVersionMismatch, "document version " + version.dump() + ", expected " +
                                                          std::to_string(kVersion));
    }
    try {
        KnowledgeGraph g(parse_registry(doc));
        const auto& nodes = member(doc, "nodes");
        const auto& edges = member(doc, "edges");
        if (!nodes.is_array() || !edges.is_array()) malformed("nodes and edges must be arrays");
        for (const auto& n : nodes) g.insert_node_unchecked(parse_node(n));
        for (const auto& e : edges) g.insert_edge_unchecked(parse_edge(e));
        return g;
    } catch (const json::exception& e) {
        malformed(e.what());
    }
}

KnowledgeGraph load_graph_json(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::FileUnreadable, path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return import_graph_json(buf.str());
}

void save_graph_json(const KnowledgeGraph& g, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::SinkWriteError, "cannot open " + path.string());
    export_graph_json(g, out);
}

}  // namespace reckg
