#include <fstream>
#include <map>
#include <sstream>

#include "reckg/error.hpp"
#include "reckg/export.hpp"

namespace reckg {

namespace {

std::string field(std::string_view s) {
    if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string joined(const std::set<std::string>& values) {
    std::string out;
    for (const auto& v : values) {
        if (!out.empty()) out += ';';
        out += v;
    }
    return out;
}

std::string format_weight(double w) {
    std::ostringstream s;
    s.precision(17);
    s << w;
    return s.str();
}

struct Table {
    std::string header;
    std::vector<std::string> rows;
};

void write_file(const std::filesystem::path& path, const Table& t) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::SinkWriteError, "cannot open " + path.string());
    out << t.header << '\n';
    for (const auto& r : t.rows) out << r << '\n';
    out.flush();
    if (!out) throw Error(ErrorCode::SinkWriteError, "write failed: " + path.string());
}

std::string cypher_for(const std::string& file, const std::string& label, bool nodes) {
    if (nodes) {
        return "LOAD CSV WITH HEADERS FROM 'file:///" + file + "' AS row\nMERGE (n:" + label +
               " {id: row.`id:ID`})\nSET n.label = row.label, n.provenance = row.provenance;\n";
    }
    return "LOAD CSV WITH HEADERS FROM 'file:///" + file +
           "' AS row\nMATCH (s {id: row.`:START_ID`}), (t {id: row.`:END_ID`})\nMERGE (s)-[r:" + label +
           " {provenance: row.provenance}]->(t)\nSET r.behavior = row.behavior;\n";
}

}  // namespace

std::vector<ManifestEntry> export_graphdb_csv(const KnowledgeGraph& g, const std::filesystem::path& dir,
                                              const GraphDbOptions& options) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) throw Error(ErrorCode::SinkWriteError, "not a directory: " + dir.string());

    // ordered by file name so the manifest is stable
    std::map<std::string, Table> tables;
    tables["users.csv"].header = "id:ID,label,provenance,:LABEL";
    tables["items.csv"].header = "id:ID,label,aliases,alternates,provenance,:LABEL";
    std::map<std::string, std::string> type_of;  // file -> node label / relationship type for the cypher script

    for (const auto& n : g.nodes()) {
        auto prov = field(joined(n.provenance));
        switch (n.kind()) {
            case NodeKind::User:
                tables["users.csv"].rows.push_back(field(n.id.str()) + "," + field(n.label) + "," + prov + ",User");
                break;
            case NodeKind::Item: {
                std::set<std::string> alts;
                for (const auto& a : n.alternates) alts.insert(a.attribute + "=" + a.value + "@" + a.source);
                tables["items.csv"].rows.push_back(field(n.id.str()) + "," + field(n.label) + "," +
                                                   field(joined(n.aliases)) + "," + field(joined(alts)) + "," + prov +
                                                   ",Item");
                break;
            }
            case NodeKind::AttributeValue: {
                auto key = n.type.attribute ? n.type.attribute->key() : std::string("Unknown");
                auto file = "attr_" + key + ".csv";
                auto& t = tables[file];
                t.header = "id:ID,value,label,payload,provenance,:LABEL";
                type_of[file] = key;
                t.rows.push_back(field(n.id.str()) + "," + field(n.value) + "," + field(n.label) + "," +
                                 field(n.payload.value_or("")) + "," + prov + "," + field(key));
                break;
            }
        }
    }
    type_of["users.csv"] = "User";
    type_of["items.csv"] = "Item";

    for (const auto& e : g.edges()) {
        const auto* kind = g.registry().find_relation(e.relation);
        auto file = "rel_" + e.relation + ".csv";
        auto& t = tables[file];
        t.header = ":START_ID,:END_ID,:TYPE,behavior,weight:double,timestamp:long,payload,provenance";
        std::string type = kind ? display_label(*kind, e, true) : e.relation;
        type_of[file] = kind ? kind->forward_label : e.relation;
        t.rows.push_back(field(e.source.str()) + "," + field(e.target.str()) + "," + field(type) + "," +
                         (e.behavior ? std::string(to_string(*e.behavior)) : std::string()) + "," +
                         (e.weight ? format_weight(*e.weight) : std::string()) + "," +
                         (e.timestamp ? std::to_string(*e.timestamp) : std::string()) + "," +
                         field(e.payload.value_or("")) + "," + field(e.provenance));
    }

    std::vector<ManifestEntry> manifest;
    for (const auto& [file, table] : tables) {
        write_file(dir / file, table);
        manifest.push_back({file, table.rows.size()});
    }

    if (options.cypher) {
        std::ofstream out(dir / "import.cypher", std::ios::binary | std::ios::trunc);
        // nodes first so relationship MATCH clauses find their endpoints
        for (const auto& [file, table] : tables) {
            if (!file.starts_with("rel_")) out << cypher_for(file, type_of[file], true) << '\n';
        }
        for (const auto& [file, table] : tables) {
            if (file.starts_with("rel_")) out << cypher_for(file, type_of[file], false) << '\n';
        }
        out.flush();
        if (!out) throw Error(ErrorCode::SinkWriteError, "write failed: import.cypher");
    }

    std::ofstream mf(dir / "manifest.tsv", std::ios::binary | std::ios::trunc);
    mf << "file\trows\n";
    for (const auto& m : manifest) mf << m.file << '\t' << m.rows << '\n';
    mf.flush();
    if (!mf) throw Error(ErrorCode::SinkWriteError, "write failed: manifest.tsv");
    return manifest;
}

}  // namespace reckg
