#include <algorithm>
#include <ostream>

#include "reckg/error.hpp"
#include "reckg/export.hpp"

namespace reckg {

namespace {

bool unreserved(unsigned char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' || c == '.' ||
           c == '_' || c == '~';
}

std::string percent_encode(std::string_view s) {
    static constexpr char kHex[] = "0123456789ABCDEF";
    std::string out;
    for (unsigned char c : s) {
        if (unreserved(c)) {
            out += static_cast<char>(c);
        } else {
            out += '%';
            out += kHex[c >> 4];
            out += kHex[c & 0xF];
        }
    }
    return out;
}

std::string iri(const NodeId& id) { return "<reckg:" + percent_encode(id.ns) + "/" + percent_encode(id.local) + ">"; }

std::string literal(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    return out + "\"";
}

void node_lines(const Node& n, std::vector<std::string>& out) {
    auto subject = iri(n.id);
    auto line = [&](std::string_view property, std::string_view value) {
        out.push_back(subject + " <reckg:prop/" + std::string(property) + "> " + literal(value) + " .");
    };
    line("kind", to_string(n.kind()));
    line("label", n.label);
    if (n.type.attribute) {
        line("class", n.type.attribute->key());
        line("value", n.value);
    }
    if (n.payload) line("payload", *n.payload);
    for (const auto& p : n.provenance) line("provenance", p);
    for (const auto& a : n.aliases) line("alias", a);
    for (const auto& a : n.alternates) line("alternate", a.attribute + "=" + a.value + "@" + a.source);
}

}  // namespace

std::size_t triple_property_count(const Node& n) {
    std::vector<std::string> lines;
    node_lines(n, lines);
    return lines.size();
}

std::size_t export_triples(const KnowledgeGraph& g, std::ostream& sink) {
    std::vector<std::string> lines;
    for (const auto& n : g.nodes()) node_lines(n, lines);
    for (const auto& e : g.edges()) {
        lines.push_back(iri(e.source) + " <reckg:rel/" + percent_encode(e.relation) + "> " + iri(e.target) + " .");
    }
    std::sort(lines.begin(), lines.end());
    for (const auto& l : lines) sink << l << '\n';
    sink.flush();
    if (!sink) throw Error(ErrorCode::SinkWriteError, "triple sink rejected output");
    return lines.size();
}

}  // namespace reckg
