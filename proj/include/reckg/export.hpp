#pragma once
// Interchange formats for RecKG graphs and the five-characteristic report.
// Every exporter is deterministic: the same graph yields the same bytes.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "reckg/graph.hpp"

namespace reckg {

/// N-Triples-style lines: one per edge and one per node property, sorted
/// bytewise. Returns the number of lines written. Throws SinkWriteError.
std::size_t export_triples(const KnowledgeGraph& g, std::ostream& sink);

/// Number of property lines a node contributes to the triple export.
std::size_t triple_property_count(const Node& n);

struct ManifestEntry {
    std::string file;
    std::size_t rows = 0;  // data rows, header excluded
};

struct GraphDbOptions {
    bool cypher = false;  // also write import.cypher
};

/// Bulk-import CSV: users.csv, items.csv, attr_<Class>.csv per attribute
/// class in use, rel_<relation>.csv per relation in use, and manifest.tsv.
/// Returns the manifest. Throws SinkWriteError.
std::vector<ManifestEntry> export_graphdb_csv(const KnowledgeGraph& g, const std::filesystem::path& dir,
                                              const GraphDbOptions& options = {});

/// Lossless JSON form. Returns the number of bytes written. Throws SinkWriteError.
std::size_t export_graph_json(const KnowledgeGraph& g, std::ostream& sink);
std::string export_graph_json(const KnowledgeGraph& g);

/// Throws SchemaVersionMismatch or MalformedDocument.
KnowledgeGraph import_graph_json(std::string_view document);
KnowledgeGraph load_graph_json(const std::filesystem::path& path);
void save_graph_json(const KnowledgeGraph& g, const std::filesystem::path& path);

enum class Consideration { NotConsidered, PartiallyConsidered, Considered };

std::string_view to_string(Consideration c);

struct CharacteristicsReport {
    Consideration user_attribute = Consideration::NotConsidered;
    Consideration item_attribute = Consideration::NotConsidered;
    Consideration interaction = Consideration::NotConsidered;
    Consideration consistency = Consideration::NotConsidered;
    Consideration interoperability = Consideration::NotConsidered;

    bool operator==(const CharacteristicsReport&) const = default;
};

CharacteristicsReport characteristics_report(const KnowledgeGraph& g);

/// Five "name<TAB>value" lines.
std::string format_characteristics(const CharacteristicsReport& r);

}  // namespace reckg
