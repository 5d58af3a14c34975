#pragma once
// Item entity resolution between two RecKG graphs and the merge that folds an
// incoming graph into a base graph.

#include <string>
#include <string_view>
#include <vector>

#include "reckg/graph.hpp"

namespace reckg {

struct TitleNormalization {
    bool case_fold = true;
    bool trim = true;
    bool collapse_whitespace = true;
    /// Drops a leading "the"/"a"/"an" and the catalogue form ", The" at the end.
    bool strip_article = false;
};

std::string normalize_title(std::string_view raw, const TitleNormalization& flags = {});

enum class MatchKey { Title, ReleaseYear };

struct ResolutionRule {
    std::vector<MatchKey> match_keys{MatchKey::Title, MatchKey::ReleaseYear};
    TitleNormalization title;
    int year_tolerance = 0;

    void validate() const;
};

struct ItemMatch {
    NodeId base;
    NodeId incoming;
    std::string key;
};

struct ResolutionConflict {
    NodeId incoming;
    std::vector<NodeId> candidates;
    std::string key;
};

struct MergeStats {
    std::size_t matched_items = 0;
    std::size_t attribute_values_unified = 0;
    std::size_t entities_unified = 0;  // users/items whose id already existed in the base
    std::size_t nodes_added = 0;
    std::size_t edges_added = 0;
    std::size_t edges_unified = 0;  // attribute edges the base already had
    std::size_t alternates_recorded = 0;
};

struct ResolutionReport {
    std::vector<ItemMatch> matches;
    std::vector<ResolutionConflict> conflicts;
    std::size_t unmatched_incoming = 0;
    MergeStats stats;  // filled in by merge_graphs
};

/// One-to-one matches between base and incoming items whose keys agree.
/// Incoming items with several candidates, and base items claimed by several
/// incoming items, are reported as conflicts and left unmatched. Throws
/// MissingMatchKey when a non-empty item set lacks a key attribute entirely.
ResolutionReport resolve_items(const KnowledgeGraph& base, const KnowledgeGraph& incoming, const ResolutionRule& rule);

struct MergeResult {
    KnowledgeGraph graph;
    MergeStats stats;
};

/// Folds `incoming` into a copy of `base`. Matched items collapse onto the base
/// node (base id and label survive, the incoming label becomes an alias),
/// attribute values deduplicate, and everything else is added under its own
/// namespace. Throws StaleReport when the report names absent items.
MergeResult merge_graphs(const KnowledgeGraph& base, const KnowledgeGraph& incoming, const ResolutionReport& report);

/// Line-oriented audit form of a resolution report.
std::string format_resolution_report(const ResolutionReport& report);

}  // namespace reckg
