#pragma once
// Multi-hop analysis over a RecKG graph. Traversal treats every directed edge
// as usable in both directions; reverse steps render the inverse label.

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "reckg/graph.hpp"

namespace reckg {

enum class Direction { Forward, Backward };

struct PathStep {
    std::size_t edge = 0;  // index into the graph's edge list
    std::string relation;
    Direction direction = Direction::Forward;

    auto operator<=>(const PathStep&) const = default;
};

/// Simple path: nodes.size() == steps.size() + 1, no repeated node.
struct Path {
    std::vector<NodeId> nodes;
    std::vector<PathStep> steps;

    std::size_t length() const { return steps.size(); }
    auto operator<=>(const Path&) const = default;
};

/// Nodes within `k` hops of `start` (including it), optionally restricted to
/// one node kind. Throws UnknownNode.
std::set<NodeId> k_hop_neighbors(const KnowledgeGraph& g, const NodeId& start, std::size_t k,
                                 std::optional<NodeKind> kind_filter = {});

/// Every simple path from `from` to `to` of length 1..max_len, shortest first,
/// then by rendered (edge label, node label) sequence; at most `limit` paths.
/// A node is never a path to itself. Throws UnknownNode.
std::vector<Path> enumerate_paths(const KnowledgeGraph& g, const NodeId& from, const NodeId& to, std::size_t max_len,
                                  std::size_t limit);

struct Candidate {
    NodeId item;
    std::vector<Path> support;
};

/// Items reached from `user` by an interaction edge followed by attribute
/// hops, excluding items the user already interacted with. Ranked by number
/// of supporting paths, then by label. Throws NotAUserNode.
std::vector<Candidate> candidate_items(const KnowledgeGraph& g, const NodeId& user, std::size_t max_len = 3);

/// "ML_125610 —RELATED_ML→ Toy Story —PERFORMED_BY→ Tom Hanks ...".
/// Throws PathNotInGraph.
std::string explain_path(const Path& path, const KnowledgeGraph& g);

/// Edge-by-edge check that `path` is a simple path of `g`.
bool path_in_graph(const Path& path, const KnowledgeGraph& g);

}  // namespace reckg
