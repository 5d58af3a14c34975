#pragma once
// Shared fixtures, generators and brute-force oracles for the unit tests and
// the acceptance runner.

#include <cstdint>
#include <filesystem>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "reckg/graph.hpp"
#include "reckg/integrate.hpp"
#include "reckg/query.hpp"

namespace reckg::testing {

std::filesystem::path source_dir();
std::filesystem::path fixture_path(std::string_view relative);
std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view contents);

class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(std::string_view name) const { return path_ / std::string(name); }

private:
    std::filesystem::path path_;
};

using Rng = std::mt19937_64;

/// Valid graph with at most `max_nodes` nodes exercising every node and edge
/// property: producer roles, text payloads, aliases, alternates, weights,
/// timestamps, review bodies and awkward characters.
KnowledgeGraph random_graph(Rng& rng, std::size_t max_nodes = 12);

/// Item catalogue with users and interactions for merge tests. Titles and
/// years come from small pools so that matches and conflicts both occur.
KnowledgeGraph random_catalogue(Rng& rng, std::string_view tag);

// oracles ------------------------------------------------------------------------

/// (node sequence, edge sequence, direction sequence) of a path.
using PathSignature = std::tuple<std::vector<NodeId>, std::vector<std::size_t>, std::vector<Direction>>;

PathSignature signature(const Path& p);

/// Every simple path between two nodes by exhaustive search over the raw edge
/// list, no adjacency index involved.
std::set<PathSignature> brute_force_paths(const KnowledgeGraph& g, const NodeId& from, const NodeId& to,
                                          std::size_t max_len);

/// Nodes that end some simple path of length <= k from `start`.
std::set<NodeId> brute_force_k_hop(const KnowledgeGraph& g, const NodeId& start, std::size_t k);

/// Node count of the union of two graphs where matched items collapse and
/// attribute values with the same class (producer roles by label) and value
/// coincide. Matching is recomputed from scratch with the one-to-one rule.
std::size_t union_node_count_oracle(const KnowledgeGraph& base, const KnowledgeGraph& incoming,
                                    const ResolutionRule& rule);

// synthetic MovieLens-shaped data ----------------------------------------------

struct SyntheticMl {
    std::size_t users = 0;
    std::size_t items = 0;
    std::size_t ratings = 0;
};

/// Writes u.user, u.item and u.data in MovieLens 100k layout. Deterministic for
/// a given seed.
SyntheticMl write_synthetic_ml100k(const std::filesystem::path& dir, std::uint64_t seed = 100000,
                                   std::size_t users = 943, std::size_t items = 1682, std::size_t ratings = 100000);

std::string sha256_file(const std::filesystem::path& path);

}  // namespace reckg::testing
