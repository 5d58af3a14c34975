#pragma once
// Provenance-tagged property graph over users, items and deduplicated
// attribute-value nodes. Graphs are built by a single writer and treated as
// immutable afterwards.

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "reckg/schema.hpp"

namespace reckg {

struct NodeId {
    std::string ns;
    std::string local;

    /// "ns:local"
    std::string str() const { return ns + ":" + local; }
    /// Splits at the first ':'; nullopt when either part would be empty.
    static std::optional<NodeId> parse(std::string_view text);

    auto operator<=>(const NodeId&) const = default;
};

/// Incoming scalar value that lost to the base value during a merge.
struct Alternate {
    std::string attribute;  // class key
    std::string value;
    std::string source;

    auto operator<=>(const Alternate&) const = default;
};

struct Node {
    NodeId id;
    NodeType type;
    std::string label;
    std::string value;  // canonical value, AttributeValue nodes only
    std::optional<std::string> payload;
    std::set<std::string> provenance;
    std::set<std::string> aliases;
    std::set<Alternate> alternates;

    NodeKind kind() const { return type.kind; }
};

struct Edge {
    NodeId source;
    NodeId target;
    std::string relation;
    std::optional<Behavior> behavior;
    std::optional<double> weight;
    std::optional<std::int64_t> timestamp;
    std::optional<std::string> payload;  // review body
    std::string provenance;

    /// Identity used for duplicate detection.
    auto key() const { return std::tie(source, target, relation, behavior, provenance); }
};

enum class AddResult { Added, Duplicate };

/// Canonical form of an attribute value: verbatim for Text/ImageRef, otherwise
/// trimmed with internal whitespace collapsed, and case-folded for Categorical.
std::string canonical_value(ValueKind kind, std::string_view raw);

/// Display label an interaction edge gets when rendered ("RELATED_ML").
std::string display_label(const RelationKind& kind, const Edge& edge, bool forward);

class KnowledgeGraph {
public:
    KnowledgeGraph() = default;
    explicit KnowledgeGraph(SchemaRegistry registry) : registry_(std::move(registry)) {}

    const SchemaRegistry& registry() const { return registry_; }

    /// Creates a user/item node or merges provenance into the existing one.
    /// An empty label keeps the current label (users default to "ns_local").
    NodeId upsert_entity(NodeKind kind, const NodeId& id, std::string_view label, std::string_view provenance);

    /// Returns the node for (class, canonical(raw_value)), creating it if absent.
    /// Throws EmptyValue when the canonical form is empty.
    NodeId upsert_attribute_value(const AttributeClass& cls, std::string_view raw_value,
                                  std::string_view provenance = {});

    /// Inserts a copy of a node from another graph, or folds it into the node it
    /// deduplicates against: same (class, value) for attribute values, same id
    /// for users and items. Provenance, aliases and alternates are unioned.
    /// Returns the id in this graph and whether a node was created.
    std::pair<NodeId, bool> adopt_node(const Node& node);

    /// Throws DanglingEndpoint or SchemaViolation; Duplicate leaves the graph unchanged.
    AddResult add_edge(Edge edge);

    // Unchecked insertion for importers and hand-built fixtures; validate_graph
    // reports whatever these let through.
    void insert_node_unchecked(Node node);
    void insert_edge_unchecked(Edge edge);

    void add_provenance(const NodeId& id, std::string_view tag);
    void add_alias(const NodeId& id, std::string_view alias);
    void add_alternate(const NodeId& id, Alternate alternate);

    const Node* find_node(const NodeId& id) const;
    /// Throws UnknownNode.
    const Node& node(const NodeId& id) const;
    std::optional<std::size_t> node_index(const NodeId& id) const;
    std::optional<NodeId> find_attribute_value(const AttributeClass& cls, std::string_view canonical) const;
    bool has_edge(const Edge& edge) const;

    std::span<const Node> nodes() const { return nodes_; }
    std::span<const Edge> edges() const { return edges_; }
    std::span<const std::size_t> out_edges(std::size_t node_index) const { return out_[node_index]; }
    std::span<const std::size_t> in_edges(std::size_t node_index) const { return in_[node_index]; }

    std::size_t node_count() const { return nodes_.size(); }
    std::size_t edge_count() const { return edges_.size(); }
    std::size_t count_nodes(NodeKind kind) const;

private:
    using EdgeKey = std::tuple<NodeId, NodeId, std::string, std::optional<Behavior>, std::string>;
    using AttributeKey = std::pair<AttributeClass, std::string>;

    std::size_t push_node(Node node);
    void index_edge(std::size_t edge_index);
    Node& mutable_node(const NodeId& id);

    SchemaRegistry registry_;
    std::vector<Node> nodes_;
    std::vector<Edge> edges_;
    std::map<NodeId, std::size_t> index_;
    std::map<AttributeKey, NodeId> attribute_index_;
    std::set<EdgeKey> edge_keys_;
    std::vector<std::vector<std::size_t>> out_;
    std::vector<std::vector<std::size_t>> in_;
};

enum class ViolationKind {
    InvalidNodeId,
    DuplicateNodeId,
    UnregisteredAttribute,
    EmptyValue,
    DuplicateAttributeValue,
    UnexpectedPayload,
    DanglingEndpoint,
    UnknownRelation,
    EndpointMismatch,
    BehaviorMismatch,
    NegativeFeedback,
    DuplicateEdge,
};

std::string_view to_string(ViolationKind kind);

struct Violation {
    ViolationKind kind;
    std::string subject;  // node id or edge rendering
    std::string detail;

    auto operator<=>(const Violation&) const = default;
};

struct ValidityReport {
    std::vector<Violation> violations;  // sorted

    bool ok() const { return violations.empty(); }
    std::size_t count(ViolationKind kind) const;
};

ValidityReport validate_graph(const KnowledgeGraph& g);

struct IsomorphismOptions {
    bool compare_provenance = true;
    /// Largest set of nodes left indistinguishable by refinement that is
    /// still searched exhaustively.
    std::size_t exhaustive_bound = 12;
};

/// Labeled isomorphism: a bijection preserving node kind, class, canonical
/// value, label, payload, aliases, alternates and every edge with all its
/// properties. Node ids need not match. Uses colour refinement to a fixpoint
/// followed by backtracking over nodes refinement could not separate. Throws
/// AmbiguityTooLarge when that set exceeds the exhaustive bound.
bool graphs_isomorphic_labeled(const KnowledgeGraph& a, const KnowledgeGraph& b,
                               const IsomorphismOptions& options = {});

}  // namespace reckg
