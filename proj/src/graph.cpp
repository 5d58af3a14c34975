#include "reckg/graph.hpp"

#include <algorithm>

#include "reckg/error.hpp"
#include "reckg/text.hpp"

namespace reckg {

namespace {

constexpr std::string_view kAttributeNamespace = "RECKG";
constexpr std::size_t kTextLabelBytes = 60;

std::string describe_edge(const Edge& e) {
    return e.source.str() + " -" + e.relation + "-> " + e.target.str();
}

}  // namespace

std::optional<NodeId> NodeId::parse(std::string_view text) {
    auto pos = text.find(':');
    if (pos == std::string_view::npos || pos == 0 || pos + 1 == text.size()) return std::nullopt;
    return NodeId{std::string(text.substr(0, pos)), std::string(text.substr(pos + 1))};
}

std::string canonical_value(ValueKind kind, std::string_view raw) {
    switch (kind) {
        case ValueKind::Text:
        case ValueKind::ImageRef:
            return std::string(raw);
        case ValueKind::Categorical:
            return text::case_fold(text::collapse_whitespace(raw));
        default:
            return text::collapse_whitespace(raw);
    }
}

std::string display_label(const RelationKind& kind, const Edge& edge, bool forward) {
    std::string label = forward ? kind.forward_label : kind.inverse_label;
    if (kind.is_interaction() && !edge.provenance.empty()) label += "_" + edge.provenance;
    return label;
}

NodeId KnowledgeGraph::upsert_entity(NodeKind kind, const NodeId& id, std::string_view label,
                                     std::string_view provenance) {
    if (kind == NodeKind::AttributeValue) {
        throw Error(ErrorCode::SchemaViolation, "attribute values are created through upsert_attribute_value");
    }
    if (id.ns.empty() || id.local.empty()) throw Error(ErrorCode::EmptyValue, "node id parts must be nonempty");
    if (auto idx = node_index(id)) {
        auto& n = nodes_[*idx];
        if (n.type.kind != kind) {
            throw Error(ErrorCode::SchemaViolation, id.str() + " already exists as " + std::string(to_string(n.kind())));
        }
        if (n.label.empty() && !label.empty()) n.label = std::string(label);
        if (!provenance.empty()) n.provenance.emplace(provenance);
        return id;
    }
    Node n;
    n.id = id;
    n.type = {kind, std::nullopt};
    n.label = std::string(label);
    if (n.label.empty() && kind == NodeKind::User) n.label = id.ns + "_" + id.local;
    if (!provenance.empty()) n.provenance.emplace(provenance);
    push_node(std::move(n));
    return id;
}

NodeId KnowledgeGraph::upsert_attribute_value(const AttributeClass& cls, std::string_view raw_value,
                                              std::string_view provenance) {
    if (!registry_.contains(cls)) throw Error(ErrorCode::UnknownAttributeClass, cls.key());
    auto value = canonical_value(cls.value_kind, raw_value);
    if (text::trim(value).empty()) throw Error(ErrorCode::EmptyValue, "empty value for " + cls.key());

    if (auto it = attribute_index_.find({cls, value}); it != attribute_index_.end()) {
        if (!provenance.empty()) nodes_[*node_index(it->second)].provenance.emplace(provenance);
        return it->second;
    }

    Node n;
    n.type = NodeType::value(cls);
    n.value = value;
    bool is_text = cls.value_kind == ValueKind::Text || cls.value_kind == ValueKind::ImageRef;
    if (is_text) {
        n.label = text::ellipsize(text::collapse_whitespace(raw_value), kTextLabelBytes);
        n.payload = std::string(raw_value);
    } else {
        n.label = text::collapse_whitespace(raw_value);
    }
    if (!provenance.empty()) n.provenance.emplace(provenance);

    std::string local = cls.key() + ":" + value;
    NodeId id{std::string(kAttributeNamespace), local};
    for (int suffix = 2; index_.contains(id); ++suffix) id.local = local + "#" + std::to_string(suffix);
    n.id = id;
    push_node(std::move(n));
    return id;
}

std::pair<NodeId, bool> KnowledgeGraph::adopt_node(const Node& node) {
    auto fold = [&](std::size_t idx) {
        auto& n = nodes_[idx];
        n.provenance.insert(node.provenance.begin(), node.provenance.end());
        for (const auto& a : node.aliases) {
            if (a != n.label) n.aliases.insert(a);
        }
        n.alternates.insert(node.alternates.begin(), node.alternates.end());
    };

    if (node.kind() == NodeKind::AttributeValue) {
        if (!node.type.attribute || !registry_.contains(*node.type.attribute)) {
            throw Error(ErrorCode::UnknownAttributeClass, node.id.str());
        }
        if (auto existing = find_attribute_value(*node.type.attribute, node.value)) {
            fold(*node_index(*existing));
            return {*existing, false};
        }
        Node copy = node;
        for (int suffix = 2; index_.contains(copy.id); ++suffix) copy.id.local = node.id.local + "#" + std::to_string(suffix);
        auto id = copy.id;
        push_node(std::move(copy));
        return {id, true};
    }

    if (auto idx = node_index(node.id)) {
        if (nodes_[*idx].kind() != node.kind()) {
            throw Error(ErrorCode::SchemaViolation, node.id.str() + " exists with a different kind");
        }
        fold(*idx);
        return {node.id, false};
    }
    push_node(node);
    return {node.id, true};
}

AddResult KnowledgeGraph::add_edge(Edge edge) {
    auto src = node_index(edge.source);
    auto tgt = node_index(edge.target);
    if (!src || !tgt) throw Error(ErrorCode::DanglingEndpoint, describe_edge(edge));

    const auto* kind = registry_.find_relation(edge.relation);
    if (!kind) throw Error(ErrorCode::UnknownRelation, edge.relation);
    if (auto check = registry_.validate_edge_kind(edge.relation, nodes_[*src].type, nodes_[*tgt].type); !check) {
        throw Error(ErrorCode::SchemaViolation, check.violation);
    }
    if (kind->interaction_category) {
        if (!edge.behavior || !behavior_allowed(*kind->interaction_category, *edge.behavior)) {
            throw Error(ErrorCode::SchemaViolation, "behavior not allowed for " + kind->name);
        }
        if (*edge.behavior == Behavior::Dislike) {
            throw Error(ErrorCode::SchemaViolation, "negative feedback is not stored as an edge");
        }
    } else if (edge.behavior) {
        throw Error(ErrorCode::SchemaViolation, "attribute edges carry no behavior");
    }
    if (edge.payload && kind->interaction_category != InteractionCategory::Review) {
        throw Error(ErrorCode::SchemaViolation, "only review edges carry text");
    }

    auto [it, inserted] = edge_keys_.emplace(edge.source, edge.target, edge.relation, edge.behavior, edge.provenance);
    if (!inserted) return AddResult::Duplicate;
    edges_.push_back(std::move(edge));
    index_edge(edges_.size() - 1);
    return AddResult::Added;
}

void KnowledgeGraph::insert_node_unchecked(Node node) {
    if (index_.contains(node.id)) {
        // keep the first for lookups; the duplicate still shows up in validation
        nodes_.push_back(std::move(node));
        out_.emplace_back();
        in_.emplace_back();
        return;
    }
    push_node(std::move(node));
}

void KnowledgeGraph::insert_edge_unchecked(Edge edge) {
    edge_keys_.emplace(edge.source, edge.target, edge.relation, edge.behavior, edge.provenance);
    edges_.push_back(std::move(edge));
    index_edge(edges_.size() - 1);
}

void KnowledgeGraph::add_provenance(const NodeId& id, std::string_view tag) {
    if (!tag.empty()) mutable_node(id).provenance.emplace(tag);
}

void KnowledgeGraph::add_alias(const NodeId& id, std::string_view alias) {
    auto& n = mutable_node(id);
    if (!alias.empty() && alias != n.label) n.aliases.emplace(alias);
}

void KnowledgeGraph::add_alternate(const NodeId& id, Alternate alternate) {
    mutable_node(id).alternates.insert(std::move(alternate));
}

const Node* KnowledgeGraph::find_node(const NodeId& id) const {
    auto idx = node_index(id);
    return idx ? &nodes_[*idx] : nullptr;
}

const Node& KnowledgeGraph::node(const NodeId& id) const {
    if (const auto* n = find_node(id)) return *n;
    throw Error(ErrorCode::UnknownNode, id.str());
}

std::optional<std::size_t> KnowledgeGraph::node_index(const NodeId& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::optional<NodeId> KnowledgeGraph::find_attribute_value(const AttributeClass& cls,
                                                           std::string_view canonical) const {
    auto it = attribute_index_.find({cls, std::string(canonical)});
    if (it == attribute_index_.end()) return std::nullopt;
    return it->second;
}

bool KnowledgeGraph::has_edge(const Edge& edge) const {
    return edge_keys_.contains({edge.source, edge.target, edge.relation, edge.behavior, edge.provenance});
}

std::size_t KnowledgeGraph::count_nodes(NodeKind kind) const {
    return static_cast<std::size_t>(
        std::count_if(nodes_.begin(), nodes_.end(), [kind](const Node& n) { return n.kind() == kind; }));
}

std::size_t KnowledgeGraph::push_node(Node node) {
    auto idx = nodes_.size();
    index_.emplace(node.id, idx);
    if (node.kind() == NodeKind::AttributeValue && node.type.attribute) {
        attribute_index_.emplace(AttributeKey{*node.type.attribute, node.value}, node.id);
    }
    nodes_.push_back(std::move(node));
    out_.emplace_back();
    in_.emplace_back();
    return idx;
}

void KnowledgeGraph::index_edge(std::size_t edge_index) {
    const auto& e = edges_[edge_index];
    if (auto s = node_index(e.source)) out_[*s].push_back(edge_index);
    if (auto t = node_index(e.target)) in_[*t].push_back(edge_index);
}

Node& KnowledgeGraph::mutable_node(const NodeId& id) {
    auto idx = node_index(id);
    if (!idx) throw Error(ErrorCode::UnknownNode, id.str());
    return nodes_[*idx];
}

// validation -----------------------------------------------------------------

std::string_view to_string(ViolationKind kind) {
    switch (kind) {
        case ViolationKind::InvalidNodeId: return "InvalidNodeId";
        case ViolationKind::DuplicateNodeId: return "DuplicateNodeId";
        case ViolationKind::UnregisteredAttribute: return "UnregisteredAttribute";
        case ViolationKind::EmptyValue: return "EmptyValue";
        case ViolationKind::DuplicateAttributeValue: return "DuplicateAttributeValue";
        case ViolationKind::UnexpectedPayload: return "UnexpectedPayload";
        case ViolationKind::DanglingEndpoint: return "DanglingEndpoint";
        case ViolationKind::UnknownRelation: return "UnknownRelation";
        case ViolationKind::EndpointMismatch: return "EndpointMismatch";
        case ViolationKind::BehaviorMismatch: return "BehaviorMismatch";
        case ViolationKind::NegativeFeedback: return "NegativeFeedback";
        case ViolationKind::DuplicateEdge: return "DuplicateEdge";
    }
    return "?";
}

std::size_t ValidityReport::count(ViolationKind kind) const {
    return static_cast<std::size_t>(std::count_if(violations.begin(), violations.end(),
                                                  [kind](const Violation& v) { return v.kind == kind; }));
}

ValidityReport validate_graph(const KnowledgeGraph& g) {
    const auto& reg = g.registry();
    ValidityReport report;
    auto flag = [&](ViolationKind kind, std::string subject, std::string detail = {}) {
        report.violations.push_back({kind, std::move(subject), std::move(detail)});
    };

    std::map<NodeId, const Node*> by_id;
    std::map<std::pair<AttributeClass, std::string>, const Node*> by_value;
    for (const auto& n : g.nodes()) {
        auto subject = n.id.str();
        if (n.id.ns.empty() || n.id.local.empty()) flag(ViolationKind::InvalidNodeId, subject);
        if (!by_id.emplace(n.id, &n).second) flag(ViolationKind::DuplicateNodeId, subject);

        if (n.kind() != NodeKind::AttributeValue) {
            if (n.type.attribute) flag(ViolationKind::UnregisteredAttribute, subject, "entity node carries a class");
            if (n.payload) flag(ViolationKind::UnexpectedPayload, subject);
            continue;
        }
        if (!n.type.attribute || !reg.contains(*n.type.attribute)) {
            flag(ViolationKind::UnregisteredAttribute, subject, n.type.attribute ? n.type.attribute->key() : "");
            continue;
        }
        const auto& cls = *n.type.attribute;
        if (text::trim(n.value).empty()) flag(ViolationKind::EmptyValue, subject);
        if (canonical_value(cls.value_kind, n.value) != n.value) {
            flag(ViolationKind::EmptyValue, subject, "value is not in canonical form");
        }
        if (auto [it, fresh] = by_value.emplace(std::pair{cls, n.value}, &n); !fresh) {
            flag(ViolationKind::DuplicateAttributeValue, subject, cls.key() + "=" + n.value + " also on " +
                                                                      it->second->id.str());
        }
        bool text_like = cls.value_kind == ValueKind::Text || cls.value_kind == ValueKind::ImageRef;
        if (n.payload && !text_like) flag(ViolationKind::UnexpectedPayload, subject);
    }

    std::set<std::tuple<NodeId, NodeId, std::string, std::optional<Behavior>, std::string>> seen_edges;
    for (const auto& e : g.edges()) {
        auto subject = describe_edge(e);
        auto src = by_id.find(e.source);
        auto tgt = by_id.find(e.target);
        if (src == by_id.end() || tgt == by_id.end()) {
            flag(ViolationKind::DanglingEndpoint, subject);
            continue;
        }
        if (!seen_edges.emplace(e.source, e.target, e.relation, e.behavior, e.provenance).second) {
            flag(ViolationKind::DuplicateEdge, subject);
        }
        const auto* kind = reg.find_relation(e.relation);
        if (!kind) {
            flag(ViolationKind::UnknownRelation, subject);
            continue;
        }
        if (auto check = reg.validate_edge_kind(e.relation, src->second->type, tgt->second->type); !check) {
            flag(ViolationKind::EndpointMismatch, subject, check.violation);
        }
        if (kind->interaction_category) {
            if (!e.behavior || !behavior_allowed(*kind->interaction_category, *e.behavior)) {
                flag(ViolationKind::BehaviorMismatch, subject);
            } else if (*e.behavior == Behavior::Dislike) {
                flag(ViolationKind::NegativeFeedback, subject);
            }
            if (e.payload && *kind->interaction_category != InteractionCategory::Review) {
                flag(ViolationKind::UnexpectedPayload, subject);
            }
        } else {
            if (e.behavior) flag(ViolationKind::BehaviorMismatch, subject);
            if (e.payload) flag(ViolationKind::UnexpectedPayload, subject);
        }
    }

    std::sort(report.violations.begin(), report.violations.end());
    return report;
}

}  // namespace reckg
