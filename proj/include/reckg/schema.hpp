#pragma once
// RecKG ontology: the closed set of user/item attribute classes, the relation
// kinds linking them, and the endpoint rules every graph edge must satisfy.

#include <compare>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace reckg {

enum class Owner { User, Item };

enum class ValueKind { Categorical, Text, ImageRef, GeoRef, BinnedNumeric, Date };

enum class AttributeName {
    // user-owned
    Age,
    Gender,
    Residence,
    Occupation,
    // item-owned
    Performer,
    Producer,
    Type,
    Description,
    ItemImage,
    Location,
    Price,
    ReleaseDate,
};

std::string_view to_string(Owner owner);
std::string_view to_string(ValueKind kind);
std::string_view to_string(AttributeName name);
std::optional<AttributeName> parse_attribute_name(std::string_view text);

Owner owner_of(AttributeName name);
ValueKind value_kind_of(AttributeName name);

struct AttributeClass {
    AttributeName name = AttributeName::Age;
    Owner owner = Owner::User;
    ValueKind value_kind = ValueKind::BinnedNumeric;
    std::optional<int> role_index;  // Producer only, 1-based

    /// Machine key: "Performer", "Producer_2", ...
    std::string key() const;

    /// Scalar classes hold one value per owner node (merge keeps the base value).
    bool single_valued() const;

    bool operator==(const AttributeClass& other) const {
        return name == other.name && role_index == other.role_index;
    }
    std::strong_ordering operator<=>(const AttributeClass& other) const {
        if (auto c = name <=> other.name; c != 0) return c;
        return role_index.value_or(0) <=> other.role_index.value_or(0);
    }
};

AttributeClass make_attribute_class(AttributeName name, std::optional<int> role_index = {});

/// Parses a class key as produced by AttributeClass::key().
std::optional<AttributeClass> parse_attribute_key(std::string_view key);

enum class NodeKind { User, Item, AttributeValue };

std::string_view to_string(NodeKind kind);

/// Node kind refined by attribute class for AttributeValue nodes.
struct NodeType {
    NodeKind kind = NodeKind::User;
    std::optional<AttributeClass> attribute;

    static NodeType user() { return {NodeKind::User, std::nullopt}; }
    static NodeType item() { return {NodeKind::Item, std::nullopt}; }
    static NodeType value(const AttributeClass& cls) { return {NodeKind::AttributeValue, cls}; }

    std::string describe() const;
    bool operator==(const NodeType&) const = default;
};

enum class InteractionCategory { Explicit, Implicit, SavedItems, Review };

enum class Behavior {
    Rating,
    Like,
    Neutral,
    Dislike,
    Click,
    Purchase,
    Bookmark,
    Cart,
    Favorite,
    Playlist,
    Comment,
    Review,
    Tip,
};

std::string_view to_string(InteractionCategory category);
std::string_view to_string(Behavior behavior);
std::optional<InteractionCategory> parse_interaction_category(std::string_view text);
std::optional<Behavior> parse_behavior(std::string_view text);

/// Behaviors allowed for an interaction category (one row group of the
/// interaction table).
std::span<const Behavior> behaviors_for(InteractionCategory category);
bool behavior_allowed(InteractionCategory category, Behavior behavior);

struct RelationKind {
    std::string name;           // camelCase identifier
    std::string forward_label;  // UPPER_SNAKE display label
    std::string inverse_label;
    NodeType source;
    NodeType target;
    std::optional<InteractionCategory> interaction_category;

    bool is_interaction() const { return interaction_category.has_value(); }
};

struct EdgeKindCheck {
    bool valid = true;
    std::string violation;

    explicit operator bool() const { return valid; }
};

/// Maps source-dataset column names to attribute classes. One table per
/// mapping configuration.
class AttributeBindings {
public:
    void bind(std::string_view raw_name, const AttributeClass& cls);

    /// Class bound to `raw_name` for `owner`, or nullopt when unbound.
    /// A role hint of the form "producer role N" selects among Producer roles.
    /// Throws AmbiguousBinding if the name resolves to more than one class.
    std::optional<AttributeClass> canonical_attribute(std::string_view raw_name, Owner owner,
                                                      std::optional<std::string_view> role_hint = {}) const;

    bool empty() const { return bindings_.empty(); }

private:
    std::map<std::string, std::vector<AttributeClass>, std::less<>> bindings_;
};

class SchemaRegistry {
public:
    /// Compiled-in RecKG declarations with no producer roles.
    SchemaRegistry();

    /// Builds a registry from explicit class declarations. Declaration order
    /// does not matter; Producer classes must carry contiguous role indices
    /// covering `role_labels`.
    static SchemaRegistry from_declarations(std::span<const AttributeClass> classes,
                                            std::map<int, std::string> role_labels);

    const std::vector<AttributeClass>& attribute_classes() const { return classes_; }
    const std::vector<RelationKind>& relation_kinds() const { return relations_; }
    const std::map<int, std::string>& producer_role_labels() const { return role_labels_; }
    int producer_role_count() const { return static_cast<int>(role_labels_.size()); }

    AttributeClass register_producer_role(std::string_view role_label);
    std::optional<AttributeClass> producer_role(std::string_view role_label) const;

    bool contains(const AttributeClass& cls) const;

    const RelationKind* find_relation(std::string_view name) const;
    /// Throws UnknownRelation.
    const RelationKind& relation(std::string_view name) const;
    const RelationKind& attribute_relation(const AttributeClass& cls) const;
    const RelationKind& interaction_relation(InteractionCategory category) const;

    /// Throws UnknownRelation when `relation_name` is not registered.
    EdgeKindCheck validate_edge_kind(std::string_view relation_name, const NodeType& source,
                                     const NodeType& target) const;

    bool operator==(const SchemaRegistry& other) const;

private:
    void rebuild_relations();

    std::vector<AttributeClass> classes_;
    std::vector<RelationKind> relations_;
    std::map<int, std::string> role_labels_;
};

/// Relation name linking an owner to values of `cls` ("performedBy", "producedBy_2").
std::string attribute_relation_name(const AttributeClass& cls);

}  // namespace reckg
