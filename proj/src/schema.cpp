#include "reckg/schema.hpp"

#include <algorithm>
#include <array>
#include <set>

#include "reckg/error.hpp"
#include "reckg/text.hpp"

namespace reckg {

namespace {

struct AttributeInfo {
    AttributeName name;
    std::string_view id;
    Owner owner;
    ValueKind kind;
    std::string_view relation;
    std::string_view forward;
    std::string_view inverse;
};

// Labels other than PERFORMED_BY/PERFORMED and PRODUCED_BY/PRODUCED are local choices.
constexpr std::array<AttributeInfo, 12> kAttributes{{
    {AttributeName::Age, "Age", Owner::User, ValueKind::BinnedNumeric, "hasAge", "HAS_AGE", "AGE_OF"},
    {AttributeName::Gender, "Gender", Owner::User, ValueKind::Categorical, "hasGender", "HAS_GENDER", "GENDER_OF"},
    {AttributeName::Residence, "Residence", Owner::User, ValueKind::GeoRef, "residesIn", "RESIDES_IN",
     "RESIDENCE_OF"},
    {AttributeName::Occupation, "Occupation", Owner::User, ValueKind::Categorical, "hasOccupation",
     "HAS_OCCUPATION", "OCCUPATION_OF"},
    {AttributeName::Performer, "Performer", Owner::Item, ValueKind::Categorical, "performedBy", "PERFORMED_BY",
     "PERFORMED"},
    {AttributeName::Producer, "Producer", Owner::Item, ValueKind::Categorical, "producedBy", "PRODUCED_BY",
     "PRODUCED"},
    {AttributeName::Type, "Type", Owner::Item, ValueKind::Categorical, "hasType", "HAS_TYPE", "TYPE_OF"},
    {AttributeName::Description, "Description", Owner::Item, ValueKind::Text, "describedBy", "DESCRIBED_BY",
     "DESCRIBES"},
    {AttributeName::ItemImage, "ItemImage", Owner::Item, ValueKind::ImageRef, "depictedBy", "DEPICTED_BY",
     "DEPICTS"},
    {AttributeName::Location, "Location", Owner::Item, ValueKind::GeoRef, "locatedIn", "LOCATED_IN",
     "LOCATION_OF"},
    {AttributeName::Price, "Price", Owner::Item, ValueKind::BinnedNumeric, "pricedAt", "PRICED_AT", "PRICE_OF"},
    {AttributeName::ReleaseDate, "ReleaseDate", Owner::Item, ValueKind::Date, "releasedOn", "RELEASED_ON",
     "RELEASE_OF"},
}};

const AttributeInfo& info(AttributeName name) {
    return kAttributes[static_cast<std::size_t>(name)];
}

struct InteractionInfo {
    InteractionCategory category;
    std::string_view id;
    std::string_view relation;
    std::string_view forward;
    std::string_view inverse;
};

constexpr std::array<InteractionInfo, 4> kInteractions{{
    {InteractionCategory::Explicit, "Explicit", "explicitInteraction", "RELATED", "RELATED_BY"},
    {InteractionCategory::Implicit, "Implicit", "implicitInteraction", "INTERACTED", "INTERACTED_BY"},
    {InteractionCategory::SavedItems, "SavedItems", "savedItems", "SAVED", "SAVED_BY"},
    {InteractionCategory::Review, "Review", "review", "REVIEWED", "REVIEWED_BY"},
}};

constexpr std::array<std::string_view, 13> kBehaviorNames{
    "Rating", "Like", "Neutral", "Dislike", "Click", "Purchase", "Bookmark",
    "Cart",   "Favorite", "Playlist", "Comment", "Review", "Tip"};

constexpr std::array kExplicitBehaviors{Behavior::Rating, Behavior::Like, Behavior::Neutral, Behavior::Dislike};
constexpr std::array kImplicitBehaviors{Behavior::Click, Behavior::Purchase};
constexpr std::array kSavedBehaviors{Behavior::Bookmark, Behavior::Cart, Behavior::Favorite, Behavior::Playlist};
constexpr std::array kReviewBehaviors{Behavior::Comment, Behavior::Review, Behavior::Tip};

std::vector<AttributeClass> default_classes() {
    std::vector<AttributeClass> classes;
    for (const auto& a : kAttributes) {
        if (a.name != AttributeName::Producer) classes.push_back(make_attribute_class(a.name));
    }
    return classes;
}

std::optional<int> parse_role_hint(std::string_view hint) {
    // "producer role N" (case-insensitive) or a bare integer
    auto folded = text::case_fold(text::collapse_whitespace(hint));
    std::string_view rest = folded;
    constexpr std::string_view prefix = "producer role ";
    if (rest.starts_with(prefix)) rest.remove_prefix(prefix.size());
    auto n = text::parse_int(rest);
    if (!n || *n < 1) return std::nullopt;
    return static_cast<int>(*n);
}

}  // namespace

std::string_view to_string(Owner owner) {
    return owner == Owner::User ? "User" : "Item";
}

std::string_view to_string(ValueKind kind) {
    switch (kind) {
        case ValueKind::Categorical: return "Categorical";
        case ValueKind::Text: return "Text";
        case ValueKind::ImageRef: return "ImageRef";
        case ValueKind::GeoRef: return "GeoRef";
        case ValueKind::BinnedNumeric: return "BinnedNumeric";
        case ValueKind::Date: return "Date";
    }
    return "?";
}

std::string_view to_string(AttributeName name) {
    return info(name).id;
}

std::optional<AttributeName> parse_attribute_name(std::string_view text) {
    for (const auto& a : kAttributes) {
        if (a.id == text) return a.name;
    }
    return std::nullopt;
}

Owner owner_of(AttributeName name) {
    return info(name).owner;
}

ValueKind value_kind_of(AttributeName name) {
    return info(name).kind;
}

std::string AttributeClass::key() const {
    std::string k(to_string(name));
    if (role_index) k += "_" + std::to_string(*role_index);
    return k;
}

bool AttributeClass::single_valued() const {
    return name == AttributeName::ReleaseDate || name == AttributeName::Price || name == AttributeName::Age ||
           name == AttributeName::Gender;
}

AttributeClass make_attribute_class(AttributeName name, std::optional<int> role_index) {
    AttributeClass cls;
    cls.name = name;
    cls.owner = owner_of(name);
    cls.value_kind = value_kind_of(name);
    if (name == AttributeName::Producer) cls.role_index = role_index.value_or(1);
    return cls;
}

std::optional<AttributeClass> parse_attribute_key(std::string_view key) {
    if (auto name = parse_attribute_name(key); name && *name != AttributeName::Producer) {
        return make_attribute_class(*name);
    }
    constexpr std::string_view prefix = "Producer_";
    if (key.starts_with(prefix)) {
        auto n = text::parse_int(key.substr(prefix.size()));
        if (n && *n >= 1) return make_attribute_class(AttributeName::Producer, static_cast<int>(*n));
    }
    return std::nullopt;
}

std::string_view to_string(NodeKind kind) {
    switch (kind) {
        case NodeKind::User: return "User";
        case NodeKind::Item: return "Item";
        case NodeKind::AttributeValue: return "AttributeValue";
    }
    return "?";
}

std::string NodeType::describe() const {
    std::string s(to_string(kind));
    if (attribute) s += ":" + attribute->key();
    return s;
}

std::string_view to_string(InteractionCategory category) {
    return kInteractions[static_cast<std::size_t>(category)].id;
}

std::string_view to_string(Behavior behavior) {
    return kBehaviorNames[static_cast<std::size_t>(behavior)];
}

std::optional<InteractionCategory> parse_interaction_category(std::string_view text) {
    for (const auto& i : kInteractions) {
        if (i.id == text) return i.category;
    }
    return std::nullopt;
}

std::optional<Behavior> parse_behavior(std::string_view text) {
    for (std::size_t i = 0; i < kBehaviorNames.size(); ++i) {
        if (kBehaviorNames[i] == text) return static_cast<Behavior>(i);
    }
    return std::nullopt;
}

std::span<const Behavior> behaviors_for(InteractionCategory category) {
    switch (category) {
        case InteractionCategory::Explicit: return kExplicitBehaviors;
        case InteractionCategory::Implicit: return kImplicitBehaviors;
        case InteractionCategory::SavedItems: return kSavedBehaviors;
        case InteractionCategory::Review: return kReviewBehaviors;
    }
    return {};
}

bool behavior_allowed(InteractionCategory category, Behavior behavior) {
    auto allowed = behaviors_for(category);
    return std::find(allowed.begin(), allowed.end(), behavior) != allowed.end();
}

std::string attribute_relation_name(const AttributeClass& cls) {
    std::string name(info(cls.name).relation);
    if (cls.role_index) name += "_" + std::to_string(*cls.role_index);
    return name;
}

// AttributeBindings ----------------------------------------------------------

void AttributeBindings::bind(std::string_view raw_name, const AttributeClass& cls) {
    auto& classes = bindings_[text::case_fold(text::collapse_whitespace(raw_name))];
    if (std::find(classes.begin(), classes.end(), cls) == classes.end()) classes.push_back(cls);
}

std::optional<AttributeClass> AttributeBindings::canonical_attribute(std::string_view raw_name, Owner owner,
                                                                     std::optional<std::string_view> role_hint) const {
    auto key = text::case_fold(text::collapse_whitespace(raw_name));
    if (key.empty()) throw Error(ErrorCode::NoMapping, "empty source column name");
    auto it = bindings_.find(key);
    if (it == bindings_.end()) return std::nullopt;

    std::vector<AttributeClass> candidates;
    for (const auto& cls : it->second) {
        if (cls.owner == owner) candidates.push_back(cls);
    }
    if (role_hint) {
        if (auto role = parse_role_hint(*role_hint)) {
            std::erase_if(candidates, [&](const AttributeClass& c) {
                return c.name == AttributeName::Producer && c.role_index != role;
            });
        }
    }
    if (candidates.empty()) return std::nullopt;
    if (candidates.size() > 1) {
        std::string names;
        for (const auto& c : candidates) names += (names.empty() ? "" : ", ") + c.key();
        throw Error(ErrorCode::AmbiguousBinding, "column '" + std::string(raw_name) + "' is bound to " + names);
    }
    return candidates.front();
}

// SchemaRegistry -------------------------------------------------------------

SchemaRegistry::SchemaRegistry() : classes_(default_classes()) {
    std::sort(classes_.begin(), classes_.end());
    rebuild_relations();
}

SchemaRegistry SchemaRegistry::from_declarations(std::span<const AttributeClass> classes,
                                                 std::map<int, std::string> role_labels) {
    SchemaRegistry reg;
    reg.classes_.clear();
    std::set<AttributeClass> seen;
    for (auto cls : classes) {
        // owner/value kind are determined by the name; normalize them
        cls = make_attribute_class(cls.name, cls.role_index);
        if (!seen.insert(cls).second) {
            throw Error(ErrorCode::SchemaViolation, "attribute class declared twice: " + cls.key());
        }
        if (cls.name == AttributeName::Producer && !role_labels.contains(*cls.role_index)) {
            throw Error(ErrorCode::SchemaViolation, "producer role without label: " + cls.key());
        }
        reg.classes_.push_back(cls);
    }
    int expected = 1;
    for (const auto& [index, label] : role_labels) {
        if (index != expected++ || label.empty()) {
            throw Error(ErrorCode::SchemaViolation, "producer roles must be labelled and contiguous from 1");
        }
        if (!seen.contains(make_attribute_class(AttributeName::Producer, index))) {
            throw Error(ErrorCode::SchemaViolation, "role label without Producer class: " + label);
        }
    }
    std::sort(reg.classes_.begin(), reg.classes_.end());
    reg.role_labels_ = std::move(role_labels);
    reg.rebuild_relations();
    return reg;
}

AttributeClass SchemaRegistry::register_producer_role(std::string_view role_label) {
    auto label = text::collapse_whitespace(role_label);
    if (label.empty()) throw Error(ErrorCode::EmptyValue, "producer role label is empty");
    if (producer_role(label)) throw Error(ErrorCode::DuplicateRole, "producer role already registered: " + label);
    int index = producer_role_count() + 1;
    role_labels_.emplace(index, label);
    auto cls = make_attribute_class(AttributeName::Producer, index);
    classes_.insert(std::upper_bound(classes_.begin(), classes_.end(), cls), cls);
    rebuild_relations();
    return cls;
}

std::optional<AttributeClass> SchemaRegistry::producer_role(std::string_view role_label) const {
    for (const auto& [index, label] : role_labels_) {
        if (text::iequals(label, text::collapse_whitespace(role_label))) {
            return make_attribute_class(AttributeName::Producer, index);
        }
    }
    return std::nullopt;
}

bool SchemaRegistry::contains(const AttributeClass& cls) const {
    return std::binary_search(classes_.begin(), classes_.end(), cls);
}

const RelationKind* SchemaRegistry::find_relation(std::string_view name) const {
    for (const auto& r : relations_) {
        if (r.name == name) return &r;
    }
    return nullptr;
}

const RelationKind& SchemaRegistry::relation(std::string_view name) const {
    if (const auto* r = find_relation(name)) return *r;
    throw Error(ErrorCode::UnknownRelation, std::string(name));
}

const RelationKind& SchemaRegistry::attribute_relation(const AttributeClass& cls) const {
    if (!contains(cls)) throw Error(ErrorCode::UnknownAttributeClass, cls.key());
    return relation(attribute_relation_name(cls));
}

const RelationKind& SchemaRegistry::interaction_relation(InteractionCategory category) const {
    return relation(kInteractions[static_cast<std::size_t>(category)].relation);
}

EdgeKindCheck SchemaRegistry::validate_edge_kind(std::string_view relation_name, const NodeType& source,
                                                 const NodeType& target) const {
    const auto& kind = relation(relation_name);
    if (kind.source == source && kind.target == target) return {};
    return {false, kind.name + " expects (" + kind.source.describe() + ", " + kind.target.describe() +
                       ") but got (" + source.describe() + ", " + target.describe() + ")"};
}

bool SchemaRegistry::operator==(const SchemaRegistry& other) const {
    return classes_ == other.classes_ && role_labels_ == other.role_labels_;
}

void SchemaRegistry::rebuild_relations() {
    relations_.clear();
    for (const auto& i : kInteractions) {
        relations_.push_back(RelationKind{std::string(i.relation), std::string(i.forward), std::string(i.inverse),
                                          NodeType::user(), NodeType::item(), i.category});
    }
    for (const auto& cls : classes_) {
        const auto& a = info(cls.name);
        NodeType owner = cls.owner == Owner::User ? NodeType::user() : NodeType::item();
        relations_.push_back(RelationKind{attribute_relation_name(cls), std::string(a.forward),
                                          std::string(a.inverse), owner, NodeType::value(cls), std::nullopt});
    }
}

}  // namespace reckg
