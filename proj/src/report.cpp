#include <set>
#include <sstream>

#include "reckg/export.hpp"

namespace reckg {

std::string_view to_string(Consideration c) {
    switch (c) {
        case Consideration::Considered: return "Considered";
        case Consideration::PartiallyConsidered: return "PartiallyConsidered";
        case Consideration::NotConsidered: break;
    }
    return "NotConsidered";
}

CharacteristicsReport characteristics_report(const KnowledgeGraph& g) {
    CharacteristicsReport r;
    bool user_attr = false, item_attr = false;
    std::set<InteractionCategory> categories;
    for (const auto& e : g.edges()) {
        const auto* kind = g.registry().find_relation(e.relation);
        if (!kind) continue;
        if (kind->interaction_category) {
            categories.insert(*kind->interaction_category);
        } else if (kind->source.kind == NodeKind::User) {
            user_attr = true;
        } else {
            item_attr = true;
        }
    }
    auto yes_no = [](bool b) { return b ? Consideration::Considered : Consideration::NotConsidered; };
    r.user_attribute = yes_no(user_attr);
    r.item_attribute = yes_no(item_attr);
    r.interaction = categories.size() >= 2   ? Consideration::Considered
                    : categories.size() == 1 ? Consideration::PartiallyConsidered
                                             : Consideration::NotConsidered;

    // an empty graph demonstrates nothing, so it is not counted as consistent
    bool registered = true;
    for (const auto& n : g.nodes()) {
        if (n.type.attribute && !g.registry().contains(*n.type.attribute)) registered = false;
    }
    r.consistency = yes_no(g.node_count() > 0 && registered && validate_graph(g).ok());

    auto at_least_partial = [](Consideration c) { return c != Consideration::NotConsidered; };
    r.interoperability = yes_no(at_least_partial(r.user_attribute) && at_least_partial(r.item_attribute) &&
                                at_least_partial(r.interaction) && r.consistency == Consideration::Considered);
    return r;
}

std::string format_characteristics(const CharacteristicsReport& r) {
    std::ostringstream out;
    out << "user_attribute\t" << to_string(r.user_attribute) << '\n'
        << "item_attribute\t" << to_string(r.item_attribute) << '\n'
        << "interaction\t" << to_string(r.interaction) << '\n'
        << "consistency\t" << to_string(r.consistency) << '\n'
        << "interoperability\t" << to_string(r.interoperability) << '\n';
    return out.str();
}

}  // namespace reckg
