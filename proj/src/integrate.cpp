#include "reckg/integrate.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>

#include "reckg/error.hpp"
#include "reckg/text.hpp"

namespace reckg {

namespace {

struct ItemKey {
    NodeId id;
    std::string title;
    std::vector<int> years;
};

std::vector<int> release_years(const KnowledgeGraph& g, std::size_t item) {
    std::vector<int> years;
    for (auto ei : g.out_edges(item)) {
        const auto& e = g.edges()[ei];
        const auto* target = g.find_node(e.target);
        if (!target || !target->type.attribute || target->type.attribute->name != AttributeName::ReleaseDate) continue;
        if (auto y = text::parse_int(std::string_view(target->value).substr(0, 4))) years.push_back(static_cast<int>(*y));
    }
    std::sort(years.begin(), years.end());
    years.erase(std::unique(years.begin(), years.end()), years.end());
    return years;
}

bool uses(const ResolutionRule& rule, MatchKey key) {
    return std::find(rule.match_keys.begin(), rule.match_keys.end(), key) != rule.match_keys.end();
}

std::vector<ItemKey> extract_keys(const KnowledgeGraph& g, const ResolutionRule& rule, const char* which) {
    std::vector<ItemKey> keys;
    bool any_item = false, any_title = false, any_year = false;
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        const auto& n = g.nodes()[i];
        if (n.kind() != NodeKind::Item) continue;
        any_item = true;
        ItemKey k{n.id, normalize_title(n.label, rule.title), release_years(g, i)};
        any_title = any_title || !k.title.empty();
        any_year = any_year || !k.years.empty();
        keys.push_back(std::move(k));
    }
    if (any_item && uses(rule, MatchKey::Title) && !any_title) {
        throw Error(ErrorCode::MissingMatchKey, std::string(which) + " graph has no item titles");
    }
    if (any_item && uses(rule, MatchKey::ReleaseYear) && !any_year) {
        throw Error(ErrorCode::MissingMatchKey, std::string(which) + " graph has no item release dates");
    }
    return keys;
}

bool usable(const ItemKey& k, const ResolutionRule& rule) {
    if (uses(rule, MatchKey::Title) && k.title.empty()) return false;
    if (uses(rule, MatchKey::ReleaseYear) && k.years.empty()) return false;
    return true;
}

bool keys_agree(const ItemKey& a, const ItemKey& b, const ResolutionRule& rule) {
    if (uses(rule, MatchKey::Title) && a.title != b.title) return false;
    if (uses(rule, MatchKey::ReleaseYear)) {
        bool close = false;
        for (int ya : a.years) {
            for (int yb : b.years) close = close || std::abs(ya - yb) <= rule.year_tolerance;
        }
        if (!close) return false;
    }
    return true;
}

std::string render_key(const ItemKey& k, const ResolutionRule& rule) {
    std::string out;
    for (auto key : rule.match_keys) {
        if (!out.empty()) out += "|";
        if (key == MatchKey::Title) {
            out += k.title;
        } else {
            out += k.years.empty() ? std::string("?") : std::to_string(k.years.front());
        }
    }
    return out;
}

}  // namespace

std::string normalize_title(std::string_view raw, const TitleNormalization& flags) {
    std::string s = flags.collapse_whitespace ? text::collapse_whitespace(raw)
                    : flags.trim               ? std::string(text::trim(raw))
                                               : std::string(raw);
    if (flags.case_fold) s = text::case_fold(s);
    if (flags.strip_article) {
        for (std::string_view article : {"the", "a", "an"}) {
            std::string prefix = std::string(article) + " ";
            std::string suffix = ", " + std::string(article);
            if (text::case_fold(s).starts_with(prefix) && s.size() > prefix.size()) {
                s.erase(0, prefix.size());
                break;
            }
            if (text::case_fold(s).ends_with(suffix) && s.size() > suffix.size()) {
                s.erase(s.size() - suffix.size());
                break;
            }
        }
        if (flags.trim || flags.collapse_whitespace) s = std::string(text::trim(s));
    }
    return s;
}

void ResolutionRule::validate() const {
    if (match_keys.empty()) throw Error(ErrorCode::MissingMatchKey, "resolution rule has no match keys");
    if (year_tolerance < 0) throw Error(ErrorCode::MissingMatchKey, "year tolerance must be non-negative");
}

ResolutionReport resolve_items(const KnowledgeGraph& base, const KnowledgeGraph& incoming, const ResolutionRule& rule) {
    rule.validate();
    auto base_keys = extract_keys(base, rule, "base");
    auto incoming_keys = extract_keys(incoming, rule, "incoming");

    std::multimap<std::string, const ItemKey*> by_title;
    for (const auto& k : base_keys) {
        if (usable(k, rule)) by_title.emplace(uses(rule, MatchKey::Title) ? k.title : std::string(), &k);
    }

    ResolutionReport report;
    std::map<NodeId, std::vector<const ItemKey*>> claims;  // base id -> incoming items with it as sole candidate
    for (const auto& k : incoming_keys) {
        if (!usable(k, rule)) {
            ++report.unmatched_incoming;
            continue;
        }
        std::vector<const ItemKey*> candidates;
        auto [lo, hi] = by_title.equal_range(uses(rule, MatchKey::Title) ? k.title : std::string());
        for (auto it = lo; it != hi; ++it) {
            if (keys_agree(*it->second, k, rule)) candidates.push_back(it->second);
        }
        if (candidates.empty()) {
            ++report.unmatched_incoming;
        } else if (candidates.size() > 1) {
            ResolutionConflict c{k.id, {}, render_key(k, rule)};
            for (const auto* cand : candidates) c.candidates.push_back(cand->id);
            std::sort(c.candidates.begin(), c.candidates.end());
            report.conflicts.push_back(std::move(c));
            ++report.unmatched_incoming;
        } else {
            claims[candidates.front()->id].push_back(&k);
        }
    }

    for (const auto& [base_id, claimants] : claims) {
        if (claimants.size() == 1) {
            report.matches.push_back({base_id, claimants.front()->id, render_key(*claimants.front(), rule)});
            continue;
        }
        for (const auto* k : claimants) {
            report.conflicts.push_back({k->id, {base_id}, render_key(*k, rule)});
            ++report.unmatched_incoming;
        }
    }
    std::sort(report.matches.begin(), report.matches.end(),
              [](const ItemMatch& a, const ItemMatch& b) { return std::tie(a.base, a.incoming) < std::tie(b.base, b.incoming); });
    std::sort(report.conflicts.begin(), report.conflicts.end(),
              [](const ResolutionConflict& a, const ResolutionConflict& b) { return a.incoming < b.incoming; });
    return report;
}

MergeResult merge_graphs(const KnowledgeGraph& base, const KnowledgeGraph& incoming, const ResolutionReport& report) {
    // survivor for each matched incoming item
    std::map<NodeId, NodeId> survivor;
    std::set<NodeId> matched_base;
    for (const auto& m : report.matches) {
        const auto* b = base.find_node(m.base);
        const auto* i = incoming.find_node(m.incoming);
        if (!b || !i || b->kind() != NodeKind::Item || i->kind() != NodeKind::Item) {
            throw Error(ErrorCode::StaleReport, m.base.str() + " <-> " + m.incoming.str());
        }
        if (!survivor.emplace(m.incoming, m.base).second || !matched_base.insert(m.base).second) {
            throw Error(ErrorCode::StaleReport, "match is not one-to-one at " + m.incoming.str());
        }
    }

    // Producer roles are identified by label across registries.
    SchemaRegistry registry = base.registry();
    std::map<int, int> role_map;
    for (const auto& [index, label] : incoming.registry().producer_role_labels()) {
        auto existing = registry.producer_role(label);
        role_map[index] = existing ? *existing->role_index : *registry.register_producer_role(label).role_index;
    }
    auto remap_class = [&](AttributeClass cls) {
        if (cls.role_index) cls.role_index = role_map.at(*cls.role_index);
        return cls;
    };

    KnowledgeGraph merged(registry);
    for (const auto& n : base.nodes()) merged.adopt_node(n);
    for (const auto& e : base.edges()) merged.insert_edge_unchecked(e);

    MergeStats stats;
    stats.matched_items = survivor.size();
    std::map<NodeId, NodeId> id_map;
    for (const auto& n : incoming.nodes()) {
        if (auto it = survivor.find(n.id); it != survivor.end()) {
            for (const auto& tag : n.provenance) merged.add_provenance(it->second, tag);
            merged.add_alias(it->second, n.label);
            for (const auto& a : n.aliases) merged.add_alias(it->second, a);
            for (const auto& a : n.alternates) merged.add_alternate(it->second, a);
            id_map[n.id] = it->second;
            continue;
        }
        Node copy = n;
        if (copy.type.attribute) copy.type.attribute = remap_class(*copy.type.attribute);
        if (copy.kind() == NodeKind::AttributeValue) copy.id.local = copy.type.attribute->key() + ":" + copy.value;
        auto [id, created] = merged.adopt_node(copy);
        if (created) {
            ++stats.nodes_added;
        } else if (n.kind() == NodeKind::AttributeValue) {
            ++stats.attribute_values_unified;
        } else {
            ++stats.entities_unified;
        }
        id_map[n.id] = id;
    }

    auto existing_attribute_edge = [&](const NodeId& source, std::string_view relation,
                                       const NodeId* target) -> const Edge* {
        auto idx = merged.node_index(source);
        if (!idx) return nullptr;
        for (auto ei : merged.out_edges(*idx)) {
            const auto& e = merged.edges()[ei];
            if (e.relation == relation && (!target || e.target == *target)) return &e;
        }
        return nullptr;
    };

    for (const auto& e : incoming.edges()) {
        auto src = id_map.find(e.source);
        auto tgt = id_map.find(e.target);
        if (src == id_map.end() || tgt == id_map.end()) {
            throw Error(ErrorCode::DanglingEndpoint, "incoming edge " + e.source.str() + " -> " + e.target.str());
        }
        Edge copy = e;
        copy.source = src->second;
        copy.target = tgt->second;
        const auto& kind = incoming.registry().relation(e.relation);
        if (!kind.is_interaction()) {
            auto cls = remap_class(*kind.target.attribute);
            copy.relation = attribute_relation_name(cls);
            if (existing_attribute_edge(copy.source, copy.relation, &copy.target)) {
                ++stats.edges_unified;
                continue;
            }
            if (cls.single_valued() && survivor.contains(e.source)) {
                if (existing_attribute_edge(copy.source, copy.relation, nullptr)) {
                    merged.add_alternate(copy.source, {cls.key(), merged.node(copy.target).label, e.provenance});
                    ++stats.alternates_recorded;
                    continue;
                }
            }
        }
        if (merged.add_edge(std::move(copy)) == AddResult::Added) {
            ++stats.edges_added;
        } else {
            ++stats.edges_unified;
        }
    }
    return {std::move(merged), stats};
}

std::string format_resolution_report(const ResolutionReport& report) {
    std::ostringstream out;
    out << "reckg-resolution\t1\n";
    for (const auto& m : report.matches) out << "match\t" << m.base.str() << '\t' << m.incoming.str() << '\t' << m.key << '\n';
    for (const auto& c : report.conflicts) {
        out << "conflict\t" << c.incoming.str() << '\t';
        for (std::size_t i = 0; i < c.candidates.size(); ++i) out << (i ? "," : "") << c.candidates[i].str();
        out << '\t' << c.key << '\n';
    }
    out << "unmatched_incoming\t" << report.unmatched_incoming << '\n';
    const auto& s = report.stats;
    out << "stat\tmatched_items\t" << s.matched_items << '\n'
        << "stat\tnodes_added\t" << s.nodes_added << '\n'
        << "stat\tedges_added\t" << s.edges_added << '\n'
        << "stat\tattribute_values_unified\t" << s.attribute_values_unified << '\n'
        << "stat\tentities_unified\t" << s.entities_unified << '\n'
        << "stat\tedges_unified\t" << s.edges_unified << '\n'
        << "stat\talternates_recorded\t" << s.alternates_recorded << '\n';
    return out.str();
}

}  // namespace reckg
