#include "reckg/query.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>

#include "reckg/error.hpp"

namespace reckg {

namespace {

constexpr std::string_view kArrowOpen = "—";   // em dash
constexpr std::string_view kArrowClose = "→";  // rightwards arrow

std::size_t require_node(const KnowledgeGraph& g, const NodeId& id) {
    auto idx = g.node_index(id);
    if (!idx) throw Error(ErrorCode::UnknownNode, id.str());
    return *idx;
}

struct Hop {
    std::size_t edge;
    std::size_t neighbor;
    Direction direction;
};

/// Incident edges of a node in both directions, in edge-list order.
std::vector<Hop> hops(const KnowledgeGraph& g, std::size_t v) {
    std::vector<Hop> out;
    for (auto ei : g.out_edges(v)) {
        if (auto t = g.node_index(g.edges()[ei].target)) out.push_back({ei, *t, Direction::Forward});
    }
    for (auto ei : g.in_edges(v)) {
        if (auto s = g.node_index(g.edges()[ei].source)) out.push_back({ei, *s, Direction::Backward});
    }
    std::sort(out.begin(), out.end(), [](const Hop& a, const Hop& b) {
        return std::tie(a.edge, a.direction) < std::tie(b.edge, b.direction);
    });
    return out;
}

std::string step_label(const KnowledgeGraph& g, const PathStep& step) {
    const auto& e = g.edges()[step.edge];
    const auto& kind = g.registry().relation(e.relation);
    return display_label(kind, e, step.direction == Direction::Forward);
}

/// Ordering key: length, then (edge label, node label) per step, then ids.
struct SortKey {
    std::size_t length;
    std::vector<std::pair<std::string, std::string>> rendered;
    std::vector<NodeId> nodes;
    std::vector<std::size_t> edges;

    auto operator<=>(const SortKey&) const = default;
};

SortKey sort_key(const KnowledgeGraph& g, const Path& p) {
    SortKey k{p.length(), {}, p.nodes, {}};
    for (std::size_t i = 0; i < p.steps.size(); ++i) {
        k.rendered.emplace_back(step_label(g, p.steps[i]), g.node(p.nodes[i + 1]).label);
        k.edges.push_back(p.steps[i].edge);
    }
    return k;
}

void sort_paths(const KnowledgeGraph& g, std::vector<Path>& paths) {
    std::vector<std::pair<SortKey, Path>> keyed;
    keyed.reserve(paths.size());
    for (auto& p : paths) keyed.emplace_back(sort_key(g, p), std::move(p));
    std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    paths.clear();
    for (auto& [key, p] : keyed) paths.push_back(std::move(p));
}

}  // namespace

std::set<NodeId> k_hop_neighbors(const KnowledgeGraph& g, const NodeId& start, std::size_t k,
                                 std::optional<NodeKind> kind_filter) {
    // a shortest walk is a simple path, so BFS depth equals the simple-path bound
    auto origin = require_node(g, start);
    std::vector<std::size_t> depth(g.node_count(), SIZE_MAX);
    std::deque<std::size_t> queue{origin};
    depth[origin] = 0;
    while (!queue.empty()) {
        auto v = queue.front();
        queue.pop_front();
        if (depth[v] == k) continue;
        for (const auto& h : hops(g, v)) {
            if (depth[h.neighbor] != SIZE_MAX) continue;
            depth[h.neighbor] = depth[v] + 1;
            queue.push_back(h.neighbor);
        }
    }
    std::set<NodeId> out;
    for (std::size_t v = 0; v < g.node_count(); ++v) {
        if (depth[v] == SIZE_MAX) continue;
        const auto& n = g.nodes()[v];
        if (!kind_filter || n.kind() == *kind_filter) out.insert(n.id);
    }
    return out;
}

std::vector<Path> enumerate_paths(const KnowledgeGraph& g, const NodeId& from, const NodeId& to, std::size_t max_len,
                                  std::size_t limit) {
    auto source = require_node(g, from);
    auto target = require_node(g, to);
    std::vector<Path> found;
    if (source == target || max_len == 0) return found;

    std::vector<bool> on_path(g.node_count(), false);
    Path current{{from}, {}};
    on_path[source] = true;
    std::function<void(std::size_t)> dfs = [&](std::size_t v) {
        if (current.length() == max_len) return;
        for (const auto& h : hops(g, v)) {
            if (on_path[h.neighbor]) continue;
            const auto& e = g.edges()[h.edge];
            current.nodes.push_back(g.nodes()[h.neighbor].id);
            current.steps.push_back({h.edge, e.relation, h.direction});
            if (h.neighbor == target) {
                found.push_back(current);
            } else {
                on_path[h.neighbor] = true;
                dfs(h.neighbor);
                on_path[h.neighbor] = false;
            }
            current.nodes.pop_back();
            current.steps.pop_back();
        }
    };
    dfs(source);

    sort_paths(g, found);
    if (found.size() > limit) found.resize(limit);
    return found;
}

std::vector<Candidate> candidate_items(const KnowledgeGraph& g, const NodeId& user, std::size_t max_len) {
    auto origin = g.node_index(user);
    if (!origin || g.nodes()[*origin].kind() != NodeKind::User) throw Error(ErrorCode::NotAUserNode, user.str());

    std::set<std::size_t> interacted;
    for (auto ei : g.out_edges(*origin)) {
        const auto& kind = g.registry().relation(g.edges()[ei].relation);
        if (kind.is_interaction()) {
            if (auto t = g.node_index(g.edges()[ei].target)) interacted.insert(*t);
        }
    }

    std::map<std::size_t, std::vector<Path>> support;
    std::vector<bool> on_path(g.node_count(), false);
    Path current{{user}, {}};
    on_path[*origin] = true;

    std::function<void(std::size_t)> dfs = [&](std::size_t v) {
        if (current.length() == max_len) return;
        for (const auto& h : hops(g, v)) {
            if (on_path[h.neighbor]) continue;
            const auto& e = g.edges()[h.edge];
            const auto& kind = g.registry().relation(e.relation);
            // after the opening interaction hop only attribute edges are followed
            if (kind.is_interaction()) continue;
            const auto& next = g.nodes()[h.neighbor];
            current.nodes.push_back(next.id);
            current.steps.push_back({h.edge, e.relation, h.direction});
            if (next.kind() == NodeKind::Item && !interacted.contains(h.neighbor)) support[h.neighbor].push_back(current);
            on_path[h.neighbor] = true;
            dfs(h.neighbor);
            on_path[h.neighbor] = false;
            current.nodes.pop_back();
            current.steps.pop_back();
        }
    };

    for (auto ei : g.out_edges(*origin)) {
        const auto& e = g.edges()[ei];
        if (!g.registry().relation(e.relation).is_interaction()) continue;
        auto item = g.node_index(e.target);
        if (!item || on_path[*item]) continue;
        current.nodes.push_back(e.target);
        current.steps.push_back({ei, e.relation, Direction::Forward});
        on_path[*item] = true;
        dfs(*item);
        on_path[*item] = false;
        current.nodes.pop_back();
        current.steps.pop_back();
    }

    std::vector<Candidate> out;
    for (auto& [idx, paths] : support) {
        sort_paths(g, paths);
        out.push_back({g.nodes()[idx].id, std::move(paths)});
    }
    std::sort(out.begin(), out.end(), [&](const Candidate& a, const Candidate& b) {
        if (a.support.size() != b.support.size()) return a.support.size() > b.support.size();
        const auto& la = g.node(a.item).label;
        const auto& lb = g.node(b.item).label;
        if (la != lb) return la < lb;
        return a.item < b.item;
    });
    return out;
}

bool path_in_graph(const Path& path, const KnowledgeGraph& g) {
    if (path.nodes.empty() || path.nodes.size() != path.steps.size() + 1) return false;
    std::set<NodeId> seen;
    for (const auto& id : path.nodes) {
        if (!g.find_node(id) || !seen.insert(id).second) return false;
    }
    for (std::size_t i = 0; i < path.steps.size(); ++i) {
        const auto& step = path.steps[i];
        if (step.edge >= g.edge_count()) return false;
        const auto& e = g.edges()[step.edge];
        if (e.relation != step.relation) return false;
        const auto& a = path.nodes[i];
        const auto& b = path.nodes[i + 1];
        bool ok = step.direction == Direction::Forward ? (e.source == a && e.target == b)
                                                       : (e.source == b && e.target == a);
        if (!ok) return false;
    }
    return true;
}

std::string explain_path(const Path& path, const KnowledgeGraph& g) {
    if (!path_in_graph(path, g)) throw Error(ErrorCode::PathNotInGraph, "path does not belong to the graph");
    std::string out = g.node(path.nodes.front()).label;
    for (std::size_t i = 0; i < path.steps.size(); ++i) {
        out += " ";
        out += kArrowOpen;
        out += step_label(g, path.steps[i]);
        out += kArrowClose;
        out += " ";
        out += g.node(path.nodes[i + 1]).label;
    }
    return out;
}

}  // namespace reckg
