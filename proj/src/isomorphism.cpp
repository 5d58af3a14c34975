#include <algorithm>
#include <array>
#include <cstdio>
#include <functional>
#include <map>

#include "reckg/error.hpp"
#include "reckg/graph.hpp"

namespace reckg {

namespace {

using Bundle = std::map<std::pair<std::size_t, std::size_t>, std::vector<int>>;

struct Dictionary {
    std::map<std::string, int> strings;
    std::map<std::vector<int>, int> vectors;

    int id(const std::string& s) { return strings.emplace(s, static_cast<int>(strings.size())).first->second; }
    int id(const std::vector<int>& v) { return vectors.emplace(v, static_cast<int>(vectors.size())).first->second; }
};

std::string class_signature(const KnowledgeGraph& g, const AttributeClass& cls) {
    std::string s = cls.key();
    if (cls.role_index) {
        const auto& labels = g.registry().producer_role_labels();
        if (auto it = labels.find(*cls.role_index); it != labels.end()) s += "(" + it->second + ")";
    }
    return s;
}

std::string node_signature(const KnowledgeGraph& g, const Node& n, const IsomorphismOptions& opt) {
    std::string s;
    s += to_string(n.kind());
    s += '\x1f';
    if (n.type.attribute) s += class_signature(g, *n.type.attribute);
    s += '\x1f' + n.value + '\x1f' + n.label + '\x1f';
    if (n.payload) s += "P" + *n.payload;
    for (const auto& a : n.aliases) s += "\x1e" "A" + a;
    for (const auto& a : n.alternates) s += "\x1e" "L" + a.attribute + "=" + a.value + "@" + a.source;
    if (opt.compare_provenance) {
        for (const auto& p : n.provenance) s += "\x1e" "V" + p;
    }
    return s;
}

std::string edge_signature(const KnowledgeGraph& g, const Edge& e, const IsomorphismOptions& opt) {
    std::string s = e.relation;
    if (const auto* kind = g.registry().find_relation(e.relation); kind && kind->target.attribute) {
        s = class_signature(g, *kind->target.attribute) + "/" + e.relation.substr(0, e.relation.find('_'));
    }
    s += '\x1f';
    if (e.behavior) s += to_string(*e.behavior);
    s += '\x1f';
    if (e.weight) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%a", *e.weight);
        s += buf;
    }
    s += '\x1f';
    if (e.timestamp) s += std::to_string(*e.timestamp);
    s += '\x1f';
    if (e.payload) s += "P" + *e.payload;
    if (opt.compare_provenance) s += '\x1f' + e.provenance;
    return s;
}

struct Prepared {
    const KnowledgeGraph* graph;
    std::vector<int> color;
    std::vector<int> edge_sig;
    std::vector<std::string> dangling;  // signatures of edges with a missing endpoint
    Bundle bundles;
};

Prepared prepare(const KnowledgeGraph& g, Dictionary& dict, const IsomorphismOptions& opt) {
    Prepared p{&g, {}, {}, {}, {}};
    for (const auto& n : g.nodes()) p.color.push_back(dict.id("N" + node_signature(g, n, opt)));
    for (std::size_t i = 0; i < g.edges().size(); ++i) {
        const auto& e = g.edges()[i];
        auto sig = edge_signature(g, e, opt);
        p.edge_sig.push_back(dict.id("E" + sig));
        auto s = g.node_index(e.source);
        auto t = g.node_index(e.target);
        if (!s || !t) {
            p.dangling.push_back(sig + (s ? "|src" : "") + (t ? "|tgt" : ""));
            continue;
        }
        p.bundles[{*s, *t}].push_back(p.edge_sig.back());
    }
    for (auto& [key, sigs] : p.bundles) std::sort(sigs.begin(), sigs.end());
    std::sort(p.dangling.begin(), p.dangling.end());
    return p;
}

std::vector<int> refine_once(const Prepared& p, Dictionary& dict) {
    const auto& g = *p.graph;
    std::vector<int> next(p.color.size());
    for (std::size_t v = 0; v < p.color.size(); ++v) {
        std::vector<std::array<int, 3>> incident;
        for (auto ei : g.out_edges(v)) {
            auto t = g.node_index(g.edges()[ei].target);
            incident.push_back({0, p.edge_sig[ei], t ? p.color[*t] : -1});
        }
        for (auto ei : g.in_edges(v)) {
            auto s = g.node_index(g.edges()[ei].source);
            incident.push_back({1, p.edge_sig[ei], s ? p.color[*s] : -1});
        }
        std::sort(incident.begin(), incident.end());
        std::vector<int> sig{p.color[v]};
        for (const auto& i : incident) sig.insert(sig.end(), i.begin(), i.end());
        next[v] = dict.id(sig);
    }
    return next;
}

std::map<int, std::size_t> histogram(const std::vector<int>& colors) {
    std::map<int, std::size_t> h;
    for (int c : colors) ++h[c];
    return h;
}

const std::vector<int>* bundle(const Bundle& b, std::size_t s, std::size_t t) {
    auto it = b.find({s, t});
    return it == b.end() ? nullptr : &it->second;
}

bool bundles_match(const Prepared& a, const Prepared& b, std::size_t as, std::size_t at, std::size_t bs,
                   std::size_t bt) {
    const auto* x = bundle(a.bundles, as, at);
    const auto* y = bundle(b.bundles, bs, bt);
    if (!x || !y) return x == y;
    return *x == *y;
}

}  // namespace

bool graphs_isomorphic_labeled(const KnowledgeGraph& a, const KnowledgeGraph& b, const IsomorphismOptions& options) {
    if (a.node_count() != b.node_count() || a.edge_count() != b.edge_count()) return false;

    Dictionary dict;
    auto pa = prepare(a, dict, options);
    auto pb = prepare(b, dict, options);
    if (pa.dangling != pb.dangling) return false;
    if (histogram(pa.color) != histogram(pb.color)) return false;

    std::size_t classes = histogram(pa.color).size();
    while (true) {
        auto na = refine_once(pa, dict);
        auto nb = refine_once(pb, dict);
        auto ha = histogram(na);
        if (ha != histogram(nb)) return false;
        pa.color = std::move(na);
        pb.color = std::move(nb);
        if (ha.size() == classes) break;
        classes = ha.size();
    }

    const std::size_t n = a.node_count();
    auto counts = histogram(pa.color);
    std::map<int, std::vector<std::size_t>> b_by_color;
    for (std::size_t v = 0; v < n; ++v) b_by_color[pb.color[v]].push_back(v);

    std::vector<std::size_t> mapping(n, n);
    std::vector<bool> used(n, false);
    std::vector<std::size_t> ambiguous;
    for (std::size_t v = 0; v < n; ++v) {
        if (counts[pa.color[v]] == 1) {
            auto w = b_by_color[pa.color[v]].front();
            mapping[v] = w;
            used[w] = true;
        } else {
            ambiguous.push_back(v);
        }
    }
    if (ambiguous.size() > options.exhaustive_bound) {
        throw Error(ErrorCode::AmbiguityTooLarge, std::to_string(ambiguous.size()) +
                                                      " indistinguishable nodes exceed the bound of " +
                                                      std::to_string(options.exhaustive_bound));
    }

    // Uniquely coloured nodes must already agree with each other.
    for (const auto& [key, sigs] : pa.bundles) {
        auto [s, t] = key;
        if (mapping[s] == n || mapping[t] == n) continue;
        if (!bundles_match(pa, pb, s, t, mapping[s], mapping[t])) return false;
    }

    std::vector<std::size_t> mapped;
    for (std::size_t v = 0; v < n; ++v) {
        if (mapping[v] != n) mapped.push_back(v);
    }

    std::function<bool(std::size_t)> extend = [&](std::size_t depth) -> bool {
        if (depth == ambiguous.size()) return true;
        auto v = ambiguous[depth];
        for (auto w : b_by_color[pa.color[v]]) {
            if (used[w]) continue;
            bool consistent = bundles_match(pa, pb, v, v, w, w);
            for (std::size_t k = 0; consistent && k < mapped.size(); ++k) {
                auto x = mapped[k];
                consistent = bundles_match(pa, pb, v, x, w, mapping[x]) && bundles_match(pa, pb, x, v, mapping[x], w);
            }
            if (!consistent) continue;
            mapping[v] = w;
            used[w] = true;
            mapped.push_back(v);
            if (extend(depth + 1)) return true;
            mapped.pop_back();
            used[w] = false;
            mapping[v] = n;
        }
        return false;
    };
    return extend(0);
}

}  // namespace reckg
