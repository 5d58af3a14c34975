#include "support.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "reckg/text.hpp"

namespace reckg::testing {

namespace fs = std::filesystem;

fs::path source_dir() { return fs::path(RECKG_SOURCE_DIR); }

fs::path fixture_path(std::string_view relative) { return source_dir() / "data" / std::string(relative); }

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text(const fs::path& path, std::string_view contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << contents;
    if (!out) throw std::runtime_error("cannot write " + path.string());
}

TempDir::TempDir() {
    static std::uint64_t counter = 0;
    std::random_device rd;
    for (;;) {
        auto candidate = fs::temp_directory_path() /
                         ("reckg-test-" + std::to_string(rd()) + "-" + std::to_string(++counter));
        if (fs::create_directory(candidate)) {
            path_ = candidate;
            return;
        }
    }
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

// generators ---------------------------------------------------------------------

namespace {

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& pool) {
    return pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
}

bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

std::size_t below(Rng& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

const std::vector<std::string> kTags{"ML", "YM", "BX"};
const std::vector<std::string> kWords{"Alpha", "Beta", "Gamma", "Delta", "Été", "Ölfarbe", "x\"y", "new\nline",
                                      "tab\there", "back\\slash", "a,b", "  spaced  out "};

std::string value_for(Rng& rng, const AttributeClass& cls) {
    switch (cls.name) {
        case AttributeName::Age: return pick(rng, std::vector<std::string>{"<18", "18-24", "25-34", "56+"});
        case AttributeName::Gender: return pick(rng, std::vector<std::string>{"M", "F"});
        case AttributeName::ReleaseDate: return pick(rng, std::vector<std::string>{"1993", "1995-01-01", "2019-05"});
        case AttributeName::Price: return pick(rng, std::vector<std::string>{"<10", "10-50", "100+"});
        default: return pick(rng, kWords) + (coin(rng) ? "" : " " + pick(rng, kWords));
    }
}

}  // namespace

KnowledgeGraph random_graph(Rng& rng, std::size_t max_nodes) {
    SchemaRegistry registry;
    std::vector<std::string> roles{"director", "writer", "composer"};
    std::shuffle(roles.begin(), roles.end(), rng);
    std::size_t role_count = below(rng, 3);
    for (std::size_t i = 0; i < role_count; ++i) registry.register_producer_role(roles[i]);
    KnowledgeGraph g(registry);

    std::vector<AttributeClass> user_classes, item_classes;
    for (const auto& cls : g.registry().attribute_classes()) {
        (cls.owner == Owner::User ? user_classes : item_classes).push_back(cls);
    }

    std::size_t target = 1 + below(rng, max_nodes);
    std::vector<NodeId> users, items;
    std::vector<std::pair<NodeId, AttributeClass>> values;
    while (g.node_count() < target) {
        auto roll = below(rng, 3);
        auto tag = pick(rng, kTags);
        if (roll == 0) {
            NodeId id{tag, std::to_string(below(rng, 50))};
            if (g.find_node(id)) continue;
            users.push_back(g.upsert_entity(NodeKind::User, id, coin(rng) ? "" : pick(rng, kWords), tag));
        } else if (roll == 1) {
            NodeId id{tag, "i" + std::to_string(below(rng, 50))};
            if (g.find_node(id)) continue;
            items.push_back(g.upsert_entity(NodeKind::Item, id, pick(rng, kWords), tag));
            if (coin(rng, 0.3)) g.add_alias(id, pick(rng, kWords));
            if (coin(rng, 0.2)) g.add_alternate(id, {"ReleaseDate", value_for(rng, item_classes.back()), tag});
        } else {
            const auto& cls = coin(rng, 0.3) ? pick(rng, user_classes) : pick(rng, item_classes);
            auto before = g.node_count();
            auto id = g.upsert_attribute_value(cls, value_for(rng, cls), tag);
            if (g.node_count() > before) values.emplace_back(id, cls);
        }
    }

    std::size_t edge_attempts = below(rng, 3 * target + 1);
    for (std::size_t i = 0; i < edge_attempts; ++i) {
        auto tag = pick(rng, kTags);
        if (!values.empty() && coin(rng)) {
            const auto& [value, cls] = pick(rng, values);
            const auto& owners = cls.owner == Owner::User ? users : items;
            if (owners.empty()) continue;
            Edge e{pick(rng, owners), value, attribute_relation_name(cls), {}, {}, {}, {}, tag};
            g.add_edge(e);
        } else if (!users.empty() && !items.empty()) {
            auto category = static_cast<InteractionCategory>(below(rng, 4));
            auto behaviors = behaviors_for(category);
            auto behavior = behaviors[below(rng, behaviors.size())];
            if (behavior == Behavior::Dislike) behavior = Behavior::Like;
            Edge e;
            e.source = pick(rng, users);
            e.target = pick(rng, items);
            e.relation = g.registry().interaction_relation(category).name;
            e.behavior = behavior;
            e.provenance = tag;
            if (behavior == Behavior::Rating) e.weight = std::uniform_real_distribution<double>(0.5, 5.0)(rng);
            if (coin(rng)) e.timestamp = std::uniform_int_distribution<std::int64_t>(-1'000'000, 2'000'000'000)(rng);
            if (category == InteractionCategory::Review) e.payload = pick(rng, kWords);
            g.add_edge(e);
        }
    }
    return g;
}

KnowledgeGraph random_catalogue(Rng& rng, std::string_view tag) {
    static const std::vector<std::string> titles{"Alpha", "The Beta", "Gamma", "Delta", "Epsilon", "alpha  "};
    static const std::vector<std::string> genres{"drama", "War", "comedy", "Horror"};
    static const std::vector<std::string> people{"Ann Lee", "Bo Kim", "Cy Twombly", "Di Ng"};
    std::vector<std::string> roles{"director", "writer"};
    std::shuffle(roles.begin(), roles.end(), rng);

    SchemaRegistry registry;
    for (std::size_t i = 0, n = below(rng, 3); i < n; ++i) registry.register_producer_role(roles[i]);
    KnowledgeGraph g(registry);
    std::string src(tag);

    std::vector<NodeId> items;
    for (std::size_t i = 0, n = below(rng, 6); i < n; ++i) {
        NodeId id{src, "m" + std::to_string(i)};
        g.upsert_entity(NodeKind::Item, id, pick(rng, titles), src);
        items.push_back(id);
        auto year = std::to_string(1990 + below(rng, 4));
        auto date_cls = make_attribute_class(AttributeName::ReleaseDate);
        g.add_edge({id, g.upsert_attribute_value(date_cls, coin(rng) ? year : year + "-0" + std::to_string(1 + below(rng, 9)), src),
                    attribute_relation_name(date_cls), {}, {}, {}, {}, src});
        for (std::size_t k = 0, m = below(rng, 3); k < m; ++k) {
            auto cls = make_attribute_class(AttributeName::Type);
            g.add_edge({id, g.upsert_attribute_value(cls, pick(rng, genres), src), attribute_relation_name(cls), {}, {}, {}, {}, src});
        }
        for (const auto& [index, label] : g.registry().producer_role_labels()) {
            if (!coin(rng)) continue;
            auto cls = make_attribute_class(AttributeName::Producer, index);
            g.add_edge({id, g.upsert_attribute_value(cls, pick(rng, people), src), attribute_relation_name(cls), {}, {}, {}, {}, src});
        }
        if (coin(rng)) {
            auto cls = make_attribute_class(AttributeName::Performer);
            g.add_edge({id, g.upsert_attribute_value(cls, pick(rng, people), src), attribute_relation_name(cls), {}, {}, {}, {}, src});
        }
    }
    for (std::size_t u = 0, n = below(rng, 4); u < n; ++u) {
        NodeId id{src, std::to_string(u)};
        g.upsert_entity(NodeKind::User, id, "", src);
        if (coin(rng)) {
            auto cls = make_attribute_class(AttributeName::Gender);
            g.add_edge({id, g.upsert_attribute_value(cls, coin(rng) ? "M" : "F", src), attribute_relation_name(cls), {}, {}, {}, {}, src});
        }
        for (const auto& item : items) {
            if (!coin(rng, 0.4)) continue;
            g.add_edge({id, item, "explicitInteraction", Behavior::Rating, 4.0 + below(rng, 2), {}, {}, src});
        }
    }
    return g;
}

// oracles ------------------------------------------------------------------------

PathSignature signature(const Path& p) {
    PathSignature s;
    std::get<0>(s) = p.nodes;
    for (const auto& step : p.steps) {
        std::get<1>(s).push_back(step.edge);
        std::get<2>(s).push_back(step.direction);
    }
    return s;
}

std::set<PathSignature> brute_force_paths(const KnowledgeGraph& g, const NodeId& from, const NodeId& to,
                                          std::size_t max_len) {
    std::set<PathSignature> out;
    if (from == to) return out;
    PathSignature current;
    std::get<0>(current).push_back(from);
    std::function<void()> extend = [&]() {
        auto& nodes = std::get<0>(current);
        if (nodes.back() == to) {
            out.insert(current);
            return;
        }
        if (nodes.size() - 1 == max_len) return;
        const auto edges = g.edges();
        for (std::size_t ei = 0; ei < edges.size(); ++ei) {
            for (auto dir : {Direction::Forward, Direction::Backward}) {
                const auto& here = dir == Direction::Forward ? edges[ei].source : edges[ei].target;
                const auto& next = dir == Direction::Forward ? edges[ei].target : edges[ei].source;
                if (here != nodes.back()) continue;
                if (std::find(nodes.begin(), nodes.end(), next) != nodes.end()) continue;
                nodes.push_back(next);
                std::get<1>(current).push_back(ei);
                std::get<2>(current).push_back(dir);
                extend();
                nodes.pop_back();
                std::get<1>(current).pop_back();
                std::get<2>(current).pop_back();
            }
        }
    };
    extend();
    return out;
}

std::set<NodeId> brute_force_k_hop(const KnowledgeGraph& g, const NodeId& start, std::size_t k) {
    std::set<NodeId> reached{start};
    std::vector<NodeId> stack{start};
    std::function<void()> extend = [&]() {
        if (stack.size() - 1 == k) return;
        for (const auto& e : g.edges()) {
            for (int flip = 0; flip < 2; ++flip) {
                const auto& here = flip ? e.target : e.source;
                const auto& next = flip ? e.source : e.target;
                if (here != stack.back() || std::find(stack.begin(), stack.end(), next) != stack.end()) continue;
                reached.insert(next);
                stack.push_back(next);
                extend();
                stack.pop_back();
            }
        }
    };
    extend();
    return reached;
}

namespace {

struct OracleItem {
    NodeId id;
    std::string title;
    std::set<int> years;
};

std::vector<OracleItem> oracle_items(const KnowledgeGraph& g, const ResolutionRule& rule) {
    std::vector<OracleItem> out;
    for (const auto& n : g.nodes()) {
        if (n.kind() != NodeKind::Item) continue;
        OracleItem item{n.id, normalize_title(n.label, rule.title), {}};
        for (const auto& e : g.edges()) {
            if (e.source != n.id) continue;
            const auto& t = g.node(e.target);
            if (t.type.attribute && t.type.attribute->name == AttributeName::ReleaseDate && t.value.size() >= 4) {
                item.years.insert(std::stoi(t.value.substr(0, 4)));
            }
        }
        out.push_back(std::move(item));
    }
    return out;
}

std::string class_identity(const KnowledgeGraph& g, const AttributeClass& cls) {
    if (cls.name == AttributeName::Producer) return "Producer/" + g.registry().producer_role_labels().at(*cls.role_index);
    return cls.key();
}

}  // namespace

std::size_t union_node_count_oracle(const KnowledgeGraph& base, const KnowledgeGraph& incoming,
                                    const ResolutionRule& rule) {
    auto b_items = oracle_items(base, rule);
    auto i_items = oracle_items(incoming, rule);
    auto agree = [&](const OracleItem& a, const OracleItem& b) {
        bool use_title = std::count(rule.match_keys.begin(), rule.match_keys.end(), MatchKey::Title) > 0;
        bool use_year = std::count(rule.match_keys.begin(), rule.match_keys.end(), MatchKey::ReleaseYear) > 0;
        if (use_title && (a.title.empty() || a.title != b.title)) return false;
        if (use_year) {
            bool close = false;
            for (int x : a.years) {
                for (int y : b.years) close = close || std::abs(x - y) <= rule.year_tolerance;
            }
            if (!close) return false;
        }
        return true;
    };

    // incoming item -> its unique base candidate, then drop base items claimed twice
    std::map<NodeId, NodeId> sole;
    std::map<NodeId, int> claims;
    for (const auto& in : i_items) {
        std::vector<NodeId> cands;
        for (const auto& b : b_items) {
            if (agree(b, in)) cands.push_back(b.id);
        }
        if (cands.size() == 1) {
            sole[in.id] = cands.front();
            ++claims[cands.front()];
        }
    }

    std::set<std::string> keys;
    auto entity_key = [](const Node& n) { return "E|" + n.id.str(); };
    for (const auto& n : base.nodes()) {
        keys.insert(n.type.attribute ? "A|" + class_identity(base, *n.type.attribute) + "|" + n.value : entity_key(n));
    }
    for (const auto& n : incoming.nodes()) {
        if (n.type.attribute) {
            keys.insert("A|" + class_identity(incoming, *n.type.attribute) + "|" + n.value);
        } else if (auto it = sole.find(n.id); it != sole.end() && claims[it->second] == 1) {
            keys.insert("E|" + it->second.str());
        } else {
            keys.insert(entity_key(n));
        }
    }
    return keys.size();
}

// synthetic data -----------------------------------------------------------------

SyntheticMl write_synthetic_ml100k(const fs::path& dir, std::uint64_t seed, std::size_t users, std::size_t items,
                                   std::size_t ratings) {
    static const char* kOccupations[] = {"administrator", "artist", "doctor", "educator", "engineer",
                                         "lawyer", "librarian", "programmer", "student", "writer"};
    static const char* kMonths[] = {"Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
    Rng rng(seed);
    fs::create_directories(dir);

    std::ostringstream u;
    for (std::size_t i = 1; i <= users; ++i) {
        u << i << '|' << 7 + below(rng, 67) << '|' << (coin(rng) ? 'M' : 'F') << '|' << kOccupations[below(rng, 10)] << '|'
          << 10000 + below(rng, 89999) << '\n';
    }
    write_text(dir / "u.user", u.str());

    std::ostringstream it;
    for (std::size_t i = 1; i <= items; ++i) {
        int year = 1930 + static_cast<int>(below(rng, 68));
        it << i << "|Movie " << i << " (" << year << ")|" << 1 + below(rng, 28) << '-' << kMonths[below(rng, 12)] << '-'
           << year << "||http://example.org/" << i;
        for (int g = 0; g < 19; ++g) it << '|' << (coin(rng, 0.15) ? '1' : '0');
        it << '\n';
    }
    write_text(dir / "u.item", it.str());

    // unique (user, item) pairs drawn without replacement
    std::vector<std::uint64_t> pairs(users * items);
    std::iota(pairs.begin(), pairs.end(), 0);
    for (std::size_t i = 0; i < ratings; ++i) std::swap(pairs[i], pairs[i + below(rng, pairs.size() - i)]);
    std::ostringstream d;
    for (std::size_t i = 0; i < ratings; ++i) {
        d << pairs[i] / items + 1 << '\t' << pairs[i] % items + 1 << '\t' << 1 + below(rng, 5) << '\t'
          << 874724710 + below(rng, 20'000'000) << '\n';
    }
    write_text(dir / "u.data", d.str());
    return {users, items, ratings};
}

std::string sha256_file(const fs::path& path) {
    auto data = read_text(path);
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += kHex[digest[i] >> 4];
        out += kHex[digest[i] & 0xF];
    }
    return out;
}

}  // namespace reckg::testing
