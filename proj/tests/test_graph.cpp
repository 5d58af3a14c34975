#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "reckg/error.hpp"
#include "reckg/graph.hpp"
#include "support/support.hpp"

using namespace reckg;

namespace {

const AttributeClass kPerformer = make_attribute_class(AttributeName::Performer);
const AttributeClass kType = make_attribute_class(AttributeName::Type);
const AttributeClass kDescription = make_attribute_class(AttributeName::Description);

Edge attr_edge(const NodeId& s, const NodeId& t, const AttributeClass& cls, std::string prov = "ML") {
    return {s, t, attribute_relation_name(cls), {}, {}, {}, {}, std::move(prov)};
}

Edge rating(const NodeId& u, const NodeId& i, double w, std::string prov = "ML") {
    return {u, i, "explicitInteraction", Behavior::Rating, w, {}, {}, std::move(prov)};
}

/// Brute-force labeled isomorphism over every bijection; only for tiny graphs.
bool brute_isomorphic(const KnowledgeGraph& a, const KnowledgeGraph& b) {
    if (a.node_count() != b.node_count() || a.edge_count() != b.edge_count()) return false;
    auto node_sig = [](const Node& n) {
        return std::make_tuple(n.type.kind, n.type.attribute ? n.type.attribute->key() : std::string(), n.value, n.label,
                               n.payload, n.provenance, n.aliases, n.alternates);
    };
    std::vector<std::size_t> perm(a.node_count());
    std::iota(perm.begin(), perm.end(), 0);
    do {
        bool ok = true;
        std::map<NodeId, NodeId> m;
        for (std::size_t i = 0; i < perm.size() && ok; ++i) {
            ok = node_sig(a.nodes()[i]) == node_sig(b.nodes()[perm[i]]);
            m[a.nodes()[i].id] = b.nodes()[perm[i]].id;
        }
        if (!ok) continue;
        std::multiset<std::tuple<NodeId, NodeId, std::string, std::optional<Behavior>, std::optional<double>,
                                 std::optional<std::int64_t>, std::optional<std::string>, std::string>>
            ea, eb;
        for (const auto& e : a.edges()) {
            ea.emplace(m[e.source], m[e.target], e.relation, e.behavior, e.weight, e.timestamp, e.payload, e.provenance);
        }
        for (const auto& e : b.edges()) {
            eb.emplace(e.source, e.target, e.relation, e.behavior, e.weight, e.timestamp, e.payload, e.provenance);
        }
        if (ea == eb) return true;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return false;
}

/// Copy of `g` with nodes and edges inserted in a shuffled order and user/item ids renamed.
KnowledgeGraph shuffled_copy(const KnowledgeGraph& g, reckg::testing::Rng& rng) {
    std::map<NodeId, NodeId> rename;
    std::vector<Node> nodes(g.nodes().begin(), g.nodes().end());
    for (auto& n : nodes) {
        auto fresh = n.id;
        fresh.local = "r" + n.id.local;
        rename[n.id] = fresh;
        n.id = fresh;
    }
    std::shuffle(nodes.begin(), nodes.end(), rng);
    std::vector<Edge> edges(g.edges().begin(), g.edges().end());
    std::shuffle(edges.begin(), edges.end(), rng);
    KnowledgeGraph out(g.registry());
    for (auto& n : nodes) out.insert_node_unchecked(n);
    for (auto e : edges) {
        e.source = rename[e.source];
        e.target = rename[e.target];
        out.insert_edge_unchecked(e);
    }
    return out;
}

}  // namespace

TEST(Graph, AttributeValuesDeduplicateByCanonicalForm) {
    KnowledgeGraph g;
    auto a = g.upsert_attribute_value(kType, "  Sci-Fi ", "ML");
    auto b = g.upsert_attribute_value(kType, "SCI-FI", "YM");
    EXPECT_EQ(a, b);
    EXPECT_EQ(g.node_count(), 1u);
    const auto& n = g.node(a);
    EXPECT_EQ(n.value, "sci-fi");
    EXPECT_EQ(n.label, "Sci-Fi");
    EXPECT_EQ(n.provenance, (std::set<std::string>{"ML", "YM"}));
    EXPECT_EQ(a.ns, "RECKG");
}

TEST(Graph, TextValuesKeepPayloadAndShortLabel) {
    KnowledgeGraph g;
    std::string body(150, 'w');
    auto id = g.upsert_attribute_value(kDescription, body);
    const auto& n = g.node(id);
    EXPECT_EQ(n.payload, body);
    EXPECT_LT(n.label.size(), body.size());
    EXPECT_NE(g.upsert_attribute_value(kDescription, body + " "), id);  // verbatim values differ
}

TEST(Graph, EmptyValuesAndUnregisteredClassesRejected) {
    KnowledgeGraph g;
    EXPECT_THROW(g.upsert_attribute_value(kType, "   "), Error);
    EXPECT_THROW(g.upsert_attribute_value(make_attribute_class(AttributeName::Producer, 1), "x"), Error);
}

TEST(Graph, UsersGetDatasetPrefixedLabels) {
    KnowledgeGraph g;
    auto u = g.upsert_entity(NodeKind::User, {"ML", "125610"}, "", "ML");
    EXPECT_EQ(g.node(u).label, "ML_125610");
    EXPECT_EQ(u.str(), "ML:125610");
    EXPECT_EQ(NodeId::parse("ML:125610"), u);
    EXPECT_EQ(NodeId::parse("RECKG:Type:drama"), (NodeId{"RECKG", "Type:drama"}));
    EXPECT_FALSE(NodeId::parse(":x"));
    EXPECT_THROW(g.upsert_entity(NodeKind::Item, u, "clash", "ML"), Error);
}

TEST(Graph, AddEdgeEnforcesSchema) {
    KnowledgeGraph g;
    auto u = g.upsert_entity(NodeKind::User, {"ML", "1"}, "", "ML");
    auto i = g.upsert_entity(NodeKind::Item, {"ML", "10"}, "Jaws", "ML");
    auto p = g.upsert_attribute_value(kPerformer, "Roy Scheider");

    EXPECT_EQ(g.add_edge(attr_edge(i, p, kPerformer)), AddResult::Added);
    EXPECT_EQ(g.add_edge(attr_edge(i, p, kPerformer)), AddResult::Duplicate);
    EXPECT_EQ(g.add_edge(attr_edge(i, p, kPerformer, "YM")), AddResult::Added);  // provenance is part of identity
    EXPECT_EQ(g.add_edge(rating(u, i, 5)), AddResult::Added);

    auto code = [&](Edge e) {
        try {
            g.add_edge(std::move(e));
        } catch (const Error& err) {
            return err.code();
        }
        return ErrorCode::NoMapping;
    };
    EXPECT_EQ(code(attr_edge(u, p, kPerformer)), ErrorCode::SchemaViolation);
    EXPECT_EQ(code(attr_edge(i, {"ML", "missing"}, kPerformer)), ErrorCode::DanglingEndpoint);
    EXPECT_EQ(code({u, i, "likes", {}, {}, {}, {}, "ML"}), ErrorCode::UnknownRelation);
    EXPECT_EQ(code({u, i, "explicitInteraction", Behavior::Dislike, {}, {}, {}, "ML"}), ErrorCode::SchemaViolation);
    EXPECT_EQ(code({u, i, "explicitInteraction", Behavior::Click, {}, {}, {}, "ML"}), ErrorCode::SchemaViolation);
    EXPECT_EQ(code({u, i, "explicitInteraction", Behavior::Like, {}, {}, std::string("text"), "ML"}),
              ErrorCode::SchemaViolation);
    EXPECT_EQ(g.add_edge({u, i, "review", Behavior::Review, {}, {}, std::string("great"), "YM"}), AddResult::Added);
    EXPECT_TRUE(validate_graph(g).ok());
}

TEST(Graph, ValidatorReportsWhatUncheckedInsertionLetsThrough) {
    KnowledgeGraph g;
    auto u = g.upsert_entity(NodeKind::User, {"ML", "1"}, "", "ML");
    auto i = g.upsert_entity(NodeKind::Item, {"ML", "2"}, "x", "ML");
    Node stray;
    stray.id = {"RECKG", "Producer_4:x"};
    stray.type = NodeType::value(make_attribute_class(AttributeName::Producer, 4));
    stray.value = "x";
    stray.label = "x";
    g.insert_node_unchecked(stray);
    g.insert_edge_unchecked({u, i, "explicitInteraction", Behavior::Dislike, {}, {}, {}, "ML"});
    g.insert_edge_unchecked({u, {"ML", "ghost"}, "explicitInteraction", Behavior::Like, {}, {}, {}, "ML"});
    g.insert_edge_unchecked({i, u, "hasType", {}, {}, {}, {}, "ML"});
    g.insert_edge_unchecked({u, i, "explicitInteraction", Behavior::Dislike, {}, {}, {}, "ML"});

    auto report = validate_graph(g);
    EXPECT_EQ(report.count(ViolationKind::UnregisteredAttribute), 1u);
    EXPECT_EQ(report.count(ViolationKind::NegativeFeedback), 2u);
    EXPECT_EQ(report.count(ViolationKind::DanglingEndpoint), 1u);
    EXPECT_EQ(report.count(ViolationKind::EndpointMismatch), 1u);
    EXPECT_EQ(report.count(ViolationKind::DuplicateEdge), 1u);
    EXPECT_TRUE(std::is_sorted(report.violations.begin(), report.violations.end()));
}

TEST(Graph, AdoptNodeFoldsDuplicates) {
    KnowledgeGraph a;
    auto v = a.upsert_attribute_value(kType, "Drama", "ML");
    Node copy = a.node(v);
    copy.id.local = "something else";
    copy.provenance = {"YM"};
    KnowledgeGraph b;
    b.upsert_attribute_value(kType, "drama", "BX");
    auto [id, created] = b.adopt_node(copy);
    EXPECT_FALSE(created);
    EXPECT_EQ(b.node(id).provenance, (std::set<std::string>{"BX", "YM"}));
}

TEST(Isomorphism, IdenticalAndRenamedGraphs) {
    KnowledgeGraph g;
    auto u = g.upsert_entity(NodeKind::User, {"ML", "1"}, "", "ML");
    auto i = g.upsert_entity(NodeKind::Item, {"ML", "2"}, "Jaws", "ML");
    g.add_edge(rating(u, i, 4.5));
    reckg::testing::Rng rng(1);
    EXPECT_TRUE(graphs_isomorphic_labeled(g, g));
    EXPECT_TRUE(graphs_isomorphic_labeled(g, shuffled_copy(g, rng)));

    KnowledgeGraph h = g;
    h.add_alias(i, "Jaws (1975)");
    EXPECT_FALSE(graphs_isomorphic_labeled(g, h));
}

TEST(Isomorphism, WeightAndProvenanceMatter) {
    auto build = [](double w, std::string prov) {
        KnowledgeGraph g;
        auto u = g.upsert_entity(NodeKind::User, {"ML", "1"}, "", "ML");
        auto i = g.upsert_entity(NodeKind::Item, {"ML", "2"}, "Jaws", "ML");
        g.add_edge(rating(u, i, w, std::move(prov)));
        return g;
    };
    EXPECT_FALSE(graphs_isomorphic_labeled(build(4.0, "ML"), build(4.000000000000001, "ML")));
    EXPECT_FALSE(graphs_isomorphic_labeled(build(4.0, "ML"), build(4.0, "YM")));
    EXPECT_TRUE(graphs_isomorphic_labeled(build(4.0, "ML"), build(4.0, "YM"), {.compare_provenance = false}));
}

TEST(Isomorphism, SymmetricStructuresNeedBacktracking) {
    // two indistinguishable users each rating one of two indistinguishable items,
    // versus one user rating both items
    auto build = [](bool crossed) {
        KnowledgeGraph g;
        auto u1 = g.upsert_entity(NodeKind::User, {"X", "1"}, "u", "X");
        auto u2 = g.upsert_entity(NodeKind::User, {"X", "2"}, "u", "X");
        auto i1 = g.upsert_entity(NodeKind::Item, {"X", "a"}, "i", "X");
        auto i2 = g.upsert_entity(NodeKind::Item, {"X", "b"}, "i", "X");
        g.add_edge(rating(u1, i1, 5, "X"));
        g.add_edge(rating(crossed ? u1 : u2, i2, 5, "X"));
        return g;
    };
    EXPECT_TRUE(graphs_isomorphic_labeled(build(false), build(false)));
    EXPECT_FALSE(graphs_isomorphic_labeled(build(false), build(true)));
}

TEST(Isomorphism, AmbiguityBoundIsEnforced) {
    KnowledgeGraph g;
    for (int i = 0; i < 20; ++i) g.upsert_entity(NodeKind::User, {"X", std::to_string(i)}, "same", "X");
    try {
        graphs_isomorphic_labeled(g, g, {.compare_provenance = true, .exhaustive_bound = 12});
        // refinement may legitimately settle isolated twins; either outcome is fine as long as no wrong answer
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::AmbiguityTooLarge);
    }
}

TEST(IsomorphismProperty, AgreesWithBijectionSearch) {
    reckg::testing::Rng rng(2024);
    int positives = 0, negatives = 0;
    for (int round = 0; round < 150; ++round) {
        auto a = reckg::testing::random_graph(rng, 6);
        auto b = shuffled_copy(a, rng);
        ASSERT_TRUE(brute_isomorphic(a, b));
        EXPECT_TRUE(graphs_isomorphic_labeled(a, b)) << round;
        ++positives;
        auto c = reckg::testing::random_graph(rng, 6);
        bool expected = brute_isomorphic(a, c);
        EXPECT_EQ(graphs_isomorphic_labeled(a, c), expected) << round;
        negatives += !expected;
    }
    EXPECT_GT(negatives, 50);
    EXPECT_EQ(positives, 150);
}

TEST(GraphProperty, RandomGraphsAreValid) {
    reckg::testing::Rng rng(99);
    for (int round = 0; round < 200; ++round) {
        auto g = reckg::testing::random_graph(rng);
        ASSERT_LE(g.node_count(), 12u);
        auto report = validate_graph(g);
        EXPECT_TRUE(report.ok()) << (report.ok() ? "" : report.violations.front().subject);
    }
}
