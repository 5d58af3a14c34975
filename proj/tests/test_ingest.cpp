#include <gtest/gtest.h>

#include "reckg/error.hpp"
#include "reckg/ingest.hpp"
#include "support/support.hpp"

using namespace reckg;

namespace {

ErrorCode config_error(std::string_view doc) {
    try {
        parse_mapping_config(doc);
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "config parsed unexpectedly:\n" << doc;
    return ErrorCode::NoMapping;
}

std::string error_message(std::string_view doc) {
    try {
        parse_mapping_config(doc);
    } catch (const Error& e) {
        return e.what();
    }
    return {};
}

MappingConfig load_config(std::string_view name) {
    return parse_mapping_config(reckg::testing::read_text(reckg::testing::fixture_path("configs/" + std::string(name))));
}

IngestResult ingest_fixture(std::string_view config, std::string_view dir, IngestOptions options = {}) {
    return ingest_dataset(load_config(config), DirectoryAccess(reckg::testing::fixture_path("fixtures/" + std::string(dir)).string()),
                          options);
}

const char* kSmallHeader = R"(reckg-mapping 1
source T
separator "|"
)";

}  // namespace

// transforms ----------------------------------------------------------------------

TEST(Transforms, AgeBinsAreHalfOpen) {
    auto bins = AgeBins::defaults();
    EXPECT_EQ(bin_age(0, bins), "<18");
    EXPECT_EQ(bin_age(17, bins), "<18");
    EXPECT_EQ(bin_age(18, bins), "18-24");
    EXPECT_EQ(bin_age(24, bins), "18-24");
    EXPECT_EQ(bin_age(25, bins), "25-34");
    EXPECT_EQ(bin_age(49, bins), "45-49");
    EXPECT_EQ(bin_age(56, bins), "56+");
    EXPECT_EQ(bin_age(120, bins), "56+");
    EXPECT_THROW(bin_age(-1, bins), Error);
}

TEST(Transforms, AgeBinsPropertyEveryAgeLandsInItsInterval) {
    auto bins = AgeBins::defaults();
    for (int age = 0; age < 130; ++age) {
        std::size_t k = 0;
        while (k < bins.edges.size() && age >= bins.edges[k]) ++k;
        EXPECT_EQ(bin_age(age, bins), bins.labels[k]) << age;
    }
}

TEST(Transforms, BinOrderChecked) {
    AgeBins bins{{18, 18}, {"a", "b", "c"}};
    EXPECT_THROW(bins.validate(), Error);
    AgeBins short_labels{{18}, {"a"}};
    EXPECT_THROW(short_labels.validate(), Error);
    PriceBins p{{10, 5}, {}};
    EXPECT_THROW(p.validate(), Error);
}

TEST(Transforms, PriceBinsGenerateLabels) {
    PriceBins p{{10, 50, 100}, {}};
    EXPECT_EQ(bin_price(3, p), "<10");
    EXPECT_EQ(bin_price(10, p), "10-50");
    EXPECT_EQ(bin_price(99.5, p), "50-100");
    EXPECT_EQ(bin_price(1000, p), "100+");
}

TEST(Transforms, RatingBinarization) {
    RatingRule rule;
    EXPECT_EQ(binarize_rating(4, rule), RatingOutcome::Positive);
    EXPECT_EQ(binarize_rating(3.5, rule), RatingOutcome::Dropped);
    EXPECT_EQ(binarize_rating(5, rule), RatingOutcome::Positive);
    rule.inclusive = false;
    EXPECT_EQ(binarize_rating(4, rule), RatingOutcome::Dropped);
    EXPECT_THROW(binarize_rating(5.5, rule), Error);
    EXPECT_THROW(binarize_rating(-1, rule), Error);
}

TEST(Transforms, ReleaseDates) {
    EXPECT_EQ(normalize_release_date("01-Jan-1995", {"%d-%b-%Y"}).canonical(), "1995-01-01");
    EXPECT_EQ(normalize_release_date("1995", {"%Y"}).canonical(), "1995");
    EXPECT_EQ(normalize_release_date("March 1999", {"%B %Y"}).canonical(), "1999-03");
    EXPECT_EQ(normalize_release_date("2000-02-29", {"%Y-%m-%d"}).canonical(), "2000-02-29");
    auto code = [](std::string_view raw, std::string pattern) {
        try {
            normalize_release_date(raw, {std::move(pattern)});
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::NoMapping;
    };
    EXPECT_EQ(code("1999-02-29", "%Y-%m-%d"), ErrorCode::UnparsableDate);
    EXPECT_EQ(code("31-Foo-1995", "%d-%b-%Y"), ErrorCode::UnparsableDate);
    EXPECT_EQ(code("", "%Y"), ErrorCode::UnparsableDate);
    EXPECT_EQ(code("1995x", "%Y"), ErrorCode::UnparsableDate);
}

// mapping configuration -----------------------------------------------------------

TEST(MappingConfig, BundledConfigsParse) {
    auto ml = load_config("ml-100k.map");
    EXPECT_EQ(ml.source_tag, "ML");
    ASSERT_EQ(ml.files.size(), 3u);
    EXPECT_TRUE(ml.strip_title_year);
    EXPECT_TRUE(ml.files[2].interaction.has_value());
    EXPECT_EQ(ml.canonical_attribute("zip_code", Owner::User), make_attribute_class(AttributeName::Residence));

    auto ym = load_config("ym.map");
    EXPECT_EQ(ym.producer_roles, std::vector<std::string>{"director"});
    EXPECT_EQ(ym.canonical_attribute("director", Owner::Item), make_attribute_class(AttributeName::Producer, 1));
    EXPECT_EQ(ym.registry().producer_role_count(), 1);
    EXPECT_DOUBLE_EQ(ym.rating.scale_max, 10);
}

TEST(MappingConfig, ErrorsCarryPositions) {
    auto msg = error_message(std::string(kSmallHeader) + "file \"a\"\n  col 0 id -> key User\n  col 1 x -> attr Mood\nend\n");
    EXPECT_NE(msg.find("line 6"), std::string::npos) << msg;
    EXPECT_NE(msg.find("column"), std::string::npos) << msg;
}

TEST(MappingConfig, RejectsMalformedDocuments) {
    std::string h = kSmallHeader;
    EXPECT_EQ(config_error("source X\n"), ErrorCode::SyntaxError);  // missing magic line
    EXPECT_EQ(config_error("reckg-mapping 2\n"), ErrorCode::SyntaxError);
    EXPECT_EQ(config_error(h + "bogus 1\n"), ErrorCode::SyntaxError);
    EXPECT_EQ(config_error(h + "file \"a\"\n col 0 id -> key User\n"), ErrorCode::SyntaxError);  // no end
    EXPECT_EQ(config_error(h + "file \"a\"\n col 0 id -> key User\n col 1 m -> attr Mood\nend\n"),
              ErrorCode::UnknownAttributeClass);
    EXPECT_EQ(config_error(h + "file \"a\"\n col 0 id -> key User\n col 1 g -> attr Type\nend\n"),
              ErrorCode::UnknownAttributeClass);  // item class in a user file
    EXPECT_EQ(config_error(h + "file \"a\"\n col 1 g -> attr Gender\nend\n"), ErrorCode::MissingNodeKey);
    EXPECT_EQ(config_error(h + "file \"a\"\n interaction Explicit Rating\n col 0 u -> ref User\n col 2 r -> rating\nend\n"),
              ErrorCode::MissingNodeKey);
    EXPECT_EQ(config_error(h + "file \"a\"\n interaction Explicit Rating\n col 0 u -> ref User\n col 1 i -> ref Item\nend\n"),
              ErrorCode::SyntaxError);  // no rating column
    EXPECT_EQ(config_error(h + "file \"a\"\n interaction Implicit Rating\n col 0 u -> ref User\n col 1 i -> ref Item\nend\n"),
              ErrorCode::SyntaxError);  // behavior outside category
    EXPECT_EQ(config_error(h + "file \"a\"\n col 0 id -> key User\n col 0 g -> attr Gender\nend\n"),
              ErrorCode::SyntaxError);  // index bound twice
    EXPECT_EQ(config_error(h + "age_bins 30 20\nfile \"a\"\n col 0 id -> key User\nend\n"), ErrorCode::BinOrderError);
    EXPECT_EQ(config_error(h + "producer_role \"director\"\nproducer_role \"Director\"\n"), ErrorCode::DuplicateRole);
    EXPECT_EQ(config_error(h + "separator \"unterminated\n"), ErrorCode::SyntaxError);
}

TEST(MappingConfig, ProducerRolesFromColumns) {
    auto cfg = parse_mapping_config(std::string(kSmallHeader) +
                                    "file \"m\"\n col 0 id -> key Item\n col 1 d -> attr Producer \"director\"\n"
                                    " col 2 w -> attr Producer \"writer\"\n col 3 d2 -> attr Producer \"Director\"\nend\n");
    EXPECT_EQ(cfg.producer_roles, (std::vector<std::string>{"director", "writer"}));
    EXPECT_EQ(cfg.canonical_attribute("w", Owner::Item), make_attribute_class(AttributeName::Producer, 2));
    EXPECT_EQ(cfg.canonical_attribute("d2", Owner::Item), make_attribute_class(AttributeName::Producer, 1));
}

// ingestion -----------------------------------------------------------------------

TEST(Ingest, MovieLensFixture) {
    auto r = ingest_fixture("ml-100k.map", "ml_mini");
    const auto& g = r.graph;
    EXPECT_EQ(g.count_nodes(NodeKind::User), 5u);
    EXPECT_EQ(g.count_nodes(NodeKind::Item), 7u);
    EXPECT_EQ(r.stats.rows(), 23u);
    EXPECT_EQ(r.stats.rows(), r.stats.kept() + r.stats.dropped_negative() + r.stats.skipped());
    EXPECT_EQ(r.stats.dropped_negative(), 3u);
    EXPECT_TRUE(validate_graph(g).ok());

    const auto& toy = g.node({"ML", "1"});
    EXPECT_EQ(toy.label, "Toy Story");
    const auto& user = g.node({"ML", "user/125610"});
    EXPECT_EQ(user.label, "ML_125610");
    auto age = g.find_attribute_value(make_attribute_class(AttributeName::Age), "25-34");
    ASSERT_TRUE(age);
    auto date = g.find_attribute_value(make_attribute_class(AttributeName::ReleaseDate), "1995-01-01");
    EXPECT_TRUE(date);
    auto children = g.find_attribute_value(make_attribute_class(AttributeName::Type), "children's");
    EXPECT_TRUE(children);

    std::size_t rated = 0;
    for (const auto& e : g.edges()) {
        if (e.relation != "explicitInteraction") continue;
        ++rated;
        EXPECT_EQ(e.behavior, Behavior::Rating);
        EXPECT_GE(*e.weight, 4.0);
        EXPECT_TRUE(e.timestamp);
        EXPECT_EQ(e.provenance, "ML");
    }
    EXPECT_EQ(rated, 8u);
    EXPECT_EQ(r.stats.edges_by_relation.at("explicitInteraction"), 8u);
    EXPECT_EQ(r.stats.nodes_by_kind.at("User"), 5u);
    EXPECT_FALSE(r.stats.warnings.empty());  // two unbound u.item columns
}

TEST(Ingest, YmFixtureWithRolesTextAndReviews) {
    auto r = ingest_fixture("ym.map", "ym_mini");
    const auto& g = r.graph;
    EXPECT_TRUE(validate_graph(g).ok());
    auto spielberg = g.find_attribute_value(make_attribute_class(AttributeName::Producer, 1), "steven spielberg");
    ASSERT_TRUE(spielberg);
    EXPECT_EQ(g.in_edges(*g.node_index(*spielberg)).size(), 3u);
    auto hanks = g.find_attribute_value(make_attribute_class(AttributeName::Performer), "tom hanks");
    ASSERT_TRUE(hanks);
    EXPECT_EQ(g.node(*hanks).label, "Tom Hanks");

    std::size_t reviews = 0;
    for (const auto& e : g.edges()) {
        if (e.relation == "review") {
            ++reviews;
            ASSERT_TRUE(e.payload);
            EXPECT_EQ(e.behavior, Behavior::Review);
        }
    }
    EXPECT_EQ(reviews, 2u);
    for (const auto& n : g.nodes()) {
        if (n.type.attribute && n.type.attribute->name == AttributeName::Description) {
            EXPECT_TRUE(n.payload);
        }
    }
}

TEST(Ingest, MalformedRowsAreCountedNotFatal) {
    auto r = ingest_fixture("ml-100k.map", "ml_malformed");
    EXPECT_EQ(r.stats.skipped(), 3u);
    const auto& data = r.stats.files.back();
    EXPECT_EQ(data.skip_reasons.at("arity mismatch"), 1u);
    EXPECT_EQ(data.skip_reasons.at("unparsable rating"), 1u);
    EXPECT_EQ(data.skip_reasons.at("unresolved reference"), 1u);
    EXPECT_EQ(data.rows, data.kept + data.dropped_negative + data.skipped);
    EXPECT_TRUE(validate_graph(r.graph).ok());

    try {
        ingest_fixture("ml-100k.map", "ml_malformed", {.strict = true});
        FAIL() << "strict mode should abort";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::RowArityMismatch);
    }
}

TEST(Ingest, MissingFileIsUnreadable) {
    auto cfg = load_config("ml-100k.map");
    try {
        ingest_dataset(cfg, MemoryAccess({}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::FileUnreadable);
    }
}

TEST(Ingest, Latin1FallbackAndInvalidValues) {
    auto cfg = parse_mapping_config(R"(reckg-mapping 1
source T
encoding utf-8 fallback latin-1
file "items"
  delimiter ","
  col 0 id -> key Item
  col 1 title -> label Item
  col 2 year -> attr ReleaseDate
end
)");
    MemoryAccess files(std::map<std::string, std::string>{{"items", "1,Caf\xe9 Society,2016\n2,Good,20x6\n3,Fine,\n"}});
    auto r = ingest_dataset(cfg, files);
    EXPECT_EQ(r.graph.node({"T", "1"}).label, "Café Society");
    EXPECT_EQ(r.stats.invalid_values(), 1u);
    EXPECT_EQ(r.stats.kept(), 3u);

    cfg.fallback_encoding = "none";
    auto strict = ingest_dataset(cfg, files);
    EXPECT_EQ(strict.stats.skipped(), 1u);
}

TEST(Ingest, OrdinalFeedbackAndNeutralPolicy) {
    std::string doc = R"(reckg-mapping 1
source T
file "users"
  delimiter ","
  col 0 id -> key User
end
file "items"
  delimiter ","
  col 0 id -> key Item
  col 1 title -> label Item
end
file "likes"
  delimiter ","
  interaction Explicit Like
  col 0 u -> ref User
  col 1 i -> ref Item
  col 2 level -> level
end
)";
    MemoryAccess files({{"users", "u1\nu2\n"},
                        {"items", "a,A\nb,B\nc,C\n"},
                        {"likes", "u1,a,like\nu1,b,neutral\nu2,c,dislike\nu2,a,meh\nu1,a,like\n"}});
    auto r = ingest_dataset(parse_mapping_config(doc), files);
    const auto& likes = r.stats.files.back();
    EXPECT_EQ(likes.kept, 1u);
    EXPECT_EQ(likes.dropped_negative, 2u);
    EXPECT_EQ(likes.skipped, 2u);  // unknown level, duplicate interaction
    EXPECT_TRUE(validate_graph(r.graph).ok());

    auto keep = ingest_dataset(parse_mapping_config(doc + "neutral keep\n"), files);
    EXPECT_EQ(keep.stats.files.back().kept, 2u);
    bool saw_neutral = false;
    for (const auto& e : keep.graph.edges()) saw_neutral = saw_neutral || e.behavior == Behavior::Neutral;
    EXPECT_TRUE(saw_neutral);
}

TEST(Ingest, FlagsAndMultiValues) {
    auto cfg = parse_mapping_config(R"(reckg-mapping 1
source T
separator "|"
file "items"
  delimiter "\t"
  header yes
  col 0 id -> key Item
  col 1 title -> label Item
  col 2 cast -> attr Performer
  col 3 comedy -> flag Type "Comedy"
  col 4 bio -> attr Description
end
)");
    MemoryAccess files(std::map<std::string, std::string>{{"items",
                         "id\ttitle\tcast\tcomedy\tbio\n"
                         "1\tA\tAnn|Bo| Ann \t1\tx|y\n"
                         "2\tB\t\t0\t\n"
                         "3\tC\tCy\tmaybe\tz\n"}});
    auto r = ingest_dataset(cfg, files);
    const auto& g = r.graph;
    EXPECT_EQ(g.count_nodes(NodeKind::AttributeValue), 6u);  // ann, bo, cy, comedy, "x|y", "z"
    EXPECT_EQ(r.stats.invalid_values(), 1u);
    EXPECT_TRUE(g.find_attribute_value(make_attribute_class(AttributeName::Description), "x|y"));
}

TEST(Ingest, DeterministicAcrossRuns) {
    auto a = ingest_fixture("ml-100k.map", "ml_mini");
    auto b = ingest_fixture("ml-100k.map", "ml_mini");
    ASSERT_EQ(a.graph.node_count(), b.graph.node_count());
    for (std::size_t i = 0; i < a.graph.node_count(); ++i) EXPECT_EQ(a.graph.nodes()[i].id, b.graph.nodes()[i].id);
    ASSERT_EQ(a.graph.edge_count(), b.graph.edge_count());
    for (std::size_t i = 0; i < a.graph.edge_count(); ++i) EXPECT_TRUE(a.graph.edges()[i].key() == b.graph.edges()[i].key());
}

TEST(IngestProperty, AccountingHoldsOnRandomInteractionFiles) {
    reckg::testing::Rng rng(5);
    auto cfg = parse_mapping_config(R"(reckg-mapping 1
source R
rating threshold 3 exclusive scale 5
file "users"
  delimiter ","
  col 0 id -> key User
end
file "items"
  delimiter ","
  col 0 id -> key Item
end
file "ratings"
  delimiter ","
  columns 3
  interaction Explicit Rating
  col 0 u -> ref User
  col 1 i -> ref Item
  col 2 r -> rating
end
)");
    for (int round = 0; round < 30; ++round) {
        std::string ratings;
        std::size_t rows = 0, expected_positive = 0;
        std::set<std::pair<int, int>> seen;
        for (int k = 0, n = static_cast<int>(rng() % 60); k < n; ++k) {
            int u = static_cast<int>(rng() % 6), i = static_cast<int>(rng() % 6);
            int kind = static_cast<int>(rng() % 10);
            ++rows;
            if (kind == 0) {
                ratings += std::to_string(u) + "," + std::to_string(i) + "\n";  // arity
            } else if (kind == 1) {
                ratings += std::to_string(u) + "," + std::to_string(i) + ",x\n";
            } else {
                int r = static_cast<int>(rng() % 6);
                ratings += std::to_string(u) + "," + std::to_string(i) + "," + std::to_string(r) + "\n";
                if (u < 5 && i < 5 && r > 3 && seen.insert({u, i}).second) ++expected_positive;
            }
        }
        MemoryAccess files({{"users", "0\n1\n2\n3\n4\n"}, {"items", "0\n1\n2\n3\n4\n"}, {"ratings", ratings}});
        auto r = ingest_dataset(cfg, files);
        const auto& s = r.stats.files.back();
        EXPECT_EQ(s.rows, rows);
        EXPECT_EQ(s.rows, s.kept + s.dropped_negative + s.skipped);
        EXPECT_EQ(s.kept, expected_positive);
        EXPECT_TRUE(validate_graph(r.graph).ok());
    }
}
