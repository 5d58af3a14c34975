// Runs the seven acceptance criteria and prints one PASS/FAIL line for each.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "reckg/cli.hpp"
#include "reckg/export.hpp"
#include "reckg/ingest.hpp"
#include "reckg/integrate.hpp"
#include "reckg/query.hpp"
#include "support/support.hpp"

using namespace reckg;
namespace rt = reckg::testing;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void check(bool condition, const std::string& what) {
        if (!condition && pass) {
            pass = false;
            detail = what;
        }
    }
};

std::string cfg(std::string_view name) { return rt::fixture_path("configs/" + std::string(name)).string(); }
std::string dat(std::string_view name) { return rt::fixture_path("fixtures/" + std::string(name)).string(); }

int cli(std::vector<std::string> args, std::string* out = nullptr) {
    std::ostringstream o, e;
    int code = cli::run(args, o, e);
    if (out) *out = o.str();
    return code;
}

IngestResult ingest(std::string_view config, const std::string& dir) {
    return ingest_dataset(parse_mapping_config(rt::read_text(cfg(config))), DirectoryAccess(dir));
}

// 1
Outcome explanation_paths() {
    Outcome o;
    rt::TempDir dir;
    auto start = std::chrono::steady_clock::now();
    auto ml = (dir / "ml.json").string(), ym = (dir / "ym.json").string(), merged = (dir / "m.json").string();
    o.check(cli({"ingest", "-c", cfg("ml-100k.map"), "-d", dat("ml_mini"), "-o", ml}) == 0, "ML ingest failed");
    o.check(cli({"ingest", "-c", cfg("ym.map"), "-d", dat("ym_mini"), "-o", ym}) == 0, "YM ingest failed");
    o.check(cli({"merge", "-b", ml, "-i", ym, "-o", merged}) == 0, "merge failed");
    std::string hanks, spielberg;
    o.check(cli({"paths", "-g", merged, "--from", "ML_125610", "--to", "Forrest Gump", "--max-len", "3"}, &hanks) == 0,
            "paths to Forrest Gump failed");
    o.check(cli({"paths", "-g", merged, "--from", "ML_38802", "--to", "Schindler's List", "--max-len", "3"},
                &spielberg) == 0,
            "paths to Schindler's List failed");
    auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.check(hanks == "ML_125610 —RELATED_ML→ Toy Story —PERFORMED_BY→ Tom Hanks —PERFORMED→ Forrest Gump\n",
            "unexpected performer paths: " + hanks);
    o.check(spielberg ==
                "ML_38802 —RELATED_ML→ Jaws —PRODUCED_BY→ Steven Spielberg —PRODUCED→ Schindler's List\n"
                "ML_38802 —RELATED_ML→ Jurassic Park —PRODUCED_BY→ Steven Spielberg —PRODUCED→ Schindler's List\n",
            "unexpected producer paths: " + spielberg);
    o.check(elapsed < 1.0, "took " + std::to_string(elapsed) + " s");
    if (o.pass) o.detail = "3 paths, " + std::to_string(static_cast<int>(elapsed * 1000)) + " ms";
    return o;
}

// 2
Outcome characteristics_table() {
    Outcome o;
    auto ml = ingest("ml-100k.map", dat("ml_mini")).graph;
    auto ym = ingest("ym.map", dat("ym_mini")).graph;
    auto merged = merge_graphs(ml, ym, resolve_items(ml, ym, {})).graph;
    auto full = characteristics_report(merged);
    CharacteristicsReport all{Consideration::Considered, Consideration::Considered, Consideration::Considered,
                              Consideration::Considered, Consideration::Considered};
    o.check(full == all, "merged fixture:\n" + format_characteristics(full));

    auto stripped = characteristics_report(ingest("ml-stripped.map", dat("ml_mini")).graph);
    o.check(stripped.user_attribute == Consideration::NotConsidered &&
                stripped.item_attribute == Consideration::Considered &&
                stripped.interaction == Consideration::PartiallyConsidered &&
                stripped.interoperability == Consideration::NotConsidered,
            "stripped fixture:\n" + format_characteristics(stripped));

    // item-attribute-only graph that also carries a value of an undeclared producer class
    auto item_only = ingest("ml-stripped.map", dat("ml_mini")).graph;
    Node stray;
    stray.id = {"RECKG", "Producer_1:someone"};
    stray.type = NodeType::value(make_attribute_class(AttributeName::Producer, 1));
    stray.value = "someone";
    stray.label = "Someone";
    item_only.insert_node_unchecked(stray);
    auto broken = characteristics_report(item_only);
    o.check(broken.user_attribute == Consideration::NotConsidered &&
                broken.item_attribute == Consideration::Considered &&
                broken.interaction == Consideration::PartiallyConsidered &&
                broken.consistency == Consideration::NotConsidered &&
                broken.interoperability == Consideration::NotConsidered,
            "unregistered class graph:\n" + format_characteristics(broken));
    if (o.pass) o.detail = "merged all Considered; stripped and unregistered-class patterns match";
    return o;
}

// 3
Outcome determinism() {
    Outcome o;
    rt::TempDir dir;
    rt::write_synthetic_ml100k(dir / "ml100k");
    std::vector<std::string> hashes[2];
    for (int run = 0; run < 2; ++run) {
        auto tag = std::to_string(run);
        auto graph = (dir / ("g" + tag + ".json")).string();
        o.check(cli({"ingest", "-c", cfg("ml-100k.map"), "-d", (dir / "ml100k").string(), "-o", graph}) == 0, "ingest failed");
        auto triples = (dir / ("t" + tag + ".nt")).string();
        auto json = (dir / ("j" + tag + ".json")).string();
        auto csv = dir / ("csv" + tag);
        o.check(cli({"export", "-g", graph, "-k", "triples", "-o", triples}) == 0, "triples export failed");
        o.check(cli({"export", "-g", graph, "-k", "json", "-o", json}) == 0, "json export failed");
        o.check(cli({"export", "-g", graph, "-k", "csv", "-o", csv.string(), "--cypher"}) == 0, "csv export failed");
        hashes[run].push_back(rt::sha256_file(graph));
        hashes[run].push_back(rt::sha256_file(triples));
        hashes[run].push_back(rt::sha256_file(json));
        std::vector<std::filesystem::path> files;
        for (const auto& entry : std::filesystem::directory_iterator(csv)) files.push_back(entry.path().filename());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) hashes[run].push_back(f.string() + ":" + rt::sha256_file(csv / f));
    }
    o.check(hashes[0] == hashes[1], "artifact hashes differ between runs");
    if (o.pass) o.detail = std::to_string(hashes[0].size()) + " artifacts hash-identical";
    return o;
}

// 4
Outcome oracle_equivalence() {
    Outcome o;
    rt::Rng rng(20240401);
    std::size_t queries = 0;
    for (int round = 0; round < 100; ++round) {
        auto g = rt::random_graph(rng, 12);
        for (const auto& a : g.nodes()) {
            for (std::size_t k = 0; k <= 4; ++k) {
                o.check(k_hop_neighbors(g, a.id, k) == rt::brute_force_k_hop(g, a.id, k),
                        "k-hop mismatch in graph " + std::to_string(round));
            }
            for (const auto& b : g.nodes()) {
                std::set<rt::PathSignature> got;
                for (const auto& p : enumerate_paths(g, a.id, b.id, 4, SIZE_MAX)) got.insert(rt::signature(p));
                o.check(got == rt::brute_force_paths(g, a.id, b.id, 4), "path mismatch in graph " + std::to_string(round));
                ++queries;
            }
        }
    }
    for (int round = 0; round < 50; ++round) {
        auto base = rt::random_catalogue(rng, "B");
        auto incoming = rt::random_catalogue(rng, round % 10 == 0 ? "B" : "I");
        ResolutionRule rule;
        auto merged = merge_graphs(base, incoming, resolve_items(base, incoming, rule));
        o.check(merged.graph.node_count() == rt::union_node_count_oracle(base, incoming, rule),
                "merge node count mismatch in pair " + std::to_string(round));
    }
    if (o.pass) o.detail = std::to_string(queries) + " path queries on 100 graphs, 50 merge pairs";
    return o;
}

// 5
Outcome round_trip() {
    Outcome o;
    rt::Rng rng(5);
    int failures = 0;
    for (int round = 0; round < 200; ++round) {
        auto g = rt::random_graph(rng, 12);
        if (!graphs_isomorphic_labeled(g, import_graph_json(export_graph_json(g)))) ++failures;
    }
    o.check(failures == 0, std::to_string(failures) + " of 200 round trips failed");
    if (o.pass) o.detail = "200 graphs, 0 failures";
    return o;
}

// 6
Outcome binarization_accounting() {
    Outcome o;
    rt::TempDir dir;
    rt::write_synthetic_ml100k(dir.path());
    // independent single pass over the raw interaction file
    std::ifstream in(dir / "u.data");
    std::size_t rows = 0, positive = 0;
    for (std::string line; std::getline(in, line);) {
        ++rows;
        std::istringstream fields(line);
        long user, item, rating;
        fields >> user >> item >> rating;
        if (rating >= 4) ++positive;
    }
    auto result = ingest("ml-100k.map", dir.path().string());
    const auto& s = result.stats.files.back();
    std::size_t explicit_edges = 0;
    for (const auto& e : result.graph.edges()) explicit_edges += e.relation == "explicitInteraction";
    o.check(rows == 100000, "fixture has " + std::to_string(rows) + " rows");
    o.check(explicit_edges == positive,
            std::to_string(explicit_edges) + " explicit edges vs " + std::to_string(positive) + " ratings >= 4");
    o.check(s.kept + s.dropped_negative + s.skipped == 100000, "kept + dropped + skipped != 100000");
    if (o.pass) {
        o.detail = "kept " + std::to_string(s.kept) + " + dropped " + std::to_string(s.dropped_negative) + " + skipped " +
                   std::to_string(s.skipped) + " = 100000";
    }
    return o;
}

// 7
Outcome validity() {
    Outcome o;
    std::size_t graphs = 0;
    auto check = [&](const KnowledgeGraph& g, const std::string& what) {
        ++graphs;
        auto r = validate_graph(g);
        o.check(r.ok(), what + ": " + (r.ok() ? "" : r.violations.front().subject));
    };
    auto ml = ingest("ml-100k.map", dat("ml_mini")).graph;
    auto ym = ingest("ym.map", dat("ym_mini")).graph;
    auto pair = ingest("ml-100k.map", dat("ml_pair")).graph;
    check(ml, "ml_mini");
    check(ym, "ym_mini");
    check(pair, "ml_pair");
    check(ingest("ml-100k.map", dat("ml_malformed")).graph, "ml_malformed");
    check(ingest("ml-stripped.map", dat("ml_mini")).graph, "stripped");
    check(merge_graphs(ml, ym, resolve_items(ml, ym, {})).graph, "ml+ym");
    check(merge_graphs(ym, ml, resolve_items(ym, ml, {})).graph, "ym+ml");
    check(merge_graphs(pair, ym, resolve_items(pair, ym, {})).graph, "pair+ym");
    check(merge_graphs(ml, ml, resolve_items(ml, ml, {})).graph, "self merge");
    rt::Rng rng(7);
    for (int round = 0; round < 50; ++round) {
        auto base = rt::random_catalogue(rng, "B");
        auto incoming = rt::random_catalogue(rng, "I");
        check(merge_graphs(base, incoming, resolve_items(base, incoming, {})).graph, "random merge");
    }
    if (o.pass) o.detail = std::to_string(graphs) + " ingested/merged graphs, 0 violations";
    return o;
}

}  // namespace

int main() {
    setenv("RECKG_LOG", "error", 0);
    cli::configure_logging();
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"1 explanation paths", explanation_paths},
        {"2 characteristics table", characteristics_table},
        {"3 determinism", determinism},
        {"4 oracle equivalence", oracle_equivalence},
        {"5 json round trip", round_trip},
        {"6 binarization accounting", binarization_accounting},
        {"7 validity", validity},
    };
    int failed = 0;
    for (const auto& [name, run] : criteria) {
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::cout << (o.pass ? "PASS" : "FAIL") << "  " << name << "  (" << o.detail << ")\n";
        failed += !o.pass;
    }
    return failed == 0 ? 0 : 1;
}
