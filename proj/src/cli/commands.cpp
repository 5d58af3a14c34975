#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "reckg/cli.hpp"
#include "reckg/export.hpp"
#include "reckg/ingest.hpp"
#include "reckg/integrate.hpp"
#include "reckg/query.hpp"
#include "reckg/text.hpp"

namespace reckg::cli {

namespace {

using nlohmann::json;

/// Error raised by the CLI itself, already mapped to an exit code.
struct CommandError : std::runtime_error {
    CommandError(int code, const std::string& msg) : std::runtime_error(msg), exit_code(code) {}
    int exit_code;
};

struct Context {
    std::ostream& out;
    bool json_output = false;
};

std::string read_file(const std::string& path, int failure_code) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CommandError(failure_code, "cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

KnowledgeGraph load_graph(const std::string& path) {
    if (!std::filesystem::is_regular_file(path)) throw CommandError(kDataError, "cannot read graph " + path);
    return load_graph_json(path);
}

void emit_json(Context& ctx, const json& j) { ctx.out << j.dump(2) << '\n'; }

/// Accepts "ns:local", then an exact user/item label, then an item alias.
NodeId resolve_node(const KnowledgeGraph& g, const std::string& ref) {
    if (auto id = NodeId::parse(ref); id && g.find_node(*id)) return *id;
    std::vector<NodeId> by_label, by_alias;
    for (const auto& n : g.nodes()) {
        if (n.kind() == NodeKind::AttributeValue) continue;
        if (n.label == ref) by_label.push_back(n.id);
        if (n.aliases.contains(ref)) by_alias.push_back(n.id);
    }
    const auto& hits = by_label.empty() ? by_alias : by_label;
    if (hits.size() == 1) return hits.front();
    if (hits.empty()) throw Error(ErrorCode::UnknownNode, "no node matches '" + ref + "'");
    std::string names;
    for (const auto& id : hits) names += " " + id.str();
    throw Error(ErrorCode::UnknownNode, "'" + ref + "' is ambiguous:" + names);
}

json path_json(const Path& p, const KnowledgeGraph& g) {
    json nodes = json::array();
    for (const auto& id : p.nodes) nodes.push_back(id.str());
    json steps = json::array();
    for (const auto& s : p.steps) {
        steps.push_back({{"relation", s.relation}, {"direction", s.direction == Direction::Forward ? "forward" : "backward"}});
    }
    return {{"nodes", nodes}, {"steps", steps}, {"length", p.length()}, {"explanation", explain_path(p, g)}};
}

// subcommands ------------------------------------------------------------------

struct IngestArgs {
    std::string config, data, out;
    bool strict = false;
};

int cmd_ingest(Context& ctx, const IngestArgs& a) {
    auto document = read_file(a.config, kConfigError);
    auto config = parse_mapping_config(document);
    auto data_dir = a.data.empty() ? std::filesystem::path(a.config).parent_path().string() : a.data;
    auto result = ingest_dataset(config, DirectoryAccess(data_dir), IngestOptions{a.strict});
    save_graph_json(result.graph, a.out);

    const auto& s = result.stats;
    if (ctx.json_output) {
        json files = json::array();
        for (const auto& f : s.files) {
            files.push_back({{"path", f.path},
                             {"rows", f.rows},
                             {"kept", f.kept},
                             {"dropped_negative", f.dropped_negative},
                             {"skipped", f.skipped},
                             {"invalid_values", f.invalid_values},
                             {"skip_reasons", f.skip_reasons}});
        }
        emit_json(ctx, {{"command", "ingest"},
                        {"output", a.out},
                        {"rows", s.rows()},
                        {"kept", s.kept()},
                        {"dropped_negative", s.dropped_negative()},
                        {"skipped", s.skipped()},
                        {"invalid_values", s.invalid_values()},
                        {"nodes", result.graph.node_count()},
                        {"edges", result.graph.edge_count()},
                        {"nodes_by_kind", s.nodes_by_kind},
                        {"edges_by_relation", s.edges_by_relation},
                        {"files", files},
                        {"warnings", s.warnings}});
        return kOk;
    }
    ctx.out << "rows: " << s.rows() << "\nkept: " << s.kept() << "\ndropped_negative: " << s.dropped_negative()
            << "\nskipped: " << s.skipped() << "\ninvalid_values: " << s.invalid_values()
            << "\nnodes: " << result.graph.node_count() << "\nedges: " << result.graph.edge_count() << '\n';
    for (const auto& f : s.files) {
        ctx.out << "file " << f.path << ": rows " << f.rows << ", kept " << f.kept << ", dropped " << f.dropped_negative
                << ", skipped " << f.skipped << '\n';
        for (const auto& [reason, n] : f.skip_reasons) ctx.out << "  " << reason << ": " << n << '\n';
    }
    for (const auto& w : s.warnings) ctx.out << "warning: " << w << '\n';
    ctx.out << "wrote " << a.out << '\n';
    return kOk;
}

struct MergeArgs {
    std::string base, incoming, out, report;
    std::vector<std::string> keys{"title", "year"};
    int year_tolerance = 0;
    bool strip_article = false;
};

int cmd_merge(Context& ctx, const MergeArgs& a) {
    auto base = load_graph(a.base);
    auto incoming = load_graph(a.incoming);
    ResolutionRule rule;
    rule.match_keys.clear();
    for (const auto& k : a.keys) rule.match_keys.push_back(k == "title" ? MatchKey::Title : MatchKey::ReleaseYear);
    rule.year_tolerance = a.year_tolerance;
    rule.title.strip_article = a.strip_article;

    auto report = resolve_items(base, incoming, rule);
    auto merged = merge_graphs(base, incoming, report);
    report.stats = merged.stats;
    save_graph_json(merged.graph, a.out);
    if (!a.report.empty()) {
        std::ofstream rf(a.report, std::ios::binary | std::ios::trunc);
        rf << format_resolution_report(report);
        rf.flush();
        if (!rf) throw Error(ErrorCode::SinkWriteError, "cannot write " + a.report);
    }

    const auto& s = merged.stats;
    if (ctx.json_output) {
        json matches = json::array();
        for (const auto& m : report.matches) matches.push_back({{"base", m.base.str()}, {"incoming", m.incoming.str()}, {"key", m.key}});
        json conflicts = json::array();
        for (const auto& c : report.conflicts) {
            json cands = json::array();
            for (const auto& id : c.candidates) cands.push_back(id.str());
            conflicts.push_back({{"incoming", c.incoming.str()}, {"candidates", cands}, {"key", c.key}});
        }
        emit_json(ctx, {{"command", "merge"},
                        {"output", a.out},
                        {"matched", s.matched_items},
                        {"matches", matches},
                        {"conflicts", conflicts},
                        {"unmatched_incoming", report.unmatched_incoming},
                        {"nodes_added", s.nodes_added},
                        {"edges_added", s.edges_added},
                        {"attribute_values_unified", s.attribute_values_unified},
                        {"entities_unified", s.entities_unified},
                        {"edges_unified", s.edges_unified},
                        {"alternates_recorded", s.alternates_recorded},
                        {"nodes", merged.graph.node_count()},
                        {"edges", merged.graph.edge_count()}});
        return kOk;
    }
    ctx.out << "matched: " << s.matched_items << "\nconflicts: " << report.conflicts.size()
            << "\nunmatched_incoming: " << report.unmatched_incoming << "\nnodes_added: " << s.nodes_added
            << "\nedges_added: " << s.edges_added << "\nattribute_values_unified: " << s.attribute_values_unified
            << "\nentities_unified: " << s.entities_unified << "\nedges_unified: " << s.edges_unified
            << "\nalternates_recorded: " << s.alternates_recorded << "\nnodes: " << merged.graph.node_count()
            << "\nedges: " << merged.graph.edge_count() << '\n';
    for (const auto& m : report.matches) ctx.out << "match " << m.base.str() << " <- " << m.incoming.str() << '\n';
    ctx.out << "wrote " << a.out << '\n';
    return kOk;
}

struct PathArgs {
    std::string graph, from, to;
    std::size_t max_len = 3;
    std::size_t limit = 100;
};

int cmd_paths(Context& ctx, const PathArgs& a) {
    auto g = load_graph(a.graph);
    auto from = resolve_node(g, a.from);
    auto to = resolve_node(g, a.to);
    auto paths = enumerate_paths(g, from, to, a.max_len, a.limit);
    if (ctx.json_output) {
        json arr = json::array();
        for (const auto& p : paths) arr.push_back(path_json(p, g));
        emit_json(ctx, {{"command", "paths"}, {"from", from.str()}, {"to", to.str()}, {"paths", arr}});
        return kOk;
    }
    for (const auto& p : paths) ctx.out << explain_path(p, g) << '\n';
    return kOk;
}

struct CandidateArgs {
    std::string graph, user;
    std::size_t max_len = 3;
    std::size_t top = 10;
};

int cmd_candidates(Context& ctx, const CandidateArgs& a) {
    auto g = load_graph(a.graph);
    auto user = resolve_node(g, a.user);
    auto ranked = candidate_items(g, user, a.max_len);
    if (ranked.size() > a.top) ranked.resize(a.top);
    if (ctx.json_output) {
        json arr = json::array();
        for (const auto& c : ranked) {
            json support = json::array();
            for (const auto& p : c.support) support.push_back(explain_path(p, g));
            arr.push_back({{"item", c.item.str()}, {"label", g.node(c.item).label}, {"paths", c.support.size()}, {"support", support}});
        }
        emit_json(ctx, {{"command", "candidates"}, {"user", user.str()}, {"candidates", arr}});
        return kOk;
    }
    std::size_t rank = 0;
    for (const auto& c : ranked) {
        ctx.out << ++rank << ". " << g.node(c.item).label << " (" << c.item.str() << "), " << c.support.size()
                << (c.support.size() == 1 ? " path\n" : " paths\n");
        for (const auto& p : c.support) ctx.out << "   " << explain_path(p, g) << '\n';
    }
    return kOk;
}

struct ExportArgs {
    std::string graph, kind = "json", out;
    bool cypher = false;
};

int cmd_export(Context& ctx, const ExportArgs& a) {
    auto g = load_graph(a.graph);
    json summary{{"command", "export"}, {"kind", a.kind}, {"output", a.out}};
    if (a.kind == "csv") {
        auto manifest = export_graphdb_csv(g, a.out, GraphDbOptions{a.cypher});
        json files = json::array();
        for (const auto& m : manifest) files.push_back({{"file", m.file}, {"rows", m.rows}});
        summary["files"] = files;
        if (!ctx.json_output) {
            for (const auto& m : manifest) ctx.out << m.file << '\t' << m.rows << '\n';
        }
    } else {
        std::ofstream out(a.out, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::SinkWriteError, "cannot open " + a.out);
        if (a.kind == "triples") {
            auto lines = export_triples(g, out);
            summary["lines"] = lines;
            if (!ctx.json_output) ctx.out << "lines: " << lines << '\n';
        } else {
            auto bytes = export_graph_json(g, out);
            summary["bytes"] = bytes;
            if (!ctx.json_output) ctx.out << "bytes: " << bytes << '\n';
        }
    }
    if (ctx.json_output) {
        emit_json(ctx, summary);
    } else {
        ctx.out << "wrote " << a.out << '\n';
    }
    return kOk;
}

int cmd_report(Context& ctx, const std::string& graph) {
    auto r = characteristics_report(load_graph(graph));
    if (ctx.json_output) {
        emit_json(ctx, {{"user_attribute", to_string(r.user_attribute)},
                        {"item_attribute", to_string(r.item_attribute)},
                        {"interaction", to_string(r.interaction)},
                        {"consistency", to_string(r.consistency)},
                        {"interoperability", to_string(r.interoperability)}});
        return kOk;
    }
    ctx.out << format_characteristics(r);
    return kOk;
}

int cmd_validate(Context& ctx, const std::string& graph) {
    auto g = load_graph(graph);
    auto report = validate_graph(g);
    if (ctx.json_output) {
        json arr = json::array();
        for (const auto& v : report.violations) {
            arr.push_back({{"kind", to_string(v.kind)}, {"subject", v.subject}, {"detail", v.detail}});
        }
        emit_json(ctx, {{"valid", report.ok()}, {"nodes", g.node_count()}, {"edges", g.edge_count()}, {"violations", arr}});
    } else if (report.ok()) {
        ctx.out << "valid: " << g.node_count() << " nodes, " << g.edge_count() << " edges\n";
    } else {
        for (const auto& v : report.violations) ctx.out << to_string(v.kind) << '\t' << v.subject << '\t' << v.detail << '\n';
        ctx.out << "violations: " << report.violations.size() << '\n';
    }
    return report.ok() ? kOk : kDataError;
}

}  // namespace

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::NoMapping:
        case ErrorCode::AmbiguousBinding:
        case ErrorCode::DuplicateRole:
        case ErrorCode::SyntaxError:
        case ErrorCode::UnknownAttributeClass:
        case ErrorCode::BinOrderError:
        case ErrorCode::MissingNodeKey:
            return kConfigError;
        case ErrorCode::MissingMatchKey:
            return kMissingMatchKey;
        case ErrorCode::UnknownNode:
        case ErrorCode::NotAUserNode:
        case ErrorCode::PathNotInGraph:
            return kUnknownNode;
        case ErrorCode::SinkWriteError:
            return kWriteFailure;
        default:
            return kDataError;
    }
}

void configure_logging() {
    auto logger = spdlog::get("reckg");
    if (!logger) {
        logger = spdlog::stderr_color_mt("reckg");
        spdlog::set_default_logger(logger);
    }
    auto level = spdlog::level::warn;
    if (const char* env = std::getenv("RECKG_LOG"); env && *env) {
        auto name = text::case_fold(env);
        if (name == "warning") name = "warn";
        level = spdlog::level::from_str(name);
    }
    spdlog::set_level(level);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"reckg: build, integrate, query and export recommendation knowledge graphs"};
    app.name("reckg");
    app.require_subcommand(1);
    Context ctx{out};
    app.add_flag("--json", ctx.json_output, "Machine-readable JSON output instead of text");
    app.fallthrough();

    IngestArgs ingest;
    auto* ingest_cmd = app.add_subcommand("ingest", "Build a graph from a dataset and its mapping config");
    ingest_cmd->add_option("-c,--config", ingest.config, "Mapping config file")->required();
    ingest_cmd->add_option("-d,--data", ingest.data, "Dataset directory (default: the config's directory)");
    ingest_cmd->add_option("-o,--out", ingest.out, "Output graph JSON")->required();
    ingest_cmd->add_flag("--strict", ingest.strict, "Abort on malformed rows instead of skipping them");

    MergeArgs merge;
    auto* merge_cmd = app.add_subcommand("merge", "Resolve shared items and merge an incoming graph into a base graph");
    merge_cmd->add_option("-b,--base", merge.base, "Base graph JSON")->required();
    merge_cmd->add_option("-i,--incoming", merge.incoming, "Incoming graph JSON")->required();
    merge_cmd->add_option("-o,--out", merge.out, "Output graph JSON")->required();
    merge_cmd->add_option("--report", merge.report, "Write the resolution report here");
    merge_cmd->add_option("--keys", merge.keys, "Match keys: title, year")
        ->delimiter(',')
        ->check(CLI::IsMember({"title", "year"}))
        ->capture_default_str();
    merge_cmd->add_option("--year-tolerance", merge.year_tolerance, "Allowed release-year difference")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    merge_cmd->add_flag("--strip-article", merge.strip_article, "Ignore leading/trailing articles in titles");

    PathArgs paths;
    auto* paths_cmd = app.add_subcommand("paths", "Explain every simple path between two nodes");
    paths_cmd->add_option("-g,--graph", paths.graph, "Graph JSON")->required();
    paths_cmd->add_option("--from", paths.from, "Start node: ns:local id or label")->required();
    paths_cmd->add_option("--to", paths.to, "End node: ns:local id or label")->required();
    paths_cmd->add_option("--max-len", paths.max_len, "Maximum hops")->capture_default_str();
    paths_cmd->add_option("--limit", paths.limit, "Maximum paths reported")->capture_default_str();

    CandidateArgs cand;
    auto* cand_cmd = app.add_subcommand("candidates", "Rank items reachable from a user through item attributes");
    cand_cmd->add_option("-g,--graph", cand.graph, "Graph JSON")->required();
    cand_cmd->add_option("-u,--user", cand.user, "User node: ns:local id or label")->required();
    cand_cmd->add_option("--max-len", cand.max_len, "Maximum hops")->capture_default_str();
    cand_cmd->add_option("--top", cand.top, "Number of candidates shown")->capture_default_str();

    ExportArgs exp;
    auto* export_cmd = app.add_subcommand("export", "Write the graph as JSON, triples or graph-database CSV");
    export_cmd->add_option("-g,--graph", exp.graph, "Graph JSON")->required();
    export_cmd->add_option("-k,--kind", exp.kind, "json, triples or csv")
        ->check(CLI::IsMember({"json", "triples", "csv"}))
        ->capture_default_str();
    export_cmd->add_option("-o,--out", exp.out, "Output file, or directory for csv")->required();
    export_cmd->add_flag("--cypher", exp.cypher, "With csv: also write import.cypher");

    std::string report_graph;
    auto* report_cmd = app.add_subcommand("report", "Print the five-characteristic table");
    report_cmd->add_option("-g,--graph", report_graph, "Graph JSON")->required();

    std::string validate_graph_path;
    auto* validate_cmd = app.add_subcommand("validate", "Check a graph against the schema");
    validate_cmd->add_option("-g,--graph", validate_graph_path, "Graph JSON")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());  // CLI11 consumes from the back
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        if (*ingest_cmd) return cmd_ingest(ctx, ingest);
        if (*merge_cmd) return cmd_merge(ctx, merge);
        if (*paths_cmd) return cmd_paths(ctx, paths);
        if (*cand_cmd) return cmd_candidates(ctx, cand);
        if (*export_cmd) return cmd_export(ctx, exp);
        if (*report_cmd) return cmd_report(ctx, report_graph);
        if (*validate_cmd) return cmd_validate(ctx, validate_graph_path);
    } catch (const CommandError& e) {
        err << "error: " << e.what() << '\n';
        return e.exit_code;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kWriteFailure;
    }
    return kFailure;
}

}  // namespace reckg::cli
