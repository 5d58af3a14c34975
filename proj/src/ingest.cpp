#include <algorithm>
#include <fstream>
#include <future>
#include <regex>
#include <sstream>

#include <spdlog/spdlog.h>

#include "reckg/error.hpp"
#include "reckg/ingest.hpp"
#include "reckg/text.hpp"

namespace reckg {

namespace {

struct Row {
    std::size_t line = 0;
    std::vector<std::string> fields;
    std::string error;  // nonempty when the row could not be decoded
};

struct DecodedFile {
    std::vector<Row> rows;
    std::size_t header_columns = 0;
};

DecodedFile decode(const FileBinding& binding, const std::string& bytes, const MappingConfig& config) {
    DecodedFile out;
    std::size_t line_no = 0;
    bool header_pending = binding.header;
    for (auto line : text::split(bytes, "\n")) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (text::trim(line).empty()) continue;

        Row row;
        row.line = line_no;
        std::string decoded;
        if (text::is_valid_utf8(line)) {
            decoded = std::string(line);
        } else if (config.fallback_encoding == "latin-1") {
            decoded = text::latin1_to_utf8(line);
        } else {
            row.error = "invalid utf-8";
        }
        if (row.error.empty()) {
            for (auto field : text::split(decoded, binding.delimiter)) row.fields.emplace_back(field);
        }
        if (header_pending) {
            header_pending = false;
            out.header_columns = row.fields.size();
            continue;
        }
        out.rows.push_back(std::move(row));
    }
    return out;
}

std::string strip_year_suffix(std::string title) {
    static const std::regex suffix(R"(\s*\(\d{4}\)\s*$)");
    return std::regex_replace(title, suffix, "");
}

class Assembler {
public:
    Assembler(const MappingConfig& config, const IngestOptions& options)
        : config_(config), options_(options), graph_(config.registry()) {}

    void entity_file(const FileBinding& f, const DecodedFile& data, FileStats& stats) {
        const auto& key = *f.find(ColumnRole::Key);
        const auto* label = f.find(ColumnRole::Label);
        for (const auto& row : data.rows) {
            ++stats.rows;
            if (!accept_row(f, data, row, stats)) continue;

            auto local = std::string(text::trim(row.fields[key.index]));
            if (local.empty()) {
                skip(stats, "empty key");
                continue;
            }
            std::string display;
            if (label) {
                display = text::collapse_whitespace(row.fields[label->index]);
                if (config_.strip_title_year) display = strip_year_suffix(display);
            }
            NodeId id = entity_id(key.node_kind, local);
            if (display.empty() && key.node_kind == NodeKind::User) display = config_.source_tag + "_" + local;
            try {
                graph_.upsert_entity(key.node_kind, id, display, config_.source_tag);
            } catch (const Error& e) {
                skip(stats, "conflicting node kind");
                continue;
            }
            for (const auto& b : f.bindings) {
                if (b.role == ColumnRole::Attribute) {
                    attribute_column(id, b, row.fields[b.index], stats);
                } else if (b.role == ColumnRole::Flag) {
                    flag_column(id, b, row.fields[b.index], stats);
                }
            }
            ++stats.kept;
        }
    }

    // users live under their own prefix so user and item keys never collide
    NodeId entity_id(NodeKind kind, std::string_view key) const {
        if (kind == NodeKind::User) return {config_.source_tag, "user/" + std::string(key)};
        return {config_.source_tag, std::string(key)};
    }

    void interaction_file(const FileBinding& f, const DecodedFile& data, FileStats& stats) {
        const auto& ib = *f.interaction;
        const auto& user_ref = *f.find(ColumnRole::Ref, NodeKind::User);
        const auto& item_ref = *f.find(ColumnRole::Ref, NodeKind::Item);
        const auto& relation = graph_.registry().interaction_relation(ib.category);

        for (const auto& row : data.rows) {
            ++stats.rows;
            if (!accept_row(f, data, row, stats)) continue;

            NodeId user = entity_id(NodeKind::User, text::trim(row.fields[user_ref.index]));
            NodeId item = entity_id(NodeKind::Item, text::trim(row.fields[item_ref.index]));
            const auto* u = graph_.find_node(user);
            const auto* i = graph_.find_node(item);
            if (!u || !i || u->kind() != NodeKind::User || i->kind() != NodeKind::Item) {
                skip(stats, "unresolved reference");
                continue;
            }

            Edge edge{user, item, relation.name, ib.behavior, {}, {}, {}, config_.source_tag};
            if (ib.rating_column) {
                auto value = text::parse_double(row.fields[*ib.rating_column]);
                if (!value) {
                    skip(stats, "unparsable rating");
                    continue;
                }
                RatingOutcome outcome;
                try {
                    outcome = binarize_rating(*value, config_.rating);
                } catch (const Error&) {
                    skip(stats, "rating out of scale");
                    continue;
                }
                if (outcome == RatingOutcome::Dropped) {
                    ++stats.dropped_negative;
                    continue;
                }
                edge.weight = *value;
            }
            if (ib.level_column) {
                auto level = text::case_fold(text::trim(row.fields[*ib.level_column]));
                if (level == "like") {
                    edge.behavior = Behavior::Like;
                } else if (level == "neutral" && config_.neutral_positive) {
                    edge.behavior = Behavior::Neutral;
                } else if (level == "neutral" || level == "dislike") {
                    ++stats.dropped_negative;
                    continue;
                } else {
                    skip(stats, "unknown feedback level");
                    continue;
                }
            }
            if (ib.timestamp_column) {
                const auto& raw = row.fields[*ib.timestamp_column];
                if (auto ts = text::parse_int(raw)) {
                    edge.timestamp = *ts;
                } else if (!text::trim(raw).empty()) {
                    ++stats.invalid_values;
                }
            }
            if (ib.text_column) {
                const auto& body = row.fields[*ib.text_column];
                if (!text::trim(body).empty()) edge.payload = body;
            }
            if (graph_.add_edge(std::move(edge)) == AddResult::Duplicate) {
                skip(stats, "duplicate interaction");
                continue;
            }
            ++stats.kept;
        }
    }

    KnowledgeGraph take() { return std::move(graph_); }

private:
    bool accept_row(const FileBinding& f, const DecodedFile& data, const Row& row, FileStats& stats) {
        if (!row.error.empty()) {
            skip(stats, row.error);
            return false;
        }
        std::size_t expected = f.columns.value_or(data.header_columns);
        bool arity_ok = expected ? row.fields.size() == expected : row.fields.size() >= f.min_columns();
        if (!arity_ok) {
            std::string message = f.path + " line " + std::to_string(row.line) + ": expected " +
                                  std::to_string(expected ? expected : f.min_columns()) + " columns, got " +
                                  std::to_string(row.fields.size());
            if (options_.strict) throw Error(ErrorCode::RowArityMismatch, message);
            spdlog::debug("skipping row: {}", message);
            skip(stats, "arity mismatch");
            return false;
        }
        return true;
    }

    void attribute_column(const NodeId& owner, const ColumnBinding& b, std::string_view raw, FileStats& stats) {
        const auto& cls = *b.attribute;
        std::vector<std::string_view> values{raw};
        bool splittable = !cls.single_valued() && cls.value_kind != ValueKind::Text &&
                          cls.value_kind != ValueKind::ImageRef && !config_.multi_value_separator.empty();
        if (splittable) values = text::split(raw, config_.multi_value_separator);

        for (auto value : values) {
            if (text::trim(value).empty()) continue;
            std::string transformed;
            try {
                transformed = transform(cls, value);
            } catch (const Error& e) {
                ++stats.invalid_values;
                spdlog::debug("{}: {}", cls.key(), e.what());
                continue;
            }
            link(owner, cls, transformed);
        }
    }

    void flag_column(const NodeId& owner, const ColumnBinding& b, std::string_view raw, FileStats& stats) {
        auto v = text::trim(raw);
        if (v.empty() || v == "0") return;
        if (v != "1") {
            ++stats.invalid_values;
            return;
        }
        link(owner, *b.attribute, b.flag_value);
    }

    std::string transform(const AttributeClass& cls, std::string_view value) const {
        switch (cls.name) {
            case AttributeName::Age: {
                auto age = text::parse_int(value);
                if (!age) throw Error(ErrorCode::NegativeAge, "not an integer age: " + std::string(value));
                return bin_age(*age, config_.age_bins);
            }
            case AttributeName::Price: {
                if (!config_.price_bins) return std::string(value);
                auto price = text::parse_double(value);
                if (!price) throw Error(ErrorCode::OutOfScale, "not a price: " + std::string(value));
                return bin_price(*price, *config_.price_bins);
            }
            case AttributeName::ReleaseDate:
                return normalize_release_date(value, config_.date_format).canonical();
            default:
                return std::string(value);
        }
    }

    void link(const NodeId& owner, const AttributeClass& cls, std::string_view value) {
        auto target = graph_.upsert_attribute_value(cls, value, config_.source_tag);
        const auto& relation = graph_.registry().attribute_relation(cls);
        graph_.add_edge(Edge{owner, target, relation.name, {}, {}, {}, {}, config_.source_tag});
    }

    static void skip(FileStats& stats, const std::string& reason) {
        ++stats.skipped;
        ++stats.skip_reasons[reason];
    }

    const MappingConfig& config_;
    const IngestOptions& options_;
    KnowledgeGraph graph_;
};

std::size_t bound_column_count(const FileBinding& f) {
    std::set<std::size_t> indices;
    for (const auto& b : f.bindings) indices.insert(b.index);
    return indices.size();
}

}  // namespace

std::string DirectoryAccess::read(const std::string& path) const {
    std::string full = root_.empty() ? path : root_ + "/" + path;
    std::ifstream in(full, std::ios::binary);
    if (!in) throw Error(ErrorCode::FileUnreadable, full);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) throw Error(ErrorCode::FileUnreadable, full);
    return buffer.str();
}

std::string MemoryAccess::read(const std::string& path) const {
    auto it = files_.find(path);
    if (it == files_.end()) throw Error(ErrorCode::FileUnreadable, path);
    return it->second;
}

std::size_t IngestStats::rows() const {
    std::size_t n = 0;
    for (const auto& f : files) n += f.rows;
    return n;
}

std::size_t IngestStats::kept() const {
    std::size_t n = 0;
    for (const auto& f : files) n += f.kept;
    return n;
}

std::size_t IngestStats::dropped_negative() const {
    std::size_t n = 0;
    for (const auto& f : files) n += f.dropped_negative;
    return n;
}

std::size_t IngestStats::skipped() const {
    std::size_t n = 0;
    for (const auto& f : files) n += f.skipped;
    return n;
}

std::size_t IngestStats::invalid_values() const {
    std::size_t n = 0;
    for (const auto& f : files) n += f.invalid_values;
    return n;
}

IngestResult ingest_dataset(const MappingConfig& config, const FileAccess& files, const IngestOptions& options) {
    // Decode every file concurrently; assembly below is single-writer.
    std::vector<std::future<DecodedFile>> pending;
    pending.reserve(config.files.size());
    for (const auto& f : config.files) {
        pending.push_back(std::async(std::launch::async, [&config, &files, &f] {
            return decode(f, files.read(f.path), config);
        }));
    }
    std::vector<DecodedFile> decoded;
    decoded.reserve(pending.size());
    for (auto& p : pending) decoded.push_back(p.get());

    Assembler assembler(config, options);
    IngestStats stats;
    stats.files.resize(config.files.size());
    for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t i = 0; i < config.files.size(); ++i) {
            const auto& f = config.files[i];
            bool interaction = f.interaction.has_value();
            if (interaction != (pass == 1)) continue;
            auto& fs = stats.files[i];
            fs.path = f.path;
            if (interaction) {
                assembler.interaction_file(f, decoded[i], fs);
            } else {
                assembler.entity_file(f, decoded[i], fs);
            }
            std::size_t width = f.columns.value_or(decoded[i].header_columns);
            if (width == 0 && !decoded[i].rows.empty()) width = decoded[i].rows.front().fields.size();
            auto bound = bound_column_count(f);
            fs.unbound_columns = width > bound ? width - bound : 0;
            if (fs.unbound_columns > 0) {
                auto msg = f.path + ": " + std::to_string(fs.unbound_columns) + " unbound column(s) ignored";
                spdlog::warn("{}", msg);
                stats.warnings.push_back(msg);
            }
        }
    }

    IngestResult result{assembler.take(), std::move(stats)};
    for (const auto& n : result.graph.nodes()) {
        auto key = n.type.attribute ? n.type.attribute->key() : std::string(to_string(n.kind()));
        ++result.stats.nodes_by_kind[key];
    }
    for (const auto& e : result.graph.edges()) ++result.stats.edges_by_relation[e.relation];
    return result;
}

}  // namespace reckg
