#include <algorithm>
#include <set>

#include "reckg/error.hpp"
#include "reckg/ingest.hpp"
#include "reckg/text.hpp"

namespace reckg {

namespace {

constexpr std::string_view kMagic = "reckg-mapping";
constexpr int kGrammarVersion = 1;

struct Token {
    std::string text;
    bool quoted = false;
    int line = 0;
    int column = 0;
};

[[noreturn]] void fail(ErrorCode code, int line, int column, const std::string& message) {
    throw Error(code, "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message);
}

[[noreturn]] void fail(ErrorCode code, const Token& at, const std::string& message) {
    fail(code, at.line, at.column, message);
}

std::vector<Token> tokenize_line(std::string_view line, int line_no) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        char c = line[i];
        if (c == ' ' || c == '\t' || c == '\r') {
            ++i;
            continue;
        }
        if (c == '#') break;
        Token tok{{}, false, line_no, static_cast<int>(i + 1)};
        if (c == '"') {
            tok.quoted = true;
            ++i;
            bool closed = false;
            while (i < line.size()) {
                char d = line[i++];
                if (d == '"') {
                    closed = true;
                    break;
                }
                if (d == '\\') {
                    if (i == line.size()) break;
                    char e = line[i++];
                    switch (e) {
                        case 't': tok.text.push_back('\t'); break;
                        case 'n': tok.text.push_back('\n'); break;
                        case '\\': tok.text.push_back('\\'); break;
                        case '"': tok.text.push_back('"'); break;
                        default: fail(ErrorCode::SyntaxError, line_no, static_cast<int>(i), "unknown escape");
                    }
                    continue;
                }
                tok.text.push_back(d);
            }
            if (!closed) fail(ErrorCode::SyntaxError, tok, "unterminated string");
        } else {
            while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r' && line[i] != '"' &&
                   line[i] != '#') {
                tok.text.push_back(line[i++]);
            }
        }
        tokens.push_back(std::move(tok));
    }
    return tokens;
}

class Parser {
public:
    MappingConfig parse(std::string_view document) {
        int line_no = 0;
        bool seen_magic = false;
        for (auto raw : text::split(document, "\n")) {
            ++line_no;
            auto tokens = tokenize_line(raw, line_no);
            if (tokens.empty()) continue;
            if (!seen_magic) {
                expect_magic(tokens);
                seen_magic = true;
                continue;
            }
            if (current_) {
                file_directive(tokens);
            } else {
                global_directive(tokens);
            }
        }
        if (!seen_magic) fail(ErrorCode::SyntaxError, 1, 1, "missing '" + std::string(kMagic) + "' header");
        if (current_) fail(ErrorCode::SyntaxError, line_no, 1, "file block not closed with 'end'");
        finish();
        return std::move(config_);
    }

private:
    void expect_magic(const std::vector<Token>& t) {
        if (t[0].text != kMagic || t[0].quoted) fail(ErrorCode::SyntaxError, t[0], "expected '" + std::string(kMagic) + "'");
        expect_count(t, 2);
        if (number(t[1]) != kGrammarVersion) fail(ErrorCode::SyntaxError, t[1], "unsupported grammar version");
    }

    void global_directive(const std::vector<Token>& t) {
        const auto& d = t[0].text;
        if (d == "source") {
            expect_count(t, 2);
            config_.source_tag = t[1].text;
            if (config_.source_tag.empty() || config_.source_tag.find(':') != std::string::npos) {
                fail(ErrorCode::SyntaxError, t[1], "source tag must be nonempty and contain no ':'");
            }
        } else if (d == "encoding") {
            if (t.size() != 2 && t.size() != 4) fail(ErrorCode::SyntaxError, t[0], "usage: encoding <enc> [fallback <enc>]");
            config_.encoding = text::case_fold(t[1].text);
            if (config_.encoding != "utf-8") fail(ErrorCode::SyntaxError, t[1], "primary encoding must be utf-8");
            if (t.size() == 4) {
                if (t[2].text != "fallback") fail(ErrorCode::SyntaxError, t[2], "expected 'fallback'");
                config_.fallback_encoding = text::case_fold(t[3].text);
                if (config_.fallback_encoding == "iso-8859-1") config_.fallback_encoding = "latin-1";
                if (config_.fallback_encoding != "latin-1" && config_.fallback_encoding != "none") {
                    fail(ErrorCode::SyntaxError, t[3], "fallback must be latin-1 or none");
                }
            }
        } else if (d == "separator") {
            expect_count(t, 2);
            config_.multi_value_separator = t[1].text;
        } else if (d == "date_format") {
            expect_count(t, 2);
            config_.date_format.pattern = t[1].text;
        } else if (d == "age_bins") {
            config_.age_bins.edges.clear();
            for (std::size_t i = 1; i < t.size(); ++i) config_.age_bins.edges.push_back(static_cast<int>(number(t[i])));
            age_bins_at_ = t[0];
        } else if (d == "age_labels") {
            config_.age_bins.labels.clear();
            for (std::size_t i = 1; i < t.size(); ++i) config_.age_bins.labels.push_back(t[i].text);
        } else if (d == "price_bins") {
            if (!config_.price_bins) config_.price_bins.emplace();
            config_.price_bins->edges.clear();
            for (std::size_t i = 1; i < t.size(); ++i) config_.price_bins->edges.push_back(real(t[i]));
        } else if (d == "price_labels") {
            if (!config_.price_bins) config_.price_bins.emplace();
            config_.price_bins->labels.clear();
            for (std::size_t i = 1; i < t.size(); ++i) config_.price_bins->labels.push_back(t[i].text);
        } else if (d == "rating") {
            rating(t);
        } else if (d == "neutral") {
            expect_count(t, 2);
            if (t[1].text == "keep") {
                config_.neutral_positive = true;
            } else if (t[1].text == "drop") {
                config_.neutral_positive = false;
            } else {
                fail(ErrorCode::SyntaxError, t[1], "expected keep or drop");
            }
        } else if (d == "title") {
            expect_count(t, 2);
            if (t[1].text != "strip_year") fail(ErrorCode::SyntaxError, t[1], "expected strip_year");
            config_.strip_title_year = true;
        } else if (d == "producer_role") {
            expect_count(t, 2);
            declare_role(t[1]);
        } else if (d == "file") {
            expect_count(t, 2);
            FileBinding f;
            f.path = t[1].text;
            if (f.path.empty()) fail(ErrorCode::SyntaxError, t[1], "empty file path");
            current_ = std::move(f);
            file_at_ = t[0];
        } else {
            fail(ErrorCode::SyntaxError, t[0], "unknown directive '" + d + "'");
        }
    }

    void rating(const std::vector<Token>& t) {
        for (std::size_t i = 1; i < t.size(); ++i) {
            const auto& k = t[i].text;
            if (k == "threshold" && i + 1 < t.size()) {
                config_.rating.threshold = real(t[++i]);
            } else if (k == "scale" && i + 1 < t.size()) {
                config_.rating.scale_max = real(t[++i]);
            } else if (k == "inclusive") {
                config_.rating.inclusive = true;
            } else if (k == "exclusive") {
                config_.rating.inclusive = false;
            } else {
                fail(ErrorCode::SyntaxError, t[i], "unexpected '" + k + "' in rating rule");
            }
        }
        if (config_.rating.scale_max <= 0 || config_.rating.threshold < 0 ||
            config_.rating.threshold > config_.rating.scale_max) {
            fail(ErrorCode::SyntaxError, t[0], "rating threshold must lie within [0, scale]");
        }
    }

    void file_directive(const std::vector<Token>& t) {
        auto& f = *current_;
        const auto& d = t[0].text;
        if (d == "end") {
            expect_count(t, 1);
            close_file(t[0]);
        } else if (d == "delimiter") {
            expect_count(t, 2);
            if (t[1].text.empty()) fail(ErrorCode::SyntaxError, t[1], "empty delimiter");
            f.delimiter = t[1].text;
        } else if (d == "header") {
            expect_count(t, 2);
            f.header = boolean(t[1]);
        } else if (d == "columns") {
            expect_count(t, 2);
            f.columns = static_cast<std::size_t>(number(t[1]));
        } else if (d == "interaction") {
            expect_count(t, 3);
            auto category = parse_interaction_category(t[1].text);
            if (!category) fail(ErrorCode::SyntaxError, t[1], "unknown interaction category '" + t[1].text + "'");
            auto behavior = parse_behavior(t[2].text);
            if (!behavior || !behavior_allowed(*category, *behavior)) {
                fail(ErrorCode::SyntaxError, t[2], "behavior '" + t[2].text + "' not allowed for " + t[1].text);
            }
            f.interaction = InteractionBinding{*category, *behavior, {}, {}, {}, {}};
        } else if (d == "col") {
            column(t);
        } else {
            fail(ErrorCode::SyntaxError, t[0], "unknown file directive '" + d + "'");
        }
    }

    void column(const std::vector<Token>& t) {
        // col <index> <name> -> <role> [args...]
        if (t.size() < 5 || t[3].text != "->") fail(ErrorCode::SyntaxError, t[0], "usage: col <index> <name> -> <role> ...");
        ColumnBinding b;
        b.index = static_cast<std::size_t>(number(t[1]));
        b.name = t[2].text;
        if (b.name.empty()) fail(ErrorCode::SyntaxError, t[2], "empty column name");
        const auto& role = t[4].text;
        auto args = std::vector<Token>(t.begin() + 5, t.end());

        if (role == "key" || role == "label" || role == "ref") {
            expect_args(t[4], args, 1);
            b.role = role == "key" ? ColumnRole::Key : role == "label" ? ColumnRole::Label : ColumnRole::Ref;
            b.node_kind = entity_kind(args[0]);
        } else if (role == "attr") {
            if (args.empty() || args.size() > 2) fail(ErrorCode::SyntaxError, t[4], "usage: attr <Class> [role label]");
            b.role = ColumnRole::Attribute;
            b.attribute = attribute(args[0], args.size() == 2 ? &args[1] : nullptr);
        } else if (role == "flag") {
            expect_args(t[4], args, 2);
            b.role = ColumnRole::Flag;
            b.attribute = attribute(args[0], nullptr);
            b.flag_value = args[1].text;
            if (text::trim(b.flag_value).empty()) fail(ErrorCode::SyntaxError, args[1], "empty flag value");
        } else if (role == "rating" || role == "level" || role == "timestamp" || role == "text") {
            expect_args(t[4], args, 0);
            b.role = role == "rating" ? ColumnRole::Rating
                     : role == "level" ? ColumnRole::Level
                     : role == "timestamp" ? ColumnRole::Timestamp
                                           : ColumnRole::Text;
        } else {
            fail(ErrorCode::SyntaxError, t[4], "unknown column role '" + role + "'");
        }
        positions_.push_back(t[0]);
        current_->bindings.push_back(std::move(b));
    }

    AttributeClass attribute(const Token& name_tok, const Token* role_tok) {
        if (auto name = parse_attribute_name(name_tok.text); name && *name == AttributeName::Producer) {
            const Token& at = role_tok ? *role_tok : name_tok;
            return make_attribute_class(AttributeName::Producer, role_index(role_tok ? role_tok->text : "producer", at));
        }
        auto cls = parse_attribute_key(name_tok.text);
        if (!cls) fail(ErrorCode::UnknownAttributeClass, name_tok, "'" + name_tok.text + "' is not a RecKG attribute class");
        if (role_tok) fail(ErrorCode::SyntaxError, *role_tok, "only Producer takes a role label");
        if (cls->role_index && *cls->role_index > static_cast<int>(config_.producer_roles.size())) {
            fail(ErrorCode::UnknownAttributeClass, name_tok, "producer role " + std::to_string(*cls->role_index) +
                                                              " is not declared");
        }
        return *cls;
    }

    int role_index(const std::string& label, const Token& at) {
        auto folded = text::case_fold(text::collapse_whitespace(label));
        if (folded.empty()) fail(ErrorCode::SyntaxError, at, "empty producer role label");
        for (std::size_t i = 0; i < config_.producer_roles.size(); ++i) {
            if (text::case_fold(config_.producer_roles[i]) == folded) return static_cast<int>(i + 1);
        }
        config_.producer_roles.push_back(text::collapse_whitespace(label));
        return static_cast<int>(config_.producer_roles.size());
    }

    void declare_role(const Token& t) {
        auto before = config_.producer_roles.size();
        role_index(t.text, t);
        if (config_.producer_roles.size() == before) fail(ErrorCode::DuplicateRole, t, "producer role declared twice");
    }

    void close_file(const Token& at) {
        auto& f = *current_;
        const auto first = positions_.size() - f.bindings.size();
        auto pos = [&](std::size_t i) -> const Token& { return positions_[first + i]; };

        std::set<std::size_t> used_indices;
        for (std::size_t i = 0; i < f.bindings.size(); ++i) {
            const auto& b = f.bindings[i];
            if (!used_indices.insert(b.index).second) {
                fail(ErrorCode::SyntaxError, pos(i), "column " + std::to_string(b.index) + " bound twice");
            }
            if (f.columns && b.index >= *f.columns) {
                fail(ErrorCode::SyntaxError, pos(i), "column index beyond declared column count");
            }
        }

        auto count = [&](ColumnRole role, std::optional<NodeKind> kind = {}) {
            return std::count_if(f.bindings.begin(), f.bindings.end(), [&](const ColumnBinding& b) {
                return b.role == role && (!kind || b.node_kind == *kind);
            });
        };

        if (f.interaction) {
            if (count(ColumnRole::Key) > 0) fail(ErrorCode::SyntaxError, at, "interaction files use ref, not key");
            if (count(ColumnRole::Ref, NodeKind::User) != 1 || count(ColumnRole::Ref, NodeKind::Item) != 1) {
                fail(ErrorCode::MissingNodeKey, at, "interaction file '" + f.path + "' needs exactly one User ref and one Item ref");
            }
            auto& ib = *f.interaction;
            auto single = [&](ColumnRole role, std::optional<std::size_t>& slot, const char* what) {
                if (count(role) > 1) fail(ErrorCode::SyntaxError, at, std::string("more than one ") + what + " column");
                if (const auto* b = f.find(role)) slot = b->index;
            };
            single(ColumnRole::Rating, ib.rating_column, "rating");
            single(ColumnRole::Level, ib.level_column, "level");
            single(ColumnRole::Timestamp, ib.timestamp_column, "timestamp");
            single(ColumnRole::Text, ib.text_column, "text");

            bool explicit_rating = ib.category == InteractionCategory::Explicit && ib.behavior == Behavior::Rating;
            bool ordinal = ib.category == InteractionCategory::Explicit && !explicit_rating;
            if (ib.rating_column.has_value() != explicit_rating) {
                fail(ErrorCode::SyntaxError, at, "a rating column is required for, and only for, Explicit Rating");
            }
            if (ib.level_column.has_value() != ordinal) {
                fail(ErrorCode::SyntaxError, at, "a level column is required for, and only for, ordinal Explicit feedback");
            }
            if (ib.text_column.has_value() != (ib.category == InteractionCategory::Review)) {
                fail(ErrorCode::SyntaxError, at, "a text column is required for, and only for, Review interactions");
            }
            for (std::size_t i = 0; i < f.bindings.size(); ++i) {
                auto r = f.bindings[i].role;
                if (r == ColumnRole::Attribute || r == ColumnRole::Flag || r == ColumnRole::Label) {
                    fail(ErrorCode::SyntaxError, pos(i), "attribute columns belong in entity files");
                }
            }
        } else {
            if (count(ColumnRole::Key) != 1) {
                fail(ErrorCode::MissingNodeKey, at, "file '" + f.path + "' needs exactly one key column");
            }
            NodeKind kind = f.find(ColumnRole::Key)->node_kind;
            Owner owner = kind == NodeKind::User ? Owner::User : Owner::Item;
            for (std::size_t i = 0; i < f.bindings.size(); ++i) {
                auto& b = f.bindings[i];
                switch (b.role) {
                    case ColumnRole::Label:
                        if (b.node_kind != kind) fail(ErrorCode::SyntaxError, pos(i), "label kind differs from key kind");
                        break;
                    case ColumnRole::Attribute:
                    case ColumnRole::Flag:
                        if (b.attribute->owner != owner) {
                            fail(ErrorCode::UnknownAttributeClass, pos(i),
                                 b.attribute->key() + " is not a " + std::string(to_string(owner)) + " attribute");
                        }
                        config_.bindings.bind(b.name, *b.attribute);
                        break;
                    case ColumnRole::Key:
                        break;
                    default:
                        fail(ErrorCode::SyntaxError, pos(i), "interaction columns need an 'interaction' directive");
                }
            }
        }
        config_.files.push_back(std::move(f));
        current_.reset();
    }

    void finish() {
        if (config_.source_tag.empty()) fail(ErrorCode::SyntaxError, 1, 1, "missing 'source' directive");
        if (config_.files.empty()) fail(ErrorCode::SyntaxError, 1, 1, "no file blocks");
        try {
            config_.age_bins.validate();
            if (config_.price_bins) config_.price_bins->validate();
        } catch (const Error& e) {
            fail(ErrorCode::BinOrderError, age_bins_at_.line, age_bins_at_.column, e.what());
        }
    }

    NodeKind entity_kind(const Token& t) {
        if (t.text == "User") return NodeKind::User;
        if (t.text == "Item") return NodeKind::Item;
        fail(ErrorCode::SyntaxError, t, "expected User or Item");
    }

    static void expect_count(const std::vector<Token>& t, std::size_t n) {
        if (t.size() != n) {
            fail(ErrorCode::SyntaxError, t.size() > n ? t[n] : t.back(),
                 "'" + t[0].text + "' expects " + std::to_string(n - 1) + " argument(s)");
        }
    }

    static void expect_args(const Token& role, const std::vector<Token>& args, std::size_t n) {
        if (args.size() != n) {
            fail(ErrorCode::SyntaxError, role, "'" + role.text + "' expects " + std::to_string(n) + " argument(s)");
        }
    }

    static long long number(const Token& t) {
        auto v = text::parse_int(t.text);
        if (!v || *v < 0) fail(ErrorCode::SyntaxError, t, "expected a non-negative integer, got '" + t.text + "'");
        return *v;
    }

    static double real(const Token& t) {
        auto v = text::parse_double(t.text);
        if (!v) fail(ErrorCode::SyntaxError, t, "expected a number, got '" + t.text + "'");
        return *v;
    }

    static bool boolean(const Token& t) {
        if (t.text == "yes" || t.text == "true") return true;
        if (t.text == "no" || t.text == "false") return false;
        fail(ErrorCode::SyntaxError, t, "expected yes or no");
    }

    MappingConfig config_;
    std::optional<FileBinding> current_;
    std::vector<Token> positions_;
    Token file_at_;
    Token age_bins_at_{"", false, 1, 1};
};

}  // namespace

const ColumnBinding* FileBinding::find(ColumnRole role, std::optional<NodeKind> kind) const {
    for (const auto& b : bindings) {
        if (b.role == role && (!kind || b.node_kind == *kind)) return &b;
    }
    return nullptr;
}

std::size_t FileBinding::min_columns() const {
    if (columns) return *columns;
    std::size_t n = 0;
    for (const auto& b : bindings) n = std::max(n, b.index + 1);
    return n;
}

SchemaRegistry MappingConfig::registry() const {
    SchemaRegistry reg;
    for (const auto& role : producer_roles) reg.register_producer_role(role);
    return reg;
}

MappingConfig parse_mapping_config(std::string_view document) {
    return Parser{}.parse(document);
}

}  // namespace reckg
