#pragma once
// Mapping configurations, value transforms and the dataset ingester that turns
// delimited source files into a RecKG graph.

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "reckg/graph.hpp"
#include "reckg/schema.hpp"

namespace reckg {

// transforms ------------------------------------------------------------------

struct AgeBins {
    std::vector<int> edges;           // strictly ascending lower bounds
    std::vector<std::string> labels;  // edges.size() + 1 labels

    /// <18, 18-24, 25-34, 35-44, 45-49, 50-55, 56+
    static AgeBins defaults();
    /// Throws BinOrderError.
    void validate() const;
};

struct PriceBins {
    std::vector<double> edges;
    std::vector<std::string> labels;  // generated from edges when left empty

    void validate() const;
};

struct RatingRule {
    double threshold = 4.0;
    bool inclusive = true;
    double scale_max = 5.0;
};

enum class RatingOutcome { Positive, Dropped };

struct DateFormat {
    /// strptime-like: %Y %m %d %b (abbreviated month) %B (full month), other
    /// characters literal.
    std::string pattern = "%Y";
};

struct PartialDate {
    int year = 0;
    std::optional<int> month;
    std::optional<int> day;

    /// "1995", "1995-03" or "1995-03-17"
    std::string canonical() const;
    auto operator<=>(const PartialDate&) const = default;
};

/// Label of the half-open bin containing `age`; the last bin is open above.
/// Throws NegativeAge.
std::string bin_age(long long age, const AgeBins& bins);

std::string bin_price(double price, const PriceBins& bins);

/// Positive iff value >= threshold (inclusive) or > threshold (exclusive).
/// Throws OutOfScale outside [0, scale_max].
RatingOutcome binarize_rating(double value, const RatingRule& rule);

/// Throws UnparsableDate carrying the raw value.
PartialDate normalize_release_date(std::string_view raw, const DateFormat& format);

// mapping configuration ----------------------------------------------------------

enum class ColumnRole { Key, Label, Attribute, Flag, Ref, Rating, Level, Timestamp, Text };

struct ColumnBinding {
    std::size_t index = 0;
    std::string name;
    ColumnRole role = ColumnRole::Key;
    NodeKind node_kind = NodeKind::User;     // Key, Label, Ref
    std::optional<AttributeClass> attribute;  // Attribute, Flag
    std::string flag_value;                   // Flag
};

struct InteractionBinding {
    InteractionCategory category = InteractionCategory::Explicit;
    Behavior behavior = Behavior::Rating;
    std::optional<std::size_t> rating_column;
    std::optional<std::size_t> level_column;  // ordinal Dislike/Neutral/Like values
    std::optional<std::size_t> timestamp_column;
    std::optional<std::size_t> text_column;
};

struct FileBinding {
    std::string path;
    std::string delimiter = "\t";
    bool header = false;
    std::optional<std::size_t> columns;  // expected arity
    std::vector<ColumnBinding> bindings;
    std::optional<InteractionBinding> interaction;

    const ColumnBinding* find(ColumnRole role, std::optional<NodeKind> kind = {}) const;
    /// Row arity implied by the declaration (explicit `columns`, else highest bound index + 1).
    std::size_t min_columns() const;
};

struct MappingConfig {
    std::string source_tag;
    std::string encoding = "utf-8";
    std::string fallback_encoding = "latin-1";  // "none" disables the fallback
    std::vector<FileBinding> files;
    AttributeBindings bindings;
    AgeBins age_bins = AgeBins::defaults();
    RatingRule rating;
    std::optional<PriceBins> price_bins;
    DateFormat date_format;
    std::string multi_value_separator;
    bool neutral_positive = false;
    bool strip_title_year = false;
    std::vector<std::string> producer_roles;  // role_index - 1 -> label

    /// Default registry extended with this config's producer roles.
    SchemaRegistry registry() const;

    std::optional<AttributeClass> canonical_attribute(std::string_view raw_name, Owner owner,
                                                      std::optional<std::string_view> role_hint = {}) const {
        return bindings.canonical_attribute(raw_name, owner, role_hint);
    }
};

/// Parses the line-oriented mapping grammar documented in docs/mapping-config.md.
/// Throws SyntaxError (with line and column), UnknownAttributeClass,
/// BinOrderError or MissingNodeKey.
MappingConfig parse_mapping_config(std::string_view document);

// ingestion ----------------------------------------------------------------------

class FileAccess {
public:
    virtual ~FileAccess() = default;
    /// Whole file contents; throws FileUnreadable.
    virtual std::string read(const std::string& path) const = 0;
};

class DirectoryAccess final : public FileAccess {
public:
    explicit DirectoryAccess(std::string root) : root_(std::move(root)) {}
    std::string read(const std::string& path) const override;

private:
    std::string root_;
};

class MemoryAccess final : public FileAccess {
public:
    explicit MemoryAccess(std::map<std::string, std::string> files) : files_(std::move(files)) {}
    std::string read(const std::string& path) const override;

private:
    std::map<std::string, std::string> files_;
};

struct FileStats {
    std::string path;
    std::size_t rows = 0;
    std::size_t kept = 0;
    std::size_t dropped_negative = 0;
    std::size_t skipped = 0;
    std::size_t invalid_values = 0;  // attribute values that failed their transform
    std::size_t unbound_columns = 0;
    std::map<std::string, std::size_t> skip_reasons;
};

struct IngestStats {
    std::vector<FileStats> files;
    std::map<std::string, std::size_t> nodes_by_kind;       // "User", "Item", class keys
    std::map<std::string, std::size_t> edges_by_relation;
    std::vector<std::string> warnings;

    std::size_t rows() const;
    std::size_t kept() const;
    std::size_t dropped_negative() const;
    std::size_t skipped() const;
    std::size_t invalid_values() const;
};

struct IngestOptions {
    bool strict = false;  // RowArityMismatch aborts instead of skipping the row
};

struct IngestResult {
    KnowledgeGraph graph;
    IngestStats stats;
};

/// Deterministic for identical inputs. Files are decoded concurrently and
/// assembled in declaration order (entity files before interaction files).
IngestResult ingest_dataset(const MappingConfig& config, const FileAccess& files, const IngestOptions& options = {});

}  // namespace reckg
