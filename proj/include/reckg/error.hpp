#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace reckg {

enum class ErrorCode {
    // schema
    NoMapping,
    AmbiguousBinding,
    UnknownRelation,
    DuplicateRole,
    // graph
    EmptyValue,
    DanglingEndpoint,
    SchemaViolation,
    AmbiguityTooLarge,
    // ingest
    SyntaxError,
    UnknownAttributeClass,
    BinOrderError,
    MissingNodeKey,
    NegativeAge,
    OutOfScale,
    UnparsableDate,
    FileUnreadable,
    RowArityMismatch,
    // integrate
    MissingMatchKey,
    StaleReport,
    // query
    UnknownNode,
    NotAUserNode,
    PathNotInGraph,
    // export
    SinkWriteError,
    SchemaVersionMismatch,
    MalformedDocument,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace reckg
