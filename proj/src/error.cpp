#include "reckg/error.hpp"

namespace reckg {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::NoMapping: return "NoMapping";
        case ErrorCode::AmbiguousBinding: return "AmbiguousBinding";
        case ErrorCode::UnknownRelation: return "UnknownRelation";
        case ErrorCode::DuplicateRole: return "DuplicateRole";
        case ErrorCode::EmptyValue: return "EmptyValue";
        case ErrorCode::DanglingEndpoint: return "DanglingEndpoint";
        case ErrorCode::SchemaViolation: return "SchemaViolation";
        case ErrorCode::AmbiguityTooLarge: return "AmbiguityTooLarge";
        case ErrorCode::SyntaxError: return "SyntaxError";
        case ErrorCode::UnknownAttributeClass: return "UnknownAttributeClass";
        case ErrorCode::BinOrderError: return "BinOrderError";
        case ErrorCode::MissingNodeKey: return "MissingNodeKey";
        case ErrorCode::NegativeAge: return "NegativeAge";
        case ErrorCode::OutOfScale: return "OutOfScale";
        case ErrorCode::UnparsableDate: return "UnparsableDate";
        case ErrorCode::FileUnreadable: return "FileUnreadable";
        case ErrorCode::RowArityMismatch: return "RowArityMismatch";
        case ErrorCode::MissingMatchKey: return "MissingMatchKey";
        case ErrorCode::StaleReport: return "StaleReport";
        case ErrorCode::UnknownNode: return "UnknownNode";
        case ErrorCode::NotAUserNode: return "NotAUserNode";
        case ErrorCode::PathNotInGraph: return "PathNotInGraph";
        case ErrorCode::SinkWriteError: return "SinkWriteError";
        case ErrorCode::SchemaVersionMismatch: return "SchemaVersionMismatch";
        case ErrorCode::MalformedDocument: return "MalformedDocument";
    }
    return "Unknown";
}

}  // namespace reckg
