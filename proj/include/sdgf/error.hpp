#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sdgf {

enum class ErrorCode {
    NonDivisor,
    NotAFrame,
    UnknownKind,
    IndexOutOfRange,
    DimensionMismatch,
    NotInvertible,
    DimensionTooLargeForDense,
    DimensionNotCompliant,
    EigenvectorNotFound,
    BudgetExceeded,
    Infeasible,
    UnsupportedFormat,
    TooShort,
    ZeroReference,
    InvalidArgument,
    IoError,
    ParseError,
    SchemaError,
};

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::NonDivisor: return "NonDivisor";
    case ErrorCode::NotAFrame: return "NotAFrame";
    case ErrorCode::UnknownKind: return "UnknownKind";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotInvertible: return "NotInvertible";
    case ErrorCode::DimensionTooLargeForDense: return "DimensionTooLargeForDense";
    case ErrorCode::DimensionNotCompliant: return "DimensionNotCompliant";
    case ErrorCode::EigenvectorNotFound: return "EigenvectorNotFound";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::ZeroReference: return "ZeroReference";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SchemaError: return "SchemaError";
    }
    return "Unknown";
}

/// Library-wide exception. The message is prefixed with the originating
/// module, e.g. "zauner: DimensionNotCompliant: ...".
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string_view module, const std::string& what)
        : std::runtime_error(std::string(module) + ": " + std::string(to_string(code)) + ": " + what),
          code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace sdgf
