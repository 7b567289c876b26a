#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace finlm {

// Every failure the library can raise, grouped into the three categories the
// CLI maps to exit codes (usage=2, data=3, backend=4).
enum class ErrorCode {
    // usage
    UsageError,
    DomainError,
    MissingExemplars,
    // data
    EmptyAfterCleaning,
    UnsupportedMime,
    NoSections,
    InvalidEntry,
    EmptyInput,
    InvalidItem,
    MissingTokenCounts,
    NoItemsParsed,
    NonFiniteLoss,
    CurveTooShort,
    InvalidPlan,
    LengthMismatch,
    TaskSetMismatch,
    DimensionMismatch,
    InvalidDocument,
    ParseError,
    IoError,
    // backend
    BackendUnavailable,
    ProtocolError,
};

enum class ErrorCategory { usage, data, backend };

constexpr ErrorCategory category_of(ErrorCode code) {
    switch (code) {
        case ErrorCode::UsageError:
        case ErrorCode::DomainError:
        case ErrorCode::MissingExemplars:
            return ErrorCategory::usage;
        case ErrorCode::BackendUnavailable:
        case ErrorCode::ProtocolError:
            return ErrorCategory::backend;
        default:
            return ErrorCategory::data;
    }
}

constexpr std::string_view code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::UsageError: return "UsageError";
        case ErrorCode::DomainError: return "DomainError";
        case ErrorCode::MissingExemplars: return "MissingExemplars";
        case ErrorCode::EmptyAfterCleaning: return "EmptyAfterCleaning";
        case ErrorCode::UnsupportedMime: return "UnsupportedMime";
        case ErrorCode::NoSections: return "NoSections";
        case ErrorCode::InvalidEntry: return "InvalidEntry";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::InvalidItem: return "InvalidItem";
        case ErrorCode::MissingTokenCounts: return "MissingTokenCounts";
        case ErrorCode::NoItemsParsed: return "NoItemsParsed";
        case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
        case ErrorCode::CurveTooShort: return "CurveTooShort";
        case ErrorCode::InvalidPlan: return "InvalidPlan";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::TaskSetMismatch: return "TaskSetMismatch";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::InvalidDocument: return "InvalidDocument";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::BackendUnavailable: return "BackendUnavailable";
        case ErrorCode::ProtocolError: return "ProtocolError";
    }
    return "UnknownError";
}

constexpr std::string_view category_name(ErrorCategory cat) {
    switch (cat) {
        case ErrorCategory::usage: return "usage";
        case ErrorCategory::data: return "data";
        case ErrorCategory::backend: return "backend";
    }
    return "data";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(code_name(code)) + ": " + message), code_(code) {}

    ErrorCode code() const { return code_; }
    ErrorCategory category() const { return category_of(code_); }

private:
    ErrorCode code_;
};

}  // namespace finlm
