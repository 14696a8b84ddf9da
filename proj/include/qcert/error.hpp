#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qcert {

enum class ErrorKind {
    ZeroVector,
    NotSymmetric,
    DimensionMismatch,
    DomainViolation,
    VanishingGradient,
    BadIndices,
    DegenerateBorder,
    PreconditionFailed,
    DegenerateSlope,
    ParseError,
    DomainError,
    Overflow,
    ConfigError,
    TooLarge,
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::ZeroVector: return "ZeroVector";
        case ErrorKind::NotSymmetric: return "NotSymmetric";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::DomainViolation: return "DomainViolation";
        case ErrorKind::VanishingGradient: return "VanishingGradient";
        case ErrorKind::BadIndices: return "BadIndices";
        case ErrorKind::DegenerateBorder: return "DegenerateBorder";
        case ErrorKind::PreconditionFailed: return "PreconditionFailed";
        case ErrorKind::DegenerateSlope: return "DegenerateSlope";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::DomainError: return "DomainError";
        case ErrorKind::Overflow: return "Overflow";
        case ErrorKind::ConfigError: return "ConfigError";
        case ErrorKind::TooLarge: return "TooLarge";
    }
    return "Unknown";
}

/// Every failure raised by the library carries a machine-checkable kind.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class ParseError : public Error {
public:
    ParseError(std::size_t offset, const std::string& message)
        : Error(ErrorKind::ParseError, "at offset " + std::to_string(offset) + ": " + message),
          offset_(offset), detail_(message) {}

    std::size_t offset() const noexcept { return offset_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    std::size_t offset_;
    std::string detail_;
};

} // namespace qcert
