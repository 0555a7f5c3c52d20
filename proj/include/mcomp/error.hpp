#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mcomp {

enum class ErrorCode {
    UnboundedSet,
    ScheduleTooFat,
    DomainError,
    PrecisionUnreachable,
    IsolatedPoint,
    SamplerExhausted,
    PreconditionUnmet,
    NotPiecewiseMonotone,
    StubPiece,
    MetadataMissing,
    SingularPartPresent,
    ParseError,
};

constexpr std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::UnboundedSet: return "UnboundedSet";
    case ErrorCode::ScheduleTooFat: return "ScheduleTooFat";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::PrecisionUnreachable: return "PrecisionUnreachable";
    case ErrorCode::IsolatedPoint: return "IsolatedPoint";
    case ErrorCode::SamplerExhausted: return "SamplerExhausted";
    case ErrorCode::PreconditionUnmet: return "PreconditionUnmet";
    case ErrorCode::NotPiecewiseMonotone: return "NotPiecewiseMonotone";
    case ErrorCode::StubPiece: return "StubPiece";
    case ErrorCode::MetadataMissing: return "MetadataMissing";
    case ErrorCode::SingularPartPresent: return "SingularPartPresent";
    case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

/// All library failures are reported through this type; `code()` names the
/// failure class so callers (and the CLI exit-code mapping) can branch on it.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
    {
    }

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace mcomp
