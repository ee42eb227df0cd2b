#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace onehole {

enum class ErrorCode {
    NotElliptic,
    CommutingPair,
    NonRegularPoint,
    StepSizeUnderflow,
    UnwrapResolutionExceeded,
    ReferencePathAmbiguous,
    IterationBudgetExceeded,
    PreconditionKappa,
    SearchBudgetExceeded,
    TorsionRotation,
    NotRealizable,
    ReducibleTriple,
    LevelUnreachable,
    InsufficientSamples,
    RejectionBudgetExhausted,
    InvalidArgument,
    NumericalOverflow,
};

// Coarse grouping used by the CLI to pick an exit code.
enum class ErrorCategory { Precondition, Budget, Numerical };

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::NotElliptic: return "NotElliptic";
        case ErrorCode::CommutingPair: return "CommutingPair";
        case ErrorCode::NonRegularPoint: return "NonRegularPoint";
        case ErrorCode::StepSizeUnderflow: return "StepSizeUnderflow";
        case ErrorCode::UnwrapResolutionExceeded: return "UnwrapResolutionExceeded";
        case ErrorCode::ReferencePathAmbiguous: return "ReferencePathAmbiguous";
        case ErrorCode::IterationBudgetExceeded: return "IterationBudgetExceeded";
        case ErrorCode::PreconditionKappa: return "PreconditionKappa";
        case ErrorCode::SearchBudgetExceeded: return "SearchBudgetExceeded";
        case ErrorCode::TorsionRotation: return "TorsionRotation";
        case ErrorCode::NotRealizable: return "NotRealizable";
        case ErrorCode::ReducibleTriple: return "ReducibleTriple";
        case ErrorCode::LevelUnreachable: return "LevelUnreachable";
        case ErrorCode::InsufficientSamples: return "InsufficientSamples";
        case ErrorCode::RejectionBudgetExhausted: return "RejectionBudgetExhausted";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::NumericalOverflow: return "NumericalOverflow";
    }
    return "Unknown";
}

constexpr ErrorCategory category_of(ErrorCode code) {
    switch (code) {
        case ErrorCode::IterationBudgetExceeded:
        case ErrorCode::SearchBudgetExceeded:
        case ErrorCode::RejectionBudgetExhausted:
        case ErrorCode::LevelUnreachable:
            return ErrorCategory::Budget;
        case ErrorCode::UnwrapResolutionExceeded:
        case ErrorCode::StepSizeUnderflow:
        case ErrorCode::NumericalOverflow:
            return ErrorCategory::Numerical;
        default:
            return ErrorCategory::Precondition;
    }
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }
    ErrorCategory category() const noexcept { return category_of(code_); }

private:
    ErrorCode code_;
};

}  // namespace onehole
