#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hypsing {

/// Failure classes raised by the library. Each maps onto one named error of
/// the public contract; the CLI turns them into exit codes.
enum class ErrorCode {
    DegenerateMatrix,
    NotAnIsometry,
    IdentityInput,
    ShiftMismatch,
    DivisionByZeroSeries,
    InnerNotVanishing,
    BadConstantTerm,
    BranchCutHit,
    NotLocallyUnivalent,
    InvalidData,
    InvalidOperator,
    ResonantIndex,
    NotIntegerDifference,
    OutOfDomain,
    ImageOutsideModel,
    StencilOutOfDomain,
    MonodromyNotIsometric,
    InconsistentGerm,
    NotNormalizable,
    NotRotationRelated,
    WitnessNotFound,
    PreconditionFailed,
};

constexpr std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::DegenerateMatrix: return "DegenerateMatrix";
    case ErrorCode::NotAnIsometry: return "NotAnIsometry";
    case ErrorCode::IdentityInput: return "IdentityInput";
    case ErrorCode::ShiftMismatch: return "ShiftMismatch";
    case ErrorCode::DivisionByZeroSeries: return "DivisionByZeroSeries";
    case ErrorCode::InnerNotVanishing: return "InnerNotVanishing";
    case ErrorCode::BadConstantTerm: return "BadConstantTerm";
    case ErrorCode::BranchCutHit: return "BranchCutHit";
    case ErrorCode::NotLocallyUnivalent: return "NotLocallyUnivalent";
    case ErrorCode::InvalidData: return "InvalidData";
    case ErrorCode::InvalidOperator: return "InvalidOperator";
    case ErrorCode::ResonantIndex: return "ResonantIndex";
    case ErrorCode::NotIntegerDifference: return "NotIntegerDifference";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::ImageOutsideModel: return "ImageOutsideModel";
    case ErrorCode::StencilOutOfDomain: return "StencilOutOfDomain";
    case ErrorCode::MonodromyNotIsometric: return "MonodromyNotIsometric";
    case ErrorCode::InconsistentGerm: return "InconsistentGerm";
    case ErrorCode::NotNormalizable: return "NotNormalizable";
    case ErrorCode::NotRotationRelated: return "NotRotationRelated";
    case ErrorCode::WitnessNotFound: return "WitnessNotFound";
    case ErrorCode::PreconditionFailed: return "PreconditionFailed";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
    {
    }

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Thrown by the Frobenius recurrence when f(s + n) vanishes.
class ResonantIndexError : public Error {
public:
    explicit ResonantIndexError(int index)
        : Error(ErrorCode::ResonantIndex, "f(s+n) = 0 at n = " + std::to_string(index)),
          index_(index)
    {
    }

    [[nodiscard]] int index() const noexcept { return index_; }

private:
    int index_;
};

} // namespace hypsing
