#include "lrac/error.hpp"

namespace lrac {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::ZeroSecondMoment: return "ZeroSecondMoment";
    case ErrorCode::RadiusTooLarge: return "RadiusTooLarge";
    case ErrorCode::InvalidKernel: return "InvalidKernel";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::SingularMode: return "SingularMode";
    case ErrorCode::IncompatibleRefinement: return "IncompatibleRefinement";
    case ErrorCode::UnstableStep: return "UnstableStep";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::ReplicaFailure: return "ReplicaFailure";
    case ErrorCode::InsufficientTransitions: return "InsufficientTransitions";
    case ErrorCode::NonPositiveError: return "NonPositiveError";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::StudyFailed: return "StudyFailed";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

} // namespace lrac
