#include "ctprune/error.hpp"

namespace ctprune {

std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::EmptyScan: return "EmptyScan";
    case ErrorCode::MixedDimensions: return "MixedDimensions";
    case ErrorCode::UnparsableIndex: return "UnparsableIndex";
    case ErrorCode::DecodeError: return "DecodeError";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::EmptyMask: return "EmptyMask";
    case ErrorCode::AllSlicesEmpty: return "AllSlicesEmpty";
    case ErrorCode::BoxOutOfBounds: return "BoxOutOfBounds";
    case ErrorCode::EmptyProfile: return "EmptyProfile";
    case ErrorCode::NoData: return "NoData";
    case ErrorCode::AllZeroWeights: return "AllZeroWeights";
    case ErrorCode::InvalidProbability: return "InvalidProbability";
    case ErrorCode::EmptyWindow: return "EmptyWindow";
    case ErrorCode::NoClasses: return "NoClasses";
    case ErrorCode::NoScans: return "NoScans";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

} // namespace ctprune
