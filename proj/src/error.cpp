#include "vlad/error.hpp"

namespace vlad {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::EmptyCloud: return "EmptyCloud";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::EmptyLift: return "EmptyLift";
        case ErrorCode::EmptyProjection: return "EmptyProjection";
        case ErrorCode::SingularCandidate: return "SingularCandidate";
        case ErrorCode::EmptyMask: return "EmptyMask";
        case ErrorCode::IsotropicMask: return "IsotropicMask";
        case ErrorCode::NoViableGrasp: return "NoViableGrasp";
        case ErrorCode::MissingDirectory: return "MissingDirectory";
        case ErrorCode::NoSamples: return "NoSamples";
        case ErrorCode::NoAnnotations: return "NoAnnotations";
        case ErrorCode::EmptyRecords: return "EmptyRecords";
        case ErrorCode::ServiceUnavailable: return "ServiceUnavailable";
        case ErrorCode::MalformedResponse: return "MalformedResponse";
        case ErrorCode::GenerationRefused: return "GenerationRefused";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

}  // namespace vlad
