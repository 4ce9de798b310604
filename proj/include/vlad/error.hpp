#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vlad {

enum class ErrorCode {
    EmptyCloud,
    DimensionMismatch,
    EmptyLift,
    EmptyProjection,
    SingularCandidate,
    EmptyMask,
    IsotropicMask,
    NoViableGrasp,
    MissingDirectory,
    NoSamples,
    NoAnnotations,
    EmptyRecords,
    ServiceUnavailable,
    MalformedResponse,
    GenerationRefused,
    InvalidArgument,
    Io,
};

std::string_view to_string(ErrorCode code);

// Every failure the library reports carries one of the codes above so callers
// (the pipeline in particular) can map it to a stage without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

    // Service errors are retried by the generation clients before surfacing.
    bool retryable() const noexcept {
        return code_ == ErrorCode::ServiceUnavailable || code_ == ErrorCode::MalformedResponse ||
               code_ == ErrorCode::GenerationRefused;
    }

private:
    ErrorCode code_;
};

}  // namespace vlad
