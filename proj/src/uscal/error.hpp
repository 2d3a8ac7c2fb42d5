#pragma once

#include <stdexcept>
#include <string>

namespace uscal {

enum class ErrorCode {
    InvalidArgument,
    ParseError,
    MissingFile,
    UnitError,
    IoError,
    DegenerateInput,
    NumericalFailure,
    NoCircleFound,
    AmbiguousPeak,
    NoIntersection,
    UnknownLabel,
    BehindCamera,
    DegenerateTarget,
    DivergedRefinement,
    TooFewInliers,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

}  // namespace uscal
