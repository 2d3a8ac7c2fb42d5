#include "uscal/error.hpp"

namespace uscal {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "E_INVALID_ARGUMENT";
        case ErrorCode::ParseError: return "E_PARSE";
        case ErrorCode::MissingFile: return "E_MISSING_FILE";
        case ErrorCode::UnitError: return "E_UNIT";
        case ErrorCode::IoError: return "E_IO";
        case ErrorCode::DegenerateInput: return "E_DEGENERATE_INPUT";
        case ErrorCode::NumericalFailure: return "E_NUMERICAL_FAILURE";
        case ErrorCode::NoCircleFound: return "E_NO_CIRCLE_FOUND";
        case ErrorCode::AmbiguousPeak: return "E_AMBIGUOUS_PEAK";
        case ErrorCode::NoIntersection: return "E_NO_INTERSECTION";
        case ErrorCode::UnknownLabel: return "E_UNKNOWN_LABEL";
        case ErrorCode::BehindCamera: return "E_BEHIND_CAMERA";
        case ErrorCode::DegenerateTarget: return "E_DEGENERATE_TARGET";
        case ErrorCode::DivergedRefinement: return "E_DIVERGED_REFINEMENT";
        case ErrorCode::TooFewInliers: return "E_TOO_FEW_INLIERS";
    }
    return "E_UNKNOWN";
}

}  // namespace uscal
