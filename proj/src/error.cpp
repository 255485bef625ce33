#include "ustat/error.hpp"

namespace ustat {

const char* error_name(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::Io: return "IoError";
    case ErrorCode::Parse: return "ParseError";
    case ErrorCode::Shape: return "ShapeError";
    case ErrorCode::EmptySeries: return "EmptySeries";
    case ErrorCode::OrderExceedsSampleSize: return "OrderExceedsSampleSize";
    case ErrorCode::UnsupportedOrder: return "UnsupportedOrder";
    case ErrorCode::SizeGuard: return "SizeGuard";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DegenerateColumn: return "DegenerateColumn";
    case ErrorCode::SingularDesign: return "SingularDesign";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::InvalidResponse: return "InvalidResponse";
    case ErrorCode::InvalidDf: return "InvalidDf";
    case ErrorCode::PTooSmall: return "PTooSmall";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::ZeroPValue: return "ZeroPValue";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::InvalidParameters: return "InvalidParameters";
    case ErrorCode::InvalidSparsity: return "InvalidSparsity";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "UnknownError";
}

bool is_validation_error(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::DegenerateColumn:
    case ErrorCode::SingularDesign:
    case ErrorCode::NonConvergence:
    case ErrorCode::ZeroVariance:
    case ErrorCode::ZeroPValue:
    case ErrorCode::NotPositiveDefinite:
        return false;
    default:
        return true;
    }
}

}  // namespace ustat
