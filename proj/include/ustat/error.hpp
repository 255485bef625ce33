#pragma once

#include <stdexcept>
#include <string>

namespace ustat {

enum class ErrorCode {
    Io = 1,
    Parse,
    Shape,
    EmptySeries,
    OrderExceedsSampleSize,
    UnsupportedOrder,
    SizeGuard,
    DimensionMismatch,
    DegenerateColumn,
    SingularDesign,
    NonConvergence,
    InvalidResponse,
    InvalidDf,
    PTooSmall,
    ZeroVariance,
    EmptySet,
    ZeroPValue,
    NotPositiveDefinite,
    InvalidParameters,
    InvalidSparsity,
    InvalidArgument,
};

const char* error_name(ErrorCode code) noexcept;

// true for errors caused by bad input/configuration, false for failures
// of the numerics on otherwise valid input
bool is_validation_error(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& msg)
        : std::runtime_error(msg), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) {
    throw Error(code, msg);
}

}  // namespace ustat
