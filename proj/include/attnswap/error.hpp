#pragma once

#include <stdexcept>
#include <string>

namespace attnswap {

enum class ErrorCode {
    MissingFile,
    SchemaViolation,
    DanglingReference,
    UnsortedInput,
    UnparsableAttribute,
    EmptyInput,
    EmptyDataset,
    EmptyIndex,
    TooFewRows,
    RowCountMismatch,
    LengthMismatch,
    SingularCovariance,
    DimensionTooLarge,
    ZeroTextCost,
    ZeroBandwidth,
    UnreadableRaster,
    InvalidSpec,
    InvalidArgument,
    IoFailure,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
          code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace attnswap
