#include "attnswap/error.hpp"

namespace attnswap {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::MissingFile: return "MissingFile";
        case ErrorCode::SchemaViolation: return "SchemaViolation";
        case ErrorCode::DanglingReference: return "DanglingReference";
        case ErrorCode::UnsortedInput: return "UnsortedInput";
        case ErrorCode::UnparsableAttribute: return "UnparsableAttribute";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::EmptyDataset: return "EmptyDataset";
        case ErrorCode::EmptyIndex: return "EmptyIndex";
        case ErrorCode::TooFewRows: return "TooFewRows";
        case ErrorCode::RowCountMismatch: return "RowCountMismatch";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::SingularCovariance: return "SingularCovariance";
        case ErrorCode::DimensionTooLarge: return "DimensionTooLarge";
        case ErrorCode::ZeroTextCost: return "ZeroTextCost";
        case ErrorCode::ZeroBandwidth: return "ZeroBandwidth";
        case ErrorCode::UnreadableRaster: return "UnreadableRaster";
        case ErrorCode::InvalidSpec: return "InvalidSpec";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::IoFailure: return "IoFailure";
    }
    return "UnknownError";
}

}  // namespace attnswap
