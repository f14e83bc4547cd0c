#include "tickerlab/error.h"

namespace tickerlab {

namespace {

std::string compose(ErrorCode code, const std::string& message, std::optional<std::size_t> line) {
    std::string out = to_string(code);
    if (line) {
        out += " (line " + std::to_string(*line) + ")";
    }
    if (!message.empty()) {
        out += ": " + message;
    }
    return out;
}

}  // namespace

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::kMissingColumn: return "MissingColumn";
        case ErrorCode::kMalformedRow: return "MalformedRow";
        case ErrorCode::kNonMonotonicDates: return "NonMonotonicDates";
        case ErrorCode::kNonPositivePrice: return "NonPositivePrice";
        case ErrorCode::kNetworkUnavailable: return "NetworkUnavailable";
        case ErrorCode::kSymbolNotFound: return "SymbolNotFound";
        case ErrorCode::kEmptyRange: return "EmptyRange";
        case ErrorCode::kMalformedResponse: return "MalformedResponse";
        case ErrorCode::kDegenerateRange: return "DegenerateRange";
        case ErrorCode::kTooShort: return "TooShort";
        case ErrorCode::kEmptyPartition: return "EmptyPartition";
        case ErrorCode::kInsufficientHistory: return "InsufficientHistory";
        case ErrorCode::kShapeMismatch: return "ShapeMismatch";
        case ErrorCode::kNonFiniteActivation: return "NonFiniteActivation";
        case ErrorCode::kCacheMismatch: return "CacheMismatch";
        case ErrorCode::kWindowTooSmall: return "WindowTooSmall";
        case ErrorCode::kInvalidSpec: return "InvalidSpec";
        case ErrorCode::kNonFiniteLoss: return "NonFiniteLoss";
        case ErrorCode::kInsufficientContext: return "InsufficientContext";
        case ErrorCode::kUnsupportedVersion: return "UnsupportedVersion";
        case ErrorCode::kCorruptFile: return "CorruptFile";
        case ErrorCode::kIoFailure: return "IoFailure";
        case ErrorCode::kLengthMismatch: return "LengthMismatch";
        case ErrorCode::kEmpty: return "Empty";
        case ErrorCode::kConstantActuals: return "ConstantActuals";
        case ErrorCode::kAlignmentError: return "AlignmentError";
        case ErrorCode::kInvalidConfig: return "InvalidConfig";
    }
    return "Unknown";
}

ErrorCategory category_of(ErrorCode code) {
    switch (code) {
        case ErrorCode::kInvalidSpec:
        case ErrorCode::kInvalidConfig:
            return ErrorCategory::kConfig;
        case ErrorCode::kNonFiniteLoss:
        case ErrorCode::kNonFiniteActivation:
            return ErrorCategory::kDivergence;
        default:
            return ErrorCategory::kData;
    }
}

Error::Error(ErrorCode code, const std::string& message, std::optional<std::size_t> line)
    : std::runtime_error(compose(code, message, line)), code_(code), line_(line), message_(message) {}

}  // namespace tickerlab
