#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace tickerlab {

enum class ErrorCode {
    // market data
    kMissingColumn,
    kMalformedRow,
    kNonMonotonicDates,
    kNonPositivePrice,
    kNetworkUnavailable,
    kSymbolNotFound,
    kEmptyRange,
    kMalformedResponse,
    // preprocessing
    kDegenerateRange,
    kTooShort,
    kEmptyPartition,
    // kalman
    kInsufficientHistory,
    // neural
    kShapeMismatch,
    kNonFiniteActivation,
    kCacheMismatch,
    kWindowTooSmall,
    // models
    kInvalidSpec,
    kNonFiniteLoss,
    kInsufficientContext,
    kUnsupportedVersion,
    kCorruptFile,
    kIoFailure,
    // metrics
    kLengthMismatch,
    kEmpty,
    kConstantActuals,
    // experiments
    kAlignmentError,
    kInvalidConfig,
};

// Coarse grouping used for CLI exit codes.
enum class ErrorCategory { kData, kConfig, kDivergence };

const char* to_string(ErrorCode code);
ErrorCategory category_of(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message,
          std::optional<std::size_t> line = std::nullopt);

    ErrorCode code() const noexcept { return code_; }
    ErrorCategory category() const noexcept { return category_of(code_); }

    // 1-based source line for row-level parse errors.
    std::optional<std::size_t> line() const noexcept { return line_; }
    // Message without the code and line prefix.
    const std::string& message() const noexcept { return message_; }

private:
    ErrorCode code_;
    std::optional<std::size_t> line_;
    std::string message_;
};

}  // namespace tickerlab
