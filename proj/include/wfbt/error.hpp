#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wfbt {

enum class ErrorCode {
    // configuration
    InvalidArgument,
    InvalidConfig,
    InvalidParam,
    InvalidSplit,
    UnknownSelector,
    // data
    MalformedRow,
    DuplicateTimestamp,
    NonPositivePrice,
    OhlcViolation,
    GapInSeries,
    NetworkError,
    MalformedPayload,
    EmptyRange,
    IoError,
    // engine
    SeriesTooShort,
    LengthMismatch,
    EmptySegment,
    NonFiniteInput,
    WidthMismatch,
    EmptyTraining,
    KindMismatch,
    EmptyEnsemble,
    InsufficientHistory,
    ZeroVolatility,
    TooFewObservations,
    ConstantTruth,
    ConstantCurve,
    AllTrialsFailed,
    MixedTasks,
};

/// Broad failure class; maps one-to-one onto CLI exit codes 1..3.
enum class ErrorCategory { Config = 1, Data = 2, Engine = 3 };

ErrorCategory category_of(ErrorCode code) noexcept;
std::string_view error_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_name(code)) + ": " + message), code_(code), detail_(message) {}

    ErrorCode code() const noexcept { return code_; }
    ErrorCategory category() const noexcept { return category_of(code_); }
    const std::string& detail() const noexcept { return detail_; }

    /// Same code, message prefixed with "<context>: ".
    Error with_context(const std::string& context) const { return Error(code_, context + ": " + detail_); }

private:
    ErrorCode code_;
    std::string detail_;
};

}  // namespace wfbt
