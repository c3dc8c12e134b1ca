#include "wfbt/error.hpp"

namespace wfbt {

ErrorCategory category_of(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument:
        case ErrorCode::InvalidConfig:
        case ErrorCode::InvalidParam:
        case ErrorCode::InvalidSplit:
        case ErrorCode::UnknownSelector:
            return ErrorCategory::Config;
        case ErrorCode::MalformedRow:
        case ErrorCode::DuplicateTimestamp:
        case ErrorCode::NonPositivePrice:
        case ErrorCode::OhlcViolation:
        case ErrorCode::GapInSeries:
        case ErrorCode::NetworkError:
        case ErrorCode::MalformedPayload:
        case ErrorCode::EmptyRange:
        case ErrorCode::IoError:
            return ErrorCategory::Data;
        default:
            return ErrorCategory::Engine;
    }
}

std::string_view error_name(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::InvalidParam: return "InvalidParam";
        case ErrorCode::InvalidSplit: return "InvalidSplit";
        case ErrorCode::UnknownSelector: return "UnknownSelector";
        case ErrorCode::MalformedRow: return "MalformedRow";
        case ErrorCode::DuplicateTimestamp: return "DuplicateTimestamp";
        case ErrorCode::NonPositivePrice: return "NonPositivePrice";
        case ErrorCode::OhlcViolation: return "OhlcViolation";
        case ErrorCode::GapInSeries: return "GapInSeries";
        case ErrorCode::NetworkError: return "NetworkError";
        case ErrorCode::MalformedPayload: return "MalformedPayload";
        case ErrorCode::EmptyRange: return "EmptyRange";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::SeriesTooShort: return "SeriesTooShort";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::EmptySegment: return "EmptySegment";
        case ErrorCode::NonFiniteInput: return "NonFiniteInput";
        case ErrorCode::WidthMismatch: return "WidthMismatch";
        case ErrorCode::EmptyTraining: return "EmptyTraining";
        case ErrorCode::KindMismatch: return "KindMismatch";
        case ErrorCode::EmptyEnsemble: return "EmptyEnsemble";
        case ErrorCode::InsufficientHistory: return "InsufficientHistory";
        case ErrorCode::ZeroVolatility: return "ZeroVolatility";
        case ErrorCode::TooFewObservations: return "TooFewObservations";
        case ErrorCode::ConstantTruth: return "ConstantTruth";
        case ErrorCode::ConstantCurve: return "ConstantCurve";
        case ErrorCode::AllTrialsFailed: return "AllTrialsFailed";
        case ErrorCode::MixedTasks: return "MixedTasks";
    }
    return "Unknown";
}

}  // namespace wfbt
