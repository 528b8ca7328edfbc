#ifndef FRACDIM_ERROR_HPP
#define FRACDIM_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace fracdim {

enum class ErrorCode {
    InvalidArgument,
    MalformedFile,
    MalformedValue,
    NonFiniteInput,
    NegativeLabel,
    InconsistentRowWidth,
    InvalidDataset,
    IoFailure,
    BatchTooSmall,
    BatchTooLarge,
    DegenerateScale,
    NoCrossPairs,
    InsufficientNonzeroCounts,
    TooManyInvalidBatches,
    DimensionMismatch,
    ClassifierError,
    InvalidModelFile,
    UnknownModelKind,
    DegenerateBaseDimension,
    InsufficientRecords,
    MissingGroundTruth,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::MalformedFile: return "MalformedFile";
        case ErrorCode::MalformedValue: return "MalformedValue";
        case ErrorCode::NonFiniteInput: return "NonFiniteInput";
        case ErrorCode::NegativeLabel: return "NegativeLabel";
        case ErrorCode::InconsistentRowWidth: return "InconsistentRowWidth";
        case ErrorCode::InvalidDataset: return "InvalidDataset";
        case ErrorCode::IoFailure: return "IoFailure";
        case ErrorCode::BatchTooSmall: return "BatchTooSmall";
        case ErrorCode::BatchTooLarge: return "BatchTooLarge";
        case ErrorCode::DegenerateScale: return "DegenerateScale";
        case ErrorCode::NoCrossPairs: return "NoCrossPairs";
        case ErrorCode::InsufficientNonzeroCounts: return "InsufficientNonzeroCounts";
        case ErrorCode::TooManyInvalidBatches: return "TooManyInvalidBatches";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::ClassifierError: return "ClassifierError";
        case ErrorCode::InvalidModelFile: return "InvalidModelFile";
        case ErrorCode::UnknownModelKind: return "UnknownModelKind";
        case ErrorCode::DegenerateBaseDimension: return "DegenerateBaseDimension";
        case ErrorCode::InsufficientRecords: return "InsufficientRecords";
        case ErrorCode::MissingGroundTruth: return "MissingGroundTruth";
    }
    return "Unknown";
}

/// Exception carrying a machine-readable code. The message is prefixed with
/// the code name so command-line users see both.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Error tied to a 1-based row (line) of an input file.
class RowError : public Error {
public:
    RowError(ErrorCode code, std::size_t row, const std::string& message)
        : Error(code, "row " + std::to_string(row) + ": " + message), row_(row) {}

    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace fracdim

#endif
