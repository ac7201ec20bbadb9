#ifndef PKIFLOW_ERRORS_HPP
#define PKIFLOW_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pkiflow {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Problems in the experiment configuration (CLI exit code 2).
struct ConfigError : Error {
    using Error::Error;
};

// Problems in input data (CLI exit code 3).
struct DataError : Error {
    using Error::Error;
};

// --- flow ingestion ---
struct EncodingError : DataError {
    using DataError::DataError;
};
struct EmptyInput : DataError {
    using DataError::DataError;
};
struct MalformedRow : DataError {
    size_t line;
    MalformedRow(const std::string& msg, size_t line_no) : DataError(msg), line(line_no) {}
};
struct MissingLabelColumn : DataError {
    using DataError::DataError;
};
struct AllColumnsDropped : DataError {
    using DataError::DataError;
};
struct UnparseableCell : DataError {
    size_t row, column;
    UnparseableCell(const std::string& msg, size_t r, size_t c) : DataError(msg), row(r), column(c) {}
};
struct RowCountMismatch : DataError {
    using DataError::DataError;
};

// --- dataset ---
struct EmptyLabelList : DataError {
    using DataError::DataError;
};
struct DegenerateSplit : DataError {
    using DataError::DataError;
};
struct EmptyDataset : DataError {
    using DataError::DataError;
};
struct LabelOutOfRange : DataError {
    using DataError::DataError;
};
struct LengthMismatch : DataError {
    using DataError::DataError;
};
struct DimensionMismatch : DataError {
    using DataError::DataError;
};

// --- feature selection ---
struct NegativeFeature : DataError {
    size_t feature;
    NegativeFeature(const std::string& msg, size_t feature_idx) : DataError(msg), feature(feature_idx) {}
};
struct SingleClass : DataError {
    using DataError::DataError;
};
struct KOutOfRange : ConfigError {
    using ConfigError::ConfigError;
};

// --- clustering ---
struct TooFewPoints : DataError {
    using DataError::DataError;
};
struct SingularCovariance : DataError {
    using DataError::DataError;
};

// --- experiment / io ---
struct InvalidSpec : ConfigError {
    using ConfigError::ConfigError;
};
struct IoError : Error {
    using Error::Error;
};

} // namespace pkiflow

#endif
