#pragma once

#include <stdexcept>
#include <string>

namespace bkhm {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A parameter or input violates a documented constraint.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Two objects that must share a grid do not.
class GridMismatchError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Spectral coefficients that cannot describe a real field.
class CorruptSpectrumError : public Error {
public:
    using Error::Error;
};

/// NaN/overflow or a CFL violation during time stepping.
class NumericalError : public Error {
public:
    using Error::Error;
};

class CflError : public NumericalError {
public:
    CflError(const std::string& what, double max_velocity)
        : NumericalError(what), max_velocity_(max_velocity) {}
    double max_velocity() const noexcept { return max_velocity_; }

private:
    double max_velocity_;
};

class NonFiniteError : public NumericalError {
public:
    NonFiniteError(const std::string& what, long long step_index)
        : NumericalError(what), step_index_(step_index) {}
    long long step_index() const noexcept { return step_index_; }

private:
    long long step_index_;
};

/// Spin-up did not reach the stationarity criterion within max_steps.
class ConvergenceError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// A fit range without a single sign.
class ScalingRangeError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// Snapshot file errors, kept distinct so callers can tell them apart.
class SnapshotError : public Error {
public:
    using Error::Error;
};
class ChecksumError : public SnapshotError {
public:
    using SnapshotError::SnapshotError;
};
class VersionError : public SnapshotError {
public:
    using SnapshotError::SnapshotError;
};
class TruncatedFileError : public SnapshotError {
public:
    using SnapshotError::SnapshotError;
};
class FormatError : public SnapshotError {
public:
    using SnapshotError::SnapshotError;
};

}  // namespace bkhm
