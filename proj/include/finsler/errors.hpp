#pragma once

#include <stdexcept>
#include <string>

namespace finsler {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Point lies outside the metric's declared domain.
struct DomainError : Error {
    using Error::Error;
};

/// Evaluation hit sqrt(<=0), division by ~0, or a non-finite intermediate.
struct NonSmoothPointError : Error {
    using Error::Error;
};

/// Fundamental tensor not invertible (condition number above threshold).
struct SingularMetricError : Error {
    using Error::Error;
};

/// Requested derivative exceeds the jet budget of the frame.
struct DepthError : Error {
    using Error::Error;
};

/// Tensor slot metadata missing or contraction pairs same-variance slots.
struct VarianceError : Error {
    using Error::Error;
};

/// Invalid builtin-family parameter.
struct BadParameterError : Error {
    using Error::Error;
};

/// Rejection sampling failed to find an in-domain point.
struct SamplingExhaustedError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace finsler
