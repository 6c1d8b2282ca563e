#pragma once

#include <stdexcept>
#include <string>

namespace shepeaks {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation (t <= 0, eps >= 1, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A covariance model cannot be realised numerically (not symmetric, not PSD).
class ModelError : public Error {
 public:
  using Error::Error;
};

/// Solver or experiment configuration violates a stated invariant.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A statistical estimator has too little data to produce a fit.
class EstimatorError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace shepeaks
