#pragma once

#include <stdexcept>
#include <string>

namespace rydsense {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Two eigenvalues coincide and independent eigenvectors cannot be resolved.
class DegenerateEigenvectors : public Error {
 public:
  using Error::Error;
};

// Branch matching could not decide between two assignments.
class AmbiguousMatch : public Error {
 public:
  using Error::Error;
};

class QuadratureNotConverged : public Error {
 public:
  QuadratureNotConverged(const std::string& msg, double achieved)
      : Error(msg), error_estimate(achieved) {}
  double error_estimate;
};

class EmptyScan : public Error {
 public:
  using Error::Error;
};

class InsufficientSpan : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace rydsense
