#pragma once

#include <stdexcept>
#include <string>

namespace hyperweno {

// Exception hierarchy. Each category maps to a distinct CLI exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

// h <= 0, rho <= 0 or p <= 0 encountered while evaluating a flux.
class NonPhysicalState : public Error {
 public:
  using Error::Error;
};

// A state entry left the admissible magnitude band (|u| > 1e8 or NaN).
class StepDiverged : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t offset)
      : Error(what + " (at byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  explicit FormatError(const std::string& what) : Error(what) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_ = 0;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Too many invalid (diverged) windows in one training epoch.
class TrainingAborted : public Error {
 public:
  using Error::Error;
};

}  // namespace hyperweno
