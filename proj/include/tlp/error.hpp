#pragma once

#include <stdexcept>
#include <string>

namespace tlp {

enum class ErrorKind {
  EmptySupport,
  InvalidInput,
  InvalidScale,
  DimMismatch,
  MassMismatch,
  ChannelMismatch,
  GridMismatch,
  ShapeMismatch,
  OutOfRange,
  NoSuchComponent,
  DegenerateRow,
  DegenerateDensity,
  SolverFailure,
  StepTooLarge,
  EmptyTrain,
  RankError,
  InvalidParams,
  InvalidGamma,
  NegativeMass,
  InvalidPrice,
  DegenerateWindow,
  SuggestsLogDomain,
  Undefined,
  IoError,
  InvalidArgument,
};

const char* to_string(ErrorKind k);

// Single exception type carrying a machine-checkable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace tlp
