#pragma once

#include <stdexcept>
#include <string>

namespace nlslab {

// Violated preconditions (bad inputs, refused runs). CLI maps these to exit 2.
struct PreconditionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical breakdowns discovered mid-run. CLI maps these to exit 3.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GridMismatchError : PreconditionError {
  GridMismatchError() : PreconditionError("fields live on different grids") {}
};

struct ResolutionError : PreconditionError {
  explicit ResolutionError(const std::string& what) : PreconditionError(what) {}
};

struct SpectralFailure : NumericalError {
  explicit SpectralFailure(const std::string& what) : NumericalError(what) {}
};

struct DegenerateSpectrumError : NumericalError {
  explicit DegenerateSpectrumError(const std::string& what) : NumericalError(what) {}
};

struct NotNearManifoldError : NumericalError {
  explicit NotNearManifoldError(const std::string& what) : NumericalError(what) {}
};

struct ModulationBreakdownError : NumericalError {
  explicit ModulationBreakdownError(const std::string& what) : NumericalError(what) {}
};

struct WindowTooLargeError : PreconditionError {
  explicit WindowTooLargeError(const std::string& what) : PreconditionError(what) {}
};

struct BadBracketError : PreconditionError {
  explicit BadBracketError(const std::string& what) : PreconditionError(what) {}
};

struct InconclusiveError : NumericalError {
  explicit InconclusiveError(const std::string& what) : NumericalError(what) {}
};

}  // namespace nlslab
