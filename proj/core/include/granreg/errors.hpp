#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace granreg {

/// Base class for all granreg errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define GRANREG_DEFINE_ERROR(Name)              \
  class Name : public Error {                   \
   public:                                      \
    using Error::Error;                         \
  }

// code_hierarchy
GRANREG_DEFINE_ERROR(InvalidCode);
GRANREG_DEFINE_ERROR(EmptyCorpus);
GRANREG_DEFINE_ERROR(LevelOrder);

// stay_store
GRANREG_DEFINE_ERROR(ValidationError);
GRANREG_DEFINE_ERROR(DegenerateSplit);
GRANREG_DEFINE_ERROR(IoError);

// design_matrix
GRANREG_DEFINE_ERROR(UnknownCode);
GRANREG_DEFINE_ERROR(ShapeMismatch);

// regression
GRANREG_DEFINE_ERROR(SingularHessian);
GRANREG_DEFINE_ERROR(CapExceeded);
GRANREG_DEFINE_ERROR(DegenerateOutcome);
GRANREG_DEFINE_ERROR(DegenerateSpectrum);

// spectra
GRANREG_DEFINE_ERROR(NotSymmetric);
GRANREG_DEFINE_ERROR(SingularMatrix);
GRANREG_DEFINE_ERROR(InsufficientTail);

// consistency
GRANREG_DEFINE_ERROR(DegenerateVector);

// synthetic / cli
GRANREG_DEFINE_ERROR(ConfigError);

#undef GRANREG_DEFINE_ERROR

/// Parse failure with the 1-based line number of the offending input line.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line)
      : Error(message + " (line " + std::to_string(line) + ")"), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace granreg
