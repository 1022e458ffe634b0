#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qrmt {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define QRMT_DEFINE_ERROR(Name)       \
  class Name : public Error {         \
   public:                            \
    using Error::Error;               \
  };

// quaternion-core
QRMT_DEFINE_ERROR(StructureViolation)
// ensemble
QRMT_DEFINE_ERROR(InvalidSpec)
QRMT_DEFINE_ERROR(DegenerateVariance)
QRMT_DEFINE_ERROR(AlreadyScaled)
// spectra
QRMT_DEFINE_ERROR(ConvergenceFailure)
// stieltjes
QRMT_DEFINE_ERROR(InvalidParams)
QRMT_DEFINE_ERROR(GridTooCoarse)
QRMT_DEFINE_ERROR(NoConvergence)
// resolvent-diagnostics
QRMT_DEFINE_ERROR(SingularSystem)
QRMT_DEFINE_ERROR(IndexOutOfRange)
QRMT_DEFINE_ERROR(OddDimension)
QRMT_DEFINE_ERROR(NumericallySingular)
QRMT_DEFINE_ERROR(SingularBlock)
// cli-experiments
QRMT_DEFINE_ERROR(InsufficientData)
QRMT_DEFINE_ERROR(IoFailure)
QRMT_DEFINE_ERROR(ConfigError)

#undef QRMT_DEFINE_ERROR

/// Raised when two eigenvalues that should coincide in a pair are split.
class PairingViolation : public Error {
 public:
  PairingViolation(const std::string& what, std::size_t index)
      : Error(what), index_(index) {}

  /// Zero-based position of the first eigenvalue of the offending pair.
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

}  // namespace qrmt
