#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mongealign {

enum class ErrorCode {
  kInvalidArgument,
  kNonHermitian,
  kNegativeEigenvalue,
  kSingularMatrix,
  kSingularSource,
  kDimensionMismatch,
  kShapeMismatch,
  kEmptyInput,
  kSignalTooShort,
  kNotDivisible,
  kInconsistentChannels,
  kChannelMismatch,
  kSingularDomainSpectrum,
  kFilterLongerThanSignal,
  kNonRealResult,
  kEmptyDomain,
  kInvalidSpectrum,
  kBadKernel,
  kNotBandLimited,
  kNonFinite,
  kBadMagic,
  kTruncatedFile,
  kVersionUnsupported,
  kSchemaError,
  kIoError,
};

/// Stable machine-readable name, e.g. "SignalTooShort".
std::string_view error_name(ErrorCode code);

/// The single exception type thrown by the library. The code is what callers
/// (and the CLI's JSON error reports) should dispatch on.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mongealign
