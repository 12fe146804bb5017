#include "mongealign/error.hpp"

namespace mongealign {

std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kNonHermitian: return "NonHermitian";
    case ErrorCode::kNegativeEigenvalue: return "NegativeEigenvalue";
    case ErrorCode::kSingularMatrix: return "SingularMatrix";
    case ErrorCode::kSingularSource: return "SingularSource";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kSignalTooShort: return "SignalTooShort";
    case ErrorCode::kNotDivisible: return "NotDivisible";
    case ErrorCode::kInconsistentChannels: return "InconsistentChannels";
    case ErrorCode::kChannelMismatch: return "ChannelMismatch";
    case ErrorCode::kSingularDomainSpectrum: return "SingularDomainSpectrum";
    case ErrorCode::kFilterLongerThanSignal: return "FilterLongerThanSignal";
    case ErrorCode::kNonRealResult: return "NonRealResult";
    case ErrorCode::kEmptyDomain: return "EmptyDomain";
    case ErrorCode::kInvalidSpectrum: return "InvalidSpectrum";
    case ErrorCode::kBadKernel: return "BadKernel";
    case ErrorCode::kNotBandLimited: return "NotBandLimited";
    case ErrorCode::kNonFinite: return "NonFinite";
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kTruncatedFile: return "TruncatedFile";
    case ErrorCode::kVersionUnsupported: return "VersionUnsupported";
    case ErrorCode::kSchemaError: return "SchemaError";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace mongealign
