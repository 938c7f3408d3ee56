#pragma once

#include <stdexcept>
#include <string>

namespace bike {

// Base class for every error this library throws on purpose.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// numerics
struct ZeroVectorError : Error {
  explicit ZeroVectorError(const std::string& msg) : Error(msg) {}
};
struct DimMismatchError : Error {
  explicit DimMismatchError(const std::string& msg) : Error(msg) {}
};
struct NonPositiveTemperatureError : Error {
  explicit NonPositiveTemperatureError(const std::string& msg) : Error(msg) {}
};
struct NonFiniteError : Error {
  explicit NonFiniteError(const std::string& msg) : Error(msg) {}
};
struct EmptyInputError : Error {
  explicit EmptyInputError(const std::string& msg) : Error(msg) {}
};
struct InvalidArgumentError : Error {
  explicit InvalidArgumentError(const std::string& msg) : Error(msg) {}
};

// embedding files and manifests
struct BadMagicError : Error {
  explicit BadMagicError(const std::string& msg) : Error(msg) {}
};
struct BadVersionError : Error {
  explicit BadVersionError(const std::string& msg) : Error(msg) {}
};
struct TruncatedFileError : Error {
  explicit TruncatedFileError(const std::string& msg) : Error(msg) {}
};
struct TrailingBytesError : Error {
  explicit TrailingBytesError(const std::string& msg) : Error(msg) {}
};
struct DimOverflowError : Error {
  explicit DimOverflowError(const std::string& msg) : Error(msg) {}
};
struct MissingFileError : Error {
  explicit MissingFileError(const std::string& msg) : Error(msg) {}
};
struct UnknownLabelError : Error {
  explicit UnknownLabelError(const std::string& msg) : Error(msg) {}
};
struct ManifestError : Error {
  explicit ManifestError(const std::string& msg) : Error(msg) {}
};
struct EmptyTextError : Error {
  explicit EmptyTextError(const std::string& msg) : Error(msg) {}
};

// attributes
struct BadKError : Error {
  explicit BadKError(const std::string& msg) : Error(msg) {}
};
struct EmptyAttributesError : Error {
  explicit EmptyAttributesError(const std::string& msg) : Error(msg) {}
};
struct MissingPlaceholderError : Error {
  explicit MissingPlaceholderError(const std::string& msg) : Error(msg) {}
};

// recognition
struct LengthMismatchError : Error {
  explicit LengthMismatchError(const std::string& msg) : Error(msg) {}
};
struct LambdaOutOfRangeError : Error {
  explicit LambdaOutOfRangeError(const std::string& msg) : Error(msg) {}
};
struct EmptyDatasetError : Error {
  explicit EmptyDatasetError(const std::string& msg) : Error(msg) {}
};
struct TooFewClassesError : Error {
  explicit TooFewClassesError(const std::string& msg) : Error(msg) {}
};
struct DimTooSmallError : Error {
  explicit DimTooSmallError(const std::string& msg) : Error(msg) {}
};

// distributed simulation
struct IndivisibleBatchError : Error {
  explicit IndivisibleBatchError(const std::string& msg) : Error(msg) {}
};
struct InconsistentShardPlanError : Error {
  explicit InconsistentShardPlanError(const std::string& msg) : Error(msg) {}
};
struct GatherNotRunError : Error {
  explicit GatherNotRunError(const std::string& msg) : Error(msg) {}
};

}  // namespace bike
