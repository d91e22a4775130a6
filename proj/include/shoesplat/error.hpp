#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace shoesplat {

enum class ErrorKind {
  // parsing / io
  TruncatedFile,
  UnsupportedModel,
  MalformedText,
  MalformedPose,
  MalformedTrack,
  InvalidCamera,
  FormatError,
  MissingFile,
  IoError,
  // data
  EmptyPointCloud,
  EmptyEvalSet,
  EmptyMask,
  TooFewFrames,
  DimensionMismatch,
  BehindCamera,
  InconsistentReconstruction,
  InvalidArgument,
  // numerics
  NonFiniteLoss,
  // configuration / usage
  ConfigError,
};

std::string_view error_kind_name(ErrorKind kind);

/// Every failure raised by the library carries a kind so callers (and the
/// CLI's exit-code mapping) can dispatch without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::string_view name() const noexcept { return error_kind_name(kind_); }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace shoesplat
