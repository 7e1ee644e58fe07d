#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace imhotep {

enum class ErrorCode {
  // patient data
  BadMagic,
  UnsupportedTransferSyntax,
  TruncatedFile,
  InconsistentGeometry,
  NonUniformSpacing,
  SingleSlice,
  MalformedLine,
  IndexOutOfRange,
  NonTriangleFace,
  ManifestMissing,
  ManifestEntryUnreadable,
  // numerics / rendering
  OutOfBounds,
  DegenerateTransform,
  InvalidArgument,
  // scene
  EmptyScene,
  UnknownPreset,
  PlacementOverflow,
  UnknownMesh,
  // runtime
  ExecutorShutDown,
  // protocol
  UnknownType,
  BadPayload,
  NotLoaded,
  BindFailure,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Base exception for every recoverable failure in the engine. The code is
/// the stable, machine-readable part; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised while loading a patient directory; names the offending entry and
/// keeps the code of the underlying failure.
class EntryError : public Error {
 public:
  EntryError(std::string entry, ErrorCode cause, const std::string& message)
      : Error(ErrorCode::ManifestEntryUnreadable, message),
        entry_(std::move(entry)),
        cause_(cause) {}

  const std::string& entry() const noexcept { return entry_; }
  ErrorCode cause() const noexcept { return cause_; }

 private:
  std::string entry_;
  ErrorCode cause_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace imhotep
