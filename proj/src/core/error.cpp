#include "imhotep/core/error.hpp"

namespace imhotep {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::UnsupportedTransferSyntax: return "UnsupportedTransferSyntax";
    case ErrorCode::TruncatedFile: return "TruncatedFile";
    case ErrorCode::InconsistentGeometry: return "InconsistentGeometry";
    case ErrorCode::NonUniformSpacing: return "NonUniformSpacing";
    case ErrorCode::SingleSlice: return "SingleSlice";
    case ErrorCode::MalformedLine: return "MalformedLine";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::NonTriangleFace: return "NonTriangleFace";
    case ErrorCode::ManifestMissing: return "ManifestMissing";
    case ErrorCode::ManifestEntryUnreadable: return "ManifestEntryUnreadable";
    case ErrorCode::OutOfBounds: return "OutOfBounds";
    case ErrorCode::DegenerateTransform: return "DegenerateTransform";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::EmptyScene: return "EmptyScene";
    case ErrorCode::UnknownPreset: return "UnknownPreset";
    case ErrorCode::PlacementOverflow: return "PlacementOverflow";
    case ErrorCode::UnknownMesh: return "UnknownMesh";
    case ErrorCode::ExecutorShutDown: return "ExecutorShutDown";
    case ErrorCode::UnknownType: return "UnknownType";
    case ErrorCode::BadPayload: return "BadPayload";
    case ErrorCode::NotLoaded: return "NotLoaded";
    case ErrorCode::BindFailure: return "BindFailure";
  }
  return "Unknown";
}

}  // namespace imhotep
