#include "stackgrasp/error.hpp"

namespace stackgrasp {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kFrameMismatch: return "FrameMismatch";
    case ErrorKind::kInfeasibleJitter: return "InfeasibleJitter";
    case ErrorKind::kDegenerateProjection: return "DegenerateProjection";
    case ErrorKind::kFreeFall: return "FreeFall";
    case ErrorKind::kParse: return "ParseError";
    case ErrorKind::kStorage: return "StorageError";
    case ErrorKind::kRefusesOverwrite: return "RefusesOverwrite";
    case ErrorKind::kMissingGroundTruth: return "MissingGroundTruth";
    case ErrorKind::kUsage: return "UsageError";
  }
  return "Unknown";
}

}  // namespace stackgrasp
