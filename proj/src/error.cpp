#include "faceforge/error.hpp"

namespace faceforge {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::contract: return "contract violation";
    case ErrorKind::level_count: return "level count";
    case ErrorKind::wrong_kind: return "wrong pyramid kind";
    case ErrorKind::geometry: return "geometry";
    case ErrorKind::unfillable: return "unfillable";
    case ErrorKind::pairing: return "pairing";
    case ErrorKind::validation: return "validation";
    case ErrorKind::degenerate: return "degenerate";
    case ErrorKind::numerical: return "numerical";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

}  // namespace faceforge
