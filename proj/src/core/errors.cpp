#include "core/errors.hpp"

namespace peakon {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::InvalidGrid: return "invalid-grid";
    case ErrorKind::BoundaryDecay: return "boundary-decay";
    case ErrorKind::Continuity: return "continuity";
    case ErrorKind::JacobianDegenerate: return "jacobian-degenerate";
    case ErrorKind::StepSize: return "step-size";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

}  // namespace peakon
