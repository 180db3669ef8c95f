#include "biphoton/errors.hpp"

namespace biphoton {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Domain: return "domain";
    case ErrorKind::NoPhaseMatching: return "no_phase_matching";
    case ErrorKind::Resolution: return "resolution";
    case ErrorKind::DegenerateInput: return "degenerate_input";
    case ErrorKind::Physicality: return "physicality";
    case ErrorKind::SingularCavity: return "singular_cavity";
    case ErrorKind::InsufficientData: return "insufficient_data";
    case ErrorKind::NonConvergence: return "non_convergence";
    case ErrorKind::DegenerateFit: return "degenerate_fit";
    case ErrorKind::Config: return "config";
  }
  return "unknown";
}

}  // namespace biphoton
