#include "tfim/error.hpp"

namespace tfim {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::dimension_mismatch: return "dimension_mismatch";
    case ErrorKind::no_convergence: return "no_convergence";
    case ErrorKind::zigzag_instability: return "zigzag_instability";
    case ErrorKind::sideband_resonance: return "sideband_resonance";
    case ErrorKind::undefined_fit: return "undefined_fit";
    case ErrorKind::step_underflow: return "step_underflow";
    case ErrorKind::norm_drift: return "norm_drift";
    case ErrorKind::ambiguous_coupling: return "ambiguous_coupling";
    case ErrorKind::config: return "config";
    case ErrorKind::io: return "io";
    case ErrorKind::resource_guard: return "resource_guard";
  }
  return "unknown";
}

}  // namespace tfim
