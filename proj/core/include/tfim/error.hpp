#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tfim {

enum class ErrorKind {
  invalid_argument,
  dimension_mismatch,
  no_convergence,
  zigzag_instability,
  sideband_resonance,
  undefined_fit,
  step_underflow,
  norm_drift,
  ambiguous_coupling,
  config,
  io,
  resource_guard,
};

std::string_view to_string(ErrorKind kind) noexcept;

// All recoverable failures in the library are reported as tfim::Error; the
// kind is stable and is what the CLI prints in its machine-readable report.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace tfim
