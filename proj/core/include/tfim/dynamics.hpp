#pragma once

#include <string>
#include <vector>

#include "tfim/hamiltonian.hpp"
#include "tfim/krylov.hpp"
#include "tfim/spectrum.hpp"
#include "tfim/state.hpp"

namespace tfim {

enum class RampShape { exponential_down, exponential_down_then_reverse };

// B(t) = b_initial J0 exp(-t / tau) on the way down. The reverse shape turns
// around at total/2 and retraces the down leg mirror-symmetrically, so it
// ends back at b_initial J0.
struct RampSchedule {
  double b_initial = 5.0;  // units of J0
  double j0_khz = 1.0;
  double tau_ms = 0.4;
  double total_duration_ms = 2.4;
  RampShape shape = RampShape::exponential_down;
  bool freeze_then_measure = true;

  /// Down-ramp lasting 6 tau unless a duration is given.
  static RampSchedule exponential(double j0_khz, double tau_ms, double b_initial = 5.0,
                                  double total_duration_ms = 0.0);
  /// Down then back up; 12 tau in total unless a duration is given.
  static RampSchedule reversal(double j0_khz, double tau_ms, double b_initial = 5.0,
                               double total_duration_ms = 0.0);

  double field_khz(double t_ms) const;
  /// Time at which B is smallest (the end of the down leg).
  double turnaround_ms() const;
  void validate() const;
};

struct StepControl {
  double max_step_ms = 0.0;      // 0 picks tau / steps_per_tau
  int steps_per_tau = 64;
  double min_step_ms = 1e-9;
  KrylovExpOptions krylov{};
  std::vector<double> snapshot_times_ms;  // extra snapshots beyond the default three
};

struct Snapshot {
  double time_ms = 0.0;
  double field_khz = 0.0;
  std::string label;  // "initial", "turnaround", "final" or "requested"
  StateVector state;  // z basis
};

struct Trajectory {
  std::vector<Snapshot> snapshots;  // ordered by time
  int steps = 0;
  long long matvecs = 0;
  double max_norm_drift = 0.0;

  const Snapshot& final_state() const { return snapshots.back(); }
  const Snapshot& at_label(const std::string& label) const;
};

/// Integrates i d|psi>/dt = 2 pi H(t) |psi> with H(t) = H(J, B(t)), t in ms and
/// frequencies in kHz. Uses a fourth-order commutator-free Magnus scheme with
/// Krylov exponentials. Snapshots are always taken at t = 0, at the field
/// minimum and at the end.
Trajectory evolve(const StateVector& initial, const CouplingMatrix& couplings,
                  const RampSchedule& schedule, const StepControl& control = {},
                  CouplingSign sign = CouplingSign::antiferromagnetic);

struct AdiabaticityReport {
  double ramp_rate_khz = 0.0;      // |dB/dt| / B = 1 / tau
  double critical_gap_khz = 0.0;   // Delta_c
  double ratio = 0.0;              // ramp rate / Delta_c
  std::string label;               // "quench" or "quasi_adiabatic"
};

/// Compares the logarithmic ramp rate with the critical gap, both as
/// ordinary frequencies.
AdiabaticityReport adiabaticity_diagnostic(const RampSchedule& schedule, const SpectrumScan& scan);

}  // namespace tfim
