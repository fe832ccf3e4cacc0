#include "tfim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "tfim/error.hpp"

namespace tfim {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
const double kSqrt3 = std::sqrt(3.0);
const double kAlpha1 = (3.0 - 2.0 * kSqrt3) / 12.0;
const double kAlpha2 = (3.0 + 2.0 * kSqrt3) / 12.0;
const double kNode1 = 0.5 - kSqrt3 / 6.0;
const double kNode2 = 0.5 + kSqrt3 / 6.0;

double norm_of(std::span<const Complex> v) {
  double s = 0.0;
  for (const auto& a : v) s += std::norm(a);
  return std::sqrt(s);
}

}  // namespace

RampSchedule RampSchedule::exponential(double j0_khz, double tau_ms, double b_initial,
                                       double total_duration_ms) {
  RampSchedule s;
  s.j0_khz = j0_khz;
  s.tau_ms = tau_ms;
  s.b_initial = b_initial;
  s.total_duration_ms = total_duration_ms > 0.0 ? total_duration_ms : 6.0 * tau_ms;
  s.shape = RampShape::exponential_down;
  return s;
}

RampSchedule RampSchedule::reversal(double j0_khz, double tau_ms, double b_initial,
                                    double total_duration_ms) {
  RampSchedule s = exponential(j0_khz, tau_ms, b_initial, total_duration_ms);
  if (!(total_duration_ms > 0.0)) s.total_duration_ms = 12.0 * tau_ms;
  s.shape = RampShape::exponential_down_then_reverse;
  return s;
}

double RampSchedule::turnaround_ms() const {
  return shape == RampShape::exponential_down ? total_duration_ms : 0.5 * total_duration_ms;
}

double RampSchedule::field_khz(double t_ms) const {
  double t = std::clamp(t_ms, 0.0, total_duration_ms);
  if (shape == RampShape::exponential_down_then_reverse && t > turnaround_ms())
    t = total_duration_ms - t;
  return b_initial * j0_khz * std::exp(-t / tau_ms);
}

void RampSchedule::validate() const {
  std::ostringstream msg;
  if (!(tau_ms > 0.0) || !std::isfinite(tau_ms)) msg << "tau must be positive; ";
  if (!(total_duration_ms > 0.0) || !std::isfinite(total_duration_ms))
    msg << "total duration must be positive; ";
  if (!(j0_khz > 0.0)) msg << "J0 must be positive; ";
  if (!(b_initial >= 0.0) || !std::isfinite(b_initial)) msg << "initial field must be >= 0; ";
  if (!msg.str().empty()) throw Error(ErrorKind::invalid_argument, "invalid ramp: " + msg.str());
}

const Snapshot& Trajectory::at_label(const std::string& label) const {
  for (const auto& s : snapshots)
    if (s.label == label) return s;
  throw Error(ErrorKind::invalid_argument, "no snapshot labelled " + label);
}

Trajectory evolve(const StateVector& initial, const CouplingMatrix& couplings,
                  const RampSchedule& schedule, const StepControl& control, CouplingSign sign) {
  schedule.validate();
  const int n = initial.n_spins();
  if (couplings.n() != n)
    throw Error(ErrorKind::dimension_mismatch, "coupling matrix size does not match the state");
  if (std::abs(initial.norm() - 1.0) > 1e-9)
    throw Error(ErrorKind::invalid_argument, "initial state must be normalized");
  if (control.steps_per_tau < 1) throw Error(ErrorKind::invalid_argument, "steps_per_tau must be >= 1");

  const IsingHamiltonian h(couplings, 0.0, sign);
  const double total = schedule.total_duration_ms;
  const double max_step =
      control.max_step_ms > 0.0 ? control.max_step_ms : schedule.tau_ms / control.steps_per_tau;
  if (max_step < control.min_step_ms) {
    std::ostringstream msg;
    msg << "requested step " << max_step << " ms is below the minimum " << control.min_step_ms << " ms";
    throw Error(ErrorKind::step_underflow, msg.str());
  }

  struct Event {
    double t;
    std::string label;
  };
  std::vector<Event> events{{0.0, "initial"}};
  if (schedule.turnaround_ms() < total) events.push_back({schedule.turnaround_ms(), "turnaround"});
  for (double t : control.snapshot_times_ms) {
    if (!(t >= 0.0 && t <= total))
      throw Error(ErrorKind::invalid_argument, "snapshot time outside the schedule");
    events.push_back({t, "requested"});
  }
  events.push_back({total, "final"});
  std::stable_sort(events.begin(), events.end(), [](const Event& a, const Event& b) { return a.t < b.t; });

  KrylovExpOptions krylov = control.krylov;
  krylov.min_substep = kTwoPi * control.min_step_ms;

  StateVector frame = rotate_measurement_basis(initial, Axis::x);
  std::span<Complex> psi = frame.amplitudes();

  Trajectory traj;
  auto record = [&](const Event& e) {
    traj.snapshots.push_back(
        {e.t, schedule.field_khz(e.t), e.label, unrotate_measurement_basis(frame, Axis::x)});
  };

  auto stage = [&](double field, double theta) {
    const IsingFrameOperator op{h.ising_energies(), 0.5, field, n};
    const LinearMap map = [&op](std::span<const Complex> in, std::span<Complex> out) { op.apply(in, out); };
    const auto stats = krylov_expm_apply(map, theta, psi, krylov);
    traj.matvecs += stats.matvecs;
  };

  double t = 0.0;
  for (const Event& e : events) {
    const double span = e.t - t;
    if (span > 0.0) {
      const auto steps = static_cast<long long>(std::ceil(span / max_step - 1e-9));
      const double dt = span / static_cast<double>(steps);
      for (long long s = 0; s < steps; ++s) {
        const double t0 = t + s * dt;
        const double b1 = schedule.field_khz(t0 + kNode1 * dt);
        const double b2 = schedule.field_khz(t0 + kNode2 * dt);
        stage(kAlpha2 * b1 + kAlpha1 * b2, kTwoPi * dt);
        stage(kAlpha1 * b1 + kAlpha2 * b2, kTwoPi * dt);
        const double drift = std::abs(norm_of(psi) - 1.0);
        traj.max_norm_drift = std::max(traj.max_norm_drift, drift);
        if (drift > 1e-6) {
          std::ostringstream msg;
          msg << "norm drifted by " << drift << " at t=" << t0 + dt << " ms";
          throw Error(ErrorKind::norm_drift, msg.str());
        }
        ++traj.steps;
      }
      t = e.t;
    }
    record(e);
  }
  return traj;
}

AdiabaticityReport adiabaticity_diagnostic(const RampSchedule& schedule, const SpectrumScan& scan) {
  schedule.validate();
  AdiabaticityReport r;
  r.ramp_rate_khz = 1.0 / schedule.tau_ms;
  r.critical_gap_khz = scan.critical_gap * scan.j0_khz;
  r.ratio = r.critical_gap_khz > 0.0 ? r.ramp_rate_khz / r.critical_gap_khz
                                     : std::numeric_limits<double>::infinity();
  r.label = r.ramp_rate_khz > r.critical_gap_khz ? "quench" : "quasi_adiabatic";
  return r;
}

}  // namespace tfim
