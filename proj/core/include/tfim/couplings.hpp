#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "tfim/ion_chain.hpp"

namespace tfim {

enum class DetuningRule {
  explicit_value,        // use DriveParameters::detuning_khz as given
  com_plus_3_eta_omega,  // mu = nu_1 + 3 eta Omega, eta = sqrt(nu_R / nu_1)
};

struct DriveParameters {
  double rabi_khz = 600.0;
  DetuningRule detuning_rule = DetuningRule::com_plus_3_eta_omega;
  double detuning_khz = 0.0;  // only read for explicit_value
  double resonance_guard_khz = 1.0;

  /// Resolved beatnote detuning mu in kHz.
  double beatnote_detuning_khz(const TrapParameters& trap) const;
  void validate() const;
};

// Ising couplings in kHz with their power-law characterization. The matrix is
// symmetric with a zero diagonal.
struct CouplingMatrix {
  Eigen::MatrixXd values;
  double fitted_j0 = 0.0;              // intercept of the power-law fit
  double fitted_alpha = 0.0;
  std::optional<double> range_xi;      // 5^(1/alpha); empty for alpha <= 0
  double fit_residual = 0.0;           // rms of the weighted log-log residuals
  double mean_nearest_neighbor = 0.0;  // J̄(1), the J0 used for B/J0

  int n() const { return static_cast<int>(values.rows()); }
};

struct PowerLawFit {
  double j0 = 0.0;
  double alpha = 0.0;
  double residual = 0.0;
  std::vector<double> mean_by_separation;  // J̄(r) for r = 1..N-1
};

/// Mode-sum coupling matrix
///   J_ij = Omega^2 nu_R sum_m b_im b_jm / (mu^2 - nu_m^2).
/// retained_modes restricts the sum (empty keeps every mode). Throws
/// sideband_resonance when mu sits within the guard of a retained mode.
CouplingMatrix ising_couplings(const ChainGeometry& chain, const TrapParameters& trap,
                               const DriveParameters& drive,
                               const std::vector<int>& retained_modes = {});

/// Averages couplings at each separation and fits log J̄(r) = log J0 - alpha log r
/// by least squares with weight N - r (the number of pairs at that separation).
PowerLawFit fit_power_law(const Eigen::MatrixXd& couplings);

/// xi = 5^(1/alpha). Throws for alpha <= 0 (infinite range).
double interaction_range(double alpha);

/// J_ij = j0 / |i - j|^alpha.
CouplingMatrix synthetic_power_law(int n, double j0_khz, double alpha);

/// Wraps a raw symmetric matrix, filling the fit fields. The fit is skipped
/// (fields left at zero) for N < 3 or when some J̄(r) is not positive.
CouplingMatrix characterize(Eigen::MatrixXd values);

/// Equilibrium, transverse modes and mode-sum couplings in one call.
CouplingMatrix physical_couplings(const TrapParameters& trap, const DriveParameters& drive);

/// Bisects the axial frequency (kHz) whose physical couplings fit to the
/// requested exponent. The bracket is clipped to the zigzag-stable range.
double axial_frequency_for_alpha(double target_alpha, TrapParameters trap,
                                 const DriveParameters& drive, double lo_khz,
                                 double hi_khz);

void write_couplings_csv(std::ostream& out, const CouplingMatrix& couplings);
void write_couplings_csv(const std::filesystem::path& path, const CouplingMatrix& couplings);
CouplingMatrix read_couplings_csv(std::istream& in);
CouplingMatrix read_couplings_csv(const std::filesystem::path& path);

}  // namespace tfim
