#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace tfim {

// Harmonic linear Paul trap holding a single ion species. Frequencies are
// ordinary (not angular) and stored in kHz; use from_mhz at config edges.
struct TrapParameters {
  int n_ions = 0;
  double axial_khz = 0.0;
  double transverse_com_khz = 0.0;  // nu_1, the highest transverse mode
  double recoil_khz = 18.5;         // nu_R = h / (M lambda^2)

  static TrapParameters from_mhz(int n_ions, double axial_mhz,
                                 double transverse_com_mhz,
                                 double recoil_khz = 18.5);

  void validate() const;
};

// Equilibrium positions are in units of the axial length scale
// (e^2 / 4 pi eps0 M omega_ax^2)^(1/3). Modes are sorted by descending
// frequency, so column 0 of mode_vectors is the center-of-mass mode.
struct ChainGeometry {
  std::vector<double> positions;
  std::vector<double> mode_freqs_khz;
  Eigen::MatrixXd mode_vectors;  // (ion, mode)

  int n_ions() const { return static_cast<int>(positions.size()); }
};

struct EquilibriumOptions {
  double gradient_tolerance = 1e-10;
  int max_iterations = 500;
};

/// Unique minimizer of V(u) = sum u_i^2 / 2 + sum_{i<j} 1 / |u_i - u_j|,
/// found by damped Newton iteration. Throws no_convergence if the gradient
/// norm is still above tolerance after the iteration budget.
std::vector<double> equilibrium_positions(const TrapParameters& trap,
                                          const EquilibriumOptions& options = {});

/// Euclidean norm of grad V at u.
double equilibrium_gradient_norm(std::span<const double> positions);

/// Diagonalizes the transverse Hessian about a valid equilibrium. Throws
/// zigzag_instability if any transverse eigenvalue is negative.
ChainGeometry transverse_modes(const TrapParameters& trap,
                               std::span<const double> positions);

/// Convenience: equilibrium followed by transverse modes.
ChainGeometry solve_chain(const TrapParameters& trap);

}  // namespace tfim
