#pragma once

#include <memory>
#include <span>
#include <vector>

#include "tfim/couplings.hpp"
#include "tfim/state.hpp"

namespace tfim {

enum class CouplingSign { antiferromagnetic, ferromagnetic };

/// E(s) = sum_{j<i} J_ij x_i x_j with x = +-1 read from the bits of s, for
/// every s in [0, 2^n). Throws resource_guard above max_spins.
std::vector<double> classical_energies(const CouplingMatrix& couplings, int max_spins = 24);

// Linear operator  diag_scale * E(s) - field * sum_i sigma_y^(i)  written in
// the x-product ("Ising") frame, where the Ising term is diagonal. This is
// the kernel behind both the eigensolver and the propagator.
struct IsingFrameOperator {
  std::span<const double> energies;
  double diag_scale = 1.0;
  double field_khz = 0.0;
  int n_spins = 0;

  void apply(std::span<const Complex> in, std::span<Complex> out) const;
};

// H = s * sum_{j<i} J_ij sigma_x^(i) sigma_x^(j) - B sum_i sigma_y^(i), with
// s = +1 (antiferromagnetic) or -1 (ferromagnetic). Units: kHz, h = 1.
class IsingHamiltonian {
 public:
  IsingHamiltonian(const CouplingMatrix& couplings, double field_khz,
                   CouplingSign sign = CouplingSign::antiferromagnetic);

  int n_spins() const { return n_; }
  std::size_t dim() const { return std::size_t{1} << n_; }
  double field_khz() const { return field_; }
  CouplingSign sign() const { return sign_; }
  double coupling_sign() const { return sign_ == CouplingSign::antiferromagnetic ? 1.0 : -1.0; }
  const CouplingMatrix& couplings() const { return *couplings_; }

  /// Same couplings at a different field; the classical energy table is shared.
  IsingHamiltonian with_field(double field_khz) const;

  /// H|psi> in the z-product basis. sigma_x sigma_x terms are paired bit
  /// flips and sigma_y terms single flips with +-i phases.
  void apply(std::span<const Complex> in, std::span<Complex> out) const;
  StateVector apply(const StateVector& state) const;

  /// H in the x-product frame (see rotate_measurement_basis(., Axis::x)).
  void apply_ising_frame(std::span<const Complex> in, std::span<Complex> out) const;
  IsingFrameOperator ising_frame_operator() const;

  /// Signed classical energies s * E(s), indexed by x-basis bitstring.
  std::span<const double> ising_energies() const { return *energies_; }

  /// Upper bound on the spectral norm: sum_{i<j} |J_ij| + N |B|.
  double norm_bound() const;

  double expectation(const StateVector& state) const;

 private:
  struct Bond {
    std::size_t mask;
    double j;
  };

  int n_ = 0;
  double field_ = 0.0;
  CouplingSign sign_ = CouplingSign::antiferromagnetic;
  std::shared_ptr<const CouplingMatrix> couplings_;
  std::shared_ptr<const std::vector<double>> energies_;
  std::shared_ptr<const std::vector<Bond>> bonds_;
};

}  // namespace tfim
