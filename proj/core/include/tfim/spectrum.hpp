#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tfim/hamiltonian.hpp"
#include "tfim/krylov.hpp"

namespace tfim {

// Eigenspaces of the global pi rotation about y, U = prod_i (i sigma_y^(i)).
// even/odd refer to P = prod_i sigma_y^(i) = i^-N U having eigenvalue +1/-1;
// the transverse-field ground state and |+y...+y> live in the even sector.
enum class FlipSector { all, even, odd };

struct EigenState {
  double energy = 0.0;
  StateVector state;  // z-product basis
  double residual = 0.0;
};

/// k lowest eigenpairs of H (matrix-free Lanczos), energies ascending,
/// degenerate subspaces with orthonormal bases. Residuals are below
/// relative_tolerance * ||H||.
std::vector<EigenState> lowest_eigenpairs(const IsingHamiltonian& h, int k,
                                          FlipSector sector = FlipSector::all,
                                          LanczosOptions options = {});

/// In-place projector onto a flip sector, acting on x-frame amplitudes.
void project_flip_sector_ising_frame(std::span<Complex> amplitudes, int n_spins,
                                     FlipSector sector);

struct GapOptions {
  CouplingSign sign = CouplingSign::antiferromagnetic;
  int initial_states = 4;            // eigenpairs tried before growing
  double coupling_threshold = 1e-8;  // on |<e| dH/dB |g>| for unit vectors
  double degeneracy_tolerance = 1e-9;  // in units of J0
  double eigen_tolerance = 1e-11;    // relative residual for the scan
  int workers = 0;                   // 0 = hardware concurrency
  std::uint64_t seed = 0x5eedULL;    // Lanczos start vectors; scans offset it per point
};

struct GapPoint {
  double field_khz = 0.0;
  double ground_energy = 0.0;
  double excited_energy = 0.0;
  double gap_khz = 0.0;
  double matrix_element = 0.0;
  int states_examined = 0;
};

/// Gap between the even-sector ground state and the lowest state (or
/// degenerate cluster) with a non-zero matrix element of dH/dB = -sum sigma_y.
/// Throws ambiguous_coupling when no examined state couples.
GapPoint coupled_gap(const IsingHamiltonian& h, double j0_khz, const GapOptions& options = {});

struct SpectrumScan {
  int n_spins = 0;
  double j0_khz = 0.0;
  double alpha = 0.0;
  std::vector<double> b_grid;  // B / J0
  std::vector<double> gaps;    // gap / J0
  double critical_field = 0.0;  // B_c / J0
  double critical_gap = 0.0;    // Delta_c / J0
};

/// 200 logarithmically spaced points over [0.01, 5].
std::vector<double> default_b_grid(int points = 200, double lo = 0.01, double hi = 5.0);

/// Coupled gap on every grid point (B in units of J0 = J̄(1)), run in
/// parallel over grid points. The grid must span [0.01, 5] with >= 50 points.
SpectrumScan critical_gap_scan(const CouplingMatrix& couplings, const std::vector<double>& b_grid,
                               const GapOptions& options = {});

void write_scan_csv(std::ostream& out, const SpectrumScan& scan);
std::string scan_summary_json(const SpectrumScan& scan);

}  // namespace tfim
