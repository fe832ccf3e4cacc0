#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "tfim/state.hpp"

namespace tfim {

// Hermitian operator acting on amplitude buffers: out = A in.
using LinearMap = std::function<void(std::span<const Complex>, std::span<Complex>)>;
// Orthogonal projector applied in place; must commute with the operator.
using Projector = std::function<void(std::span<Complex>)>;

struct LanczosOptions {
  double relative_tolerance = 1e-8;  // residual bound, relative to op_norm
  int max_basis = 250;
  int max_restarts = 200;
  std::uint64_t seed = 0x5eedULL;
};

struct RitzPair {
  double value = 0.0;
  std::vector<Complex> vector;
  double residual = 0.0;  // ||A x - value x||
};

/// k lowest eigenpairs of a Hermitian operator, with multiplicity.
///
/// Lanczos with full reorthogonalization; converged Ritz vectors are locked
/// and later runs are kept orthogonal to them, so each copy of a degenerate
/// eigenvalue is found by a separate run. A final verification run from a
/// fresh vector checks that nothing below the locked set was missed. With a
/// projector the search is restricted to its range, and fewer than k pairs
/// are returned if that range is smaller than k.
///
/// Throws no_convergence (with the worst residual) if the restart budget runs out.
std::vector<RitzPair> lanczos_lowest(const LinearMap& op, std::size_t dim, int k,
                                     double op_norm, const LanczosOptions& options = {},
                                     const Projector& projector = {});

struct KrylovExpOptions {
  int max_dim = 30;
  double tolerance = 1e-12;   // a posteriori error bound per substep
  double min_substep = 0.0;   // smallest admissible substep in theta; 0 disables
};

struct KrylovExpStats {
  int matvecs = 0;
  int substeps = 0;
};

/// v <- exp(-i theta A) v for Hermitian A, via Lanczos with adaptive
/// substepping. Throws step_underflow if a substep would shrink below
/// options.min_substep.
KrylovExpStats krylov_expm_apply(const LinearMap& op, double theta, std::span<Complex> v,
                                 const KrylovExpOptions& options = {});

}  // namespace tfim
