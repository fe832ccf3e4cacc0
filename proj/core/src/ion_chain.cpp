#include "tfim/ion_chain.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tfim/error.hpp"

namespace tfim {
namespace {

double potential(std::span<const double> u) {
  double v = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    v += 0.5 * u[i] * u[i];
    for (std::size_t j = i + 1; j < u.size(); ++j) v += 1.0 / std::abs(u[i] - u[j]);
  }
  return v;
}

Eigen::VectorXd gradient(std::span<const double> u) {
  const auto n = static_cast<Eigen::Index>(u.size());
  Eigen::VectorXd g(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double gi = u[i];
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = u[i] - u[j];
      gi -= std::copysign(1.0, d) / (d * d);
    }
    g(i) = gi;
  }
  return g;
}

Eigen::MatrixXd axial_hessian(std::span<const double> u) {
  const auto n = static_cast<Eigen::Index>(u.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const double c = 2.0 / std::pow(std::abs(u[i] - u[j]), 3);
      h(i, j) = -c;
      h(i, i) += c;
    }
  }
  return h;
}

}  // namespace

TrapParameters TrapParameters::from_mhz(int n_ions, double axial_mhz,
                                        double transverse_com_mhz,
                                        double recoil_khz) {
  return {n_ions, axial_mhz * 1e3, transverse_com_mhz * 1e3, recoil_khz};
}

void TrapParameters::validate() const {
  if (n_ions < 2) throw Error(ErrorKind::invalid_argument, "trap needs at least 2 ions");
  if (!(axial_khz > 0.0) || !(transverse_com_khz > 0.0) || !(recoil_khz > 0.0))
    throw Error(ErrorKind::invalid_argument, "trap frequencies must be strictly positive");
  if (axial_khz >= transverse_com_khz)
    throw Error(ErrorKind::invalid_argument,
                "axial frequency must be below the transverse COM frequency");
}

double equilibrium_gradient_norm(std::span<const double> positions) {
  return gradient(positions).norm();
}

std::vector<double> equilibrium_positions(const TrapParameters& trap,
                                          const EquilibriumOptions& options) {
  trap.validate();
  const int n = trap.n_ions;

  // Uniform seed over an empirical span ~ N^0.56.
  const double span = 1.4 * std::pow(static_cast<double>(n), 0.56);
  std::vector<double> u(n);
  for (int i = 0; i < n; ++i) u[i] = -0.5 * span + span * i / (n - 1);

  Eigen::VectorXd g = gradient(u);
  double v = potential(u);
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    if (g.norm() < options.gradient_tolerance) break;

    const Eigen::VectorXd step = -axial_hessian(u).ldlt().solve(g);

    // Keep the ordering: never let a neighbour gap shrink by more than half.
    double scale = 1.0;
    for (int i = 0; i + 1 < n; ++i) {
      const double gap = u[i + 1] - u[i];
      const double closing = step(i) - step(i + 1);
      if (closing > 0.5 * gap) scale = std::min(scale, 0.5 * gap / closing);
    }

    std::vector<double> trial(n);
    double trial_v = v;
    for (int backtrack = 0; backtrack < 60; ++backtrack) {
      for (int i = 0; i < n; ++i) trial[i] = u[i] + scale * step(i);
      trial_v = potential(trial);
      if (trial_v <= v + 1e-14 * std::abs(v)) break;
      scale *= 0.5;
    }
    u.swap(trial);
    v = trial_v;
    g = gradient(u);
  }

  const double gnorm = g.norm();
  if (!(gnorm < options.gradient_tolerance)) {
    std::ostringstream msg;
    msg << "equilibrium solver did not converge for N=" << n << " after "
        << options.max_iterations << " iterations (gradient norm " << gnorm << ")";
    throw Error(ErrorKind::no_convergence, msg.str());
  }
  return u;
}

ChainGeometry transverse_modes(const TrapParameters& trap,
                               std::span<const double> positions) {
  trap.validate();
  const auto n = static_cast<Eigen::Index>(positions.size());
  if (n != trap.n_ions)
    throw Error(ErrorKind::dimension_mismatch, "position count does not match n_ions");
  if (!(equilibrium_gradient_norm(positions) < 1e-8))
    throw Error(ErrorKind::invalid_argument, "positions are not an equilibrium");

  // Transverse Hessian in units of the axial frequency squared.
  const double ratio = trap.transverse_com_khz / trap.axial_khz;
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    k(i, i) = ratio * ratio;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const double c = 1.0 / std::pow(std::abs(positions[i] - positions[j]), 3);
      k(i, j) = c;
      k(i, i) -= c;
    }
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(k);
  const Eigen::VectorXd& lambda = solver.eigenvalues();  // ascending
  if (lambda(0) <= 0.0) {
    std::ostringstream msg;
    msg << "zigzag instability: transverse/axial ratio " << ratio
        << " is too small for " << n << " ions (lowest Hessian eigenvalue "
        << lambda(0) << ")";
    throw Error(ErrorKind::zigzag_instability, msg.str());
  }

  ChainGeometry chain;
  chain.positions.assign(positions.begin(), positions.end());
  chain.mode_freqs_khz.resize(n);
  chain.mode_vectors.resize(n, n);
  for (Eigen::Index m = 0; m < n; ++m) {
    const Eigen::Index src = n - 1 - m;
    chain.mode_freqs_khz[m] = trap.axial_khz * std::sqrt(lambda(src));
    Eigen::VectorXd b = solver.eigenvectors().col(src);
    b.normalize();
    Eigen::Index big = 0;
    for (Eigen::Index i = 1; i < n; ++i)
      if (std::abs(b(i)) > std::abs(b(big)) + 1e-12) big = i;
    if (b(big) < 0.0) b = -b;
    chain.mode_vectors.col(m) = b;
  }
  return chain;
}

ChainGeometry solve_chain(const TrapParameters& trap) {
  const auto u = equilibrium_positions(trap);
  return transverse_modes(trap, u);
}

}  // namespace tfim
