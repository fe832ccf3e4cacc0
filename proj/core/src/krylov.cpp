#include "tfim/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "tfim/error.hpp"

namespace tfim {
namespace {

using Vec = std::vector<Complex>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

Complex dot(std::span<const Complex> a, std::span<const Complex> b) {
  Complex s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

double norm(std::span<const Complex> a) {
  double s = 0.0;
  for (const auto& x : a) s += std::norm(x);
  return std::sqrt(s);
}

void axpy(Complex alpha, std::span<const Complex> x, std::span<Complex> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

struct Tridiagonal {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

Tridiagonal diagonalize(const std::vector<double>& alphas, const std::vector<double>& betas,
                        int m) {
  Eigen::VectorXd d(m);
  Eigen::VectorXd e(std::max(m - 1, 1));
  for (int i = 0; i < m; ++i) d(i) = alphas[i];
  for (int i = 0; i + 1 < m; ++i) e(i) = betas[i];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  if (m == 1) return {d, Eigen::MatrixXd::Identity(1, 1)};
  solver.computeFromTridiagonal(d, e.head(m - 1), Eigen::ComputeEigenvectors);
  return {solver.eigenvalues(), solver.eigenvectors()};
}

// Lanczos with full reorthogonalization and explicit locking. Converged
// vectors are accepted once their residual, with the locked directions
// projected out, is below a fraction of the tolerance; the closing
// Rayleigh-Ritz step then removes the remaining cross-talk.
class LowestSolver {
 public:
  LowestSolver(const LinearMap& op, std::size_t dim, double op_norm,
               const LanczosOptions& options, const Projector& projector)
      : op_(op),
        dim_(static_cast<Eigen::Index>(dim)),
        op_norm_(std::max(op_norm, 1e-300)),
        tol_(options.relative_tolerance * std::max(op_norm, 1e-300)),
        options_(options),
        projector_(projector),
        rng_(options.seed),
        locked_(dim_, 0) {}

  struct Found {
    double value;
    CVec vector;
  };

  std::vector<Found> found;

  std::vector<Found> converge(int want) {
    CVec start = random_vector();
    for (int restart = 0; restart <= options_.max_restarts; ++restart) {
      if (!prepare(start)) return {};
      auto run = lanczos(start, want);
      std::vector<Found> accepted;
      for (auto& pair : run) {
        if (deflated_residual(pair.vector, pair.value) < kAcceptFraction * tol_)
          accepted.push_back(std::move(pair));
        else
          break;
      }
      if (!accepted.empty()) return accepted;
      start = run.front().vector;
      // Nudge the restart so a stalled invariant direction cannot repeat.
      start += 1e-3 * random_vector() / std::sqrt(static_cast<double>(dim_));
    }
    std::ostringstream msg;
    msg << "Lanczos did not converge after " << options_.max_restarts
        << " restarts (tolerance " << tol_ << ")";
    throw Error(ErrorKind::no_convergence, msg.str());
  }

  void lock(Found f) {
    locked_.conservativeResize(Eigen::NoChange, locked_.cols() + 1);
    locked_.col(locked_.cols() - 1) = f.vector;
    found.push_back(std::move(f));
  }

  void apply(const CVec& in, CVec& out) {
    out.resize(dim_);
    op_(std::span<const Complex>(in.data(), in.size()), std::span<Complex>(out.data(), out.size()));
    if (projector_) projector_(std::span<Complex>(out.data(), out.size()));
  }

  double residual(const CVec& x, double value) {
    CVec ax;
    apply(x, ax);
    return (ax - value * x).norm();
  }

  double tolerance() const { return tol_; }

 private:
  static constexpr double kAcceptFraction = 0.2;

  double deflated_residual(const CVec& x, double value) {
    CVec r;
    apply(x, r);
    r -= value * x;
    if (locked_.cols() > 0) r -= locked_ * (locked_.adjoint() * r);
    return r.norm();
  }

  CVec random_vector() {
    std::normal_distribution<double> normal;
    CVec v(dim_);
    for (Eigen::Index i = 0; i < dim_; ++i) v(i) = Complex{normal(rng_), normal(rng_)};
    return v;
  }

  void deflate(CVec& v) const {
    if (locked_.cols() == 0) return;
    for (int pass = 0; pass < 2; ++pass) v -= locked_ * (locked_.adjoint() * v);
  }

  bool prepare(CVec& v) {
    if (projector_) projector_(std::span<Complex>(v.data(), v.size()));
    deflate(v);
    const double nrm = v.norm();
    if (nrm < 1e-8) return false;
    v /= nrm;
    return true;
  }

  std::vector<Found> lanczos(const CVec& start, int want) {
    const Eigen::Index available = dim_ - std::min<Eigen::Index>(dim_, locked_.cols());
    const int max_basis = static_cast<int>(
        std::min<Eigen::Index>(options_.max_basis, std::max<Eigen::Index>(available, 1)));

    CMat basis(dim_, max_basis);
    basis.col(0) = start;
    std::vector<double> alphas, betas;
    CVec w;
    for (int j = 0;; ++j) {
      apply(basis.col(j), w);
      const double a = basis.col(j).dot(w).real();
      w -= a * basis.col(j);
      if (j > 0) w -= betas[j - 1] * basis.col(j - 1);
      for (int pass = 0; pass < 2; ++pass) {
        const auto v = basis.leftCols(j + 1);
        w -= v * (v.adjoint() * w);
        deflate(w);
      }
      const double b = w.norm();
      alphas.push_back(a);
      const int m = j + 1;

      const bool invariant = b < 1e-10 * op_norm_;
      const bool full = m >= max_basis;
      const bool check = m >= want && (m % 5 == 0 || m == want);
      if (invariant || full || check) {
        const Tridiagonal t = diagonalize(alphas, betas, m);
        const int count = std::min(want, m);
        bool converged = true;
        for (int i = 0; i < count; ++i)
          if (std::abs(b * t.vectors(m - 1, i)) >= 0.05 * tol_) converged = false;
        if (converged || invariant || full) {
          std::vector<Found> out;
          for (int i = 0; i < count; ++i) {
            CVec x = basis.leftCols(m) * t.vectors.col(i).head(m).cast<Complex>();
            x.normalize();
            out.push_back({t.values(i), std::move(x)});
          }
          return out;
        }
      }
      betas.push_back(b);
      basis.col(j + 1) = w / b;
    }
  }

  const LinearMap& op_;
  Eigen::Index dim_;
  double op_norm_;
  double tol_;
  LanczosOptions options_;
  const Projector& projector_;
  std::mt19937_64 rng_;
  CMat locked_;
};

}  // namespace

std::vector<RitzPair> lanczos_lowest(const LinearMap& op, std::size_t dim, int k,
                                     double op_norm, const LanczosOptions& options,
                                     const Projector& projector) {
  if (k < 1) throw Error(ErrorKind::invalid_argument, "need k >= 1 eigenpairs");
  if (dim == 0) throw Error(ErrorKind::invalid_argument, "empty operator");
  if (static_cast<std::size_t>(k) > dim)
    throw Error(ErrorKind::invalid_argument, "k exceeds the operator dimension");

  LowestSolver solver(op, dim, op_norm, options, projector);
  auto kth_value = [&] {
    std::vector<double> values;
    for (const auto& f : solver.found) values.push_back(f.value);
    std::sort(values.begin(), values.end());
    return values[std::min<std::size_t>(k, values.size()) - 1];
  };

  while (solver.found.size() < static_cast<std::size_t>(k)) {
    auto batch = solver.converge(k - static_cast<int>(solver.found.size()));
    if (batch.empty()) break;
    for (auto& f : batch) solver.lock(std::move(f));
  }

  // Anything lower than the current k-th value that the runs skipped (for
  // instance a degenerate partner) shows up as the lowest state orthogonal to
  // the found set.
  for (int check = 0; check < 2 * k + 4 && !solver.found.empty(); ++check) {
    auto batch = solver.converge(1);
    if (batch.empty()) break;
    if (batch.front().value >= kth_value() - solver.tolerance()) break;
    solver.lock(std::move(batch.front()));
  }

  // Rayleigh-Ritz over the found set.
  const auto count = static_cast<Eigen::Index>(solver.found.size());
  CMat q(static_cast<Eigen::Index>(dim), count);
  CMat aq(static_cast<Eigen::Index>(dim), count);
  for (Eigen::Index i = 0; i < count; ++i) {
    q.col(i) = solver.found[i].vector;
    CVec img;
    solver.apply(q.col(i), img);
    aq.col(i) = img;
  }
  CMat g = q.adjoint() * aq;
  g = 0.5 * (g + g.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<CMat> rr(g);

  std::vector<RitzPair> out;
  const Eigen::Index keep = std::min<Eigen::Index>(k, count);
  for (Eigen::Index c = 0; c < keep; ++c) {
    CVec x = q * rr.eigenvectors().col(c);
    x.normalize();
    RitzPair pair;
    pair.value = rr.eigenvalues()(c);
    pair.residual = solver.residual(x, pair.value);
    pair.vector.assign(x.data(), x.data() + x.size());
    out.push_back(std::move(pair));
  }
  return out;
}

KrylovExpStats krylov_expm_apply(const LinearMap& op, double theta, std::span<Complex> v,
                                 const KrylovExpOptions& options) {
  KrylovExpStats stats;
  if (theta == 0.0) return stats;
  const std::size_t dim = v.size();
  const double direction = theta > 0.0 ? 1.0 : -1.0;
  double remaining = std::abs(theta);
  double h_try = remaining;
  const int max_dim = std::max(2, options.max_dim);

  std::vector<Vec> basis(max_dim + 1, Vec(dim));
  Vec w(dim);
  std::vector<double> alphas, betas;

  // Coefficients c = exp(-i h T) e1 in the Krylov basis.
  auto coefficients = [&](const Tridiagonal& t, double h) {
    const auto m = t.values.size();
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(m);
    for (Eigen::Index l = 0; l < m; ++l) {
      const Complex phase = std::exp(Complex{0.0, -direction * h * t.values(l)});
      c += (phase * t.vectors(0, l)) * t.vectors.col(l).cast<Complex>();
    }
    return c;
  };

  while (remaining > 0.0) {
    const double beta0 = norm(v);
    if (beta0 == 0.0) return stats;
    for (std::size_t i = 0; i < dim; ++i) basis[0][i] = v[i] / beta0;
    alphas.clear();
    betas.clear();

    const double h_requested = std::min(h_try, remaining);
    double h = h_requested;
    Eigen::VectorXcd c;
    int m = 0;
    for (int j = 0; j < max_dim; ++j) {
      op(basis[j], w);
      ++stats.matvecs;
      const double a = dot(basis[j], w).real();
      axpy(-a, basis[j], w);
      if (j > 0) axpy(-betas[j - 1], basis[j - 1], w);
      const double b = norm(w);
      alphas.push_back(a);
      m = j + 1;

      const Tridiagonal t = diagonalize(alphas, betas, m);
      const double scale_h = std::abs(a) + (j > 0 ? betas[j - 1] : 0.0) + b;
      if (b <= 1e-14 * std::max(scale_h, 1e-300)) {
        // Invariant subspace: the Krylov result is exact for any step.
        h = remaining;
        c = coefficients(t, h);
        break;
      }
      c = coefficients(t, h);
      double err = beta0 * b * std::abs(c(m - 1));
      if (err <= options.tolerance) break;
      if (m == max_dim) {
        while (err > options.tolerance) {
          h *= 0.5;
          if (options.min_substep > 0.0 && h < options.min_substep) {
            std::ostringstream msg;
            msg << "Krylov substep " << h << " fell below the minimum " << options.min_substep;
            throw Error(ErrorKind::step_underflow, msg.str());
          }
          c = coefficients(t, h);
          err = beta0 * b * std::abs(c(m - 1));
        }
        break;
      }
      betas.push_back(b);
      for (std::size_t i = 0; i < dim; ++i) basis[j + 1][i] = w[i] / b;
    }

    std::fill(v.begin(), v.end(), Complex{});
    for (int l = 0; l < m; ++l) axpy(beta0 * c(l), basis[l], v);
    remaining -= h;
    if (remaining < 1e-15 * std::abs(theta)) remaining = 0.0;
    ++stats.substeps;
    h_try = h < h_requested ? h : std::max(h_try, 1.25 * h);
  }
  return stats;
}

}  // namespace tfim
