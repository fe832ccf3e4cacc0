#pragma once

// Reference implementations used only by the tests. They trade speed for
// directness: dense matrices, brute-force loops and textbook algorithms that
// share no code with the library.

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using cd = std::complex<double>;
using Dense = Eigen::MatrixXcd;

inline Dense pauli(char which) {
  Dense m(2, 2);
  // Rows/columns ordered (|0> = down, |1> = up), sigma_z |up> = +|up>.
  switch (which) {
    case 'x': m << 0, 1, 1, 0; break;
    case 'y': m << 0, cd(0, 1), cd(0, -1), 0; break;
    case 'z': m << -1, 0, 0, 1; break;
    default: m = Dense::Identity(2, 2);
  }
  return m;
}

inline Dense kron(const Dense& a, const Dense& b) {
  Dense out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Operator acting as `op` on `ion` (ion 0 is the leftmost factor, i.e. the
// most significant bit) and identity elsewhere.
inline Dense site(char op, int ion, int n) {
  Dense out = Dense::Identity(1, 1);
  for (int k = 0; k < n; ++k) out = kron(out, k == ion ? pauli(op) : pauli('1'));
  return out;
}

inline Dense hamiltonian(const Eigen::MatrixXd& j, double field, double sign = 1.0) {
  const int n = static_cast<int>(j.rows());
  const Eigen::Index dim = Eigen::Index{1} << n;
  Dense h = Dense::Zero(dim, dim);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < a; ++b) h += sign * j(a, b) * site('x', a, n) * site('x', b, n);
  for (int a = 0; a < n; ++a) h -= field * site('y', a, n);
  return h;
}

inline Dense total_y(int n) {
  const Eigen::Index dim = Eigen::Index{1} << n;
  Dense s = Dense::Zero(dim, dim);
  for (int a = 0; a < n; ++a) s += site('y', a, n);
  return s;
}

inline Dense parity_y(int n) {
  Dense p = Dense::Identity(Eigen::Index{1} << n, Eigen::Index{1} << n);
  for (int a = 0; a < n; ++a) p = p * site('y', a, n);
  return p;
}

// Gap from the ground state of the P = +1 sector to the lowest level that
// sum sigma_y connects to it; degenerate levels are grouped with `tol`.
inline double coupled_gap(const Eigen::MatrixXd& j, double field, double tol = 1e-9) {
  const int n = static_cast<int>(j.rows());
  const Dense h = hamiltonian(j, field);
  const Dense p = parity_y(n);
  const Eigen::Index dim = h.rows();
  // Orthonormal basis of the even sector from the projector's columns.
  const Dense proj = 0.5 * (Dense::Identity(dim, dim) + p);
  Eigen::ComplexEigenSolver<Dense> pe(proj);
  std::vector<Eigen::VectorXcd> basis;
  for (Eigen::Index c = 0; c < dim; ++c)
    if (std::abs(pe.eigenvalues()(c) - 1.0) < 1e-8) basis.push_back(pe.eigenvectors().col(c));
  Dense q(dim, static_cast<Eigen::Index>(basis.size()));
  for (std::size_t c = 0; c < basis.size(); ++c) q.col(c) = basis[c];
  Eigen::HouseholderQR<Dense> qr(q);
  q = qr.householderQ() * Dense::Identity(dim, q.cols());

  Eigen::SelfAdjointEigenSolver<Dense> es(q.adjoint() * h * q);
  const auto& e = es.eigenvalues();
  const Dense v = q * es.eigenvectors();
  const Dense y = total_y(n);
  std::size_t g_end = 1;
  while (g_end < static_cast<std::size_t>(e.size()) && e(g_end) - e(0) <= tol) ++g_end;
  for (Eigen::Index s = g_end; s < e.size();) {
    Eigen::Index t = s + 1;
    while (t < e.size() && e(t) - e(s) <= tol) ++t;
    double m2 = 0.0;
    for (Eigen::Index a = s; a < t; ++a)
      for (std::size_t g = 0; g < g_end; ++g) m2 += std::norm(v.col(a).dot(y * v.col(g)));
    if (std::sqrt(m2) > 1e-8) return e(s) - e(0);
    s = t;
  }
  return -1.0;
}

// Plain gradient descent on the dimensionless trap potential.
inline std::vector<double> gradient_descent_positions(int n, int iterations = 400000) {
  std::vector<double> u(n);
  for (int i = 0; i < n; ++i) u[i] = (i - 0.5 * (n - 1)) * 1.0;
  std::vector<double> g(n);
  double step = 0.01;
  for (int it = 0; it < iterations; ++it) {
    double gn = 0.0;
    for (int i = 0; i < n; ++i) {
      g[i] = u[i];
      for (int k = 0; k < n; ++k) {
        if (k == i) continue;
        const double d = u[i] - u[k];
        g[i] -= (d > 0 ? 1.0 : -1.0) / (d * d);
      }
      gn += g[i] * g[i];
    }
    if (std::sqrt(gn) < 1e-13) break;
    for (int i = 0; i < n; ++i) u[i] -= step * g[i];
  }
  return u;
}

// Cyclic Jacobi rotations for a real symmetric matrix; eigenvalues ascending.
inline std::pair<Eigen::VectorXd, Eigen::MatrixXd> jacobi_eigen(Eigen::MatrixXd a) {
  const Eigen::Index n = a.rows();
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-30) break;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        const double theta = 0.5 * (a(q, q) - a(p, p)) / a(p, q);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  Eigen::VectorXd w = a.diagonal();
  std::vector<Eigen::Index> order(n);
  for (Eigen::Index i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto x, auto y) { return w(x) < w(y); });
  Eigen::VectorXd ws(n);
  Eigen::MatrixXd vs(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    ws(i) = w(order[i]);
    vs.col(i) = v.col(order[i]);
  }
  return {ws, vs};
}

// Transverse mode frequencies (kHz, descending) via the Jacobi solver.
inline std::vector<double> transverse_frequencies(const std::vector<double>& u, double axial_khz,
                                                  double com_khz) {
  const int n = static_cast<int>(u.size());
  const double beta2 = (com_khz / axial_khz) * (com_khz / axial_khz);
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    k(i, i) = beta2;
    for (int m = 0; m < n; ++m) {
      if (m == i) continue;
      const double d3 = std::pow(std::abs(u[i] - u[m]), 3);
      k(i, i) -= 1.0 / d3;
      k(i, m) = 1.0 / d3;
    }
  }
  auto [w, v] = jacobi_eigen(k);
  std::vector<double> f;
  for (Eigen::Index i = n - 1; i >= 0; --i) f.push_back(axial_khz * std::sqrt(w(i)));
  return f;
}

// Mode sum evaluated pair by pair, modes in reverse order, in long double.
inline Eigen::MatrixXd coupling_sum(const Eigen::MatrixXd& b, const std::vector<double>& nu_khz,
                                    double rabi_khz, double recoil_khz, double mu_khz) {
  const Eigen::Index n = b.rows();
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index k = 0; k < n; ++k) {
      if (i == k) continue;
      long double s = 0.0L;
      for (Eigen::Index m = n - 1; m >= 0; --m)
        s += static_cast<long double>(b(i, m)) * b(k, m) /
             (static_cast<long double>(mu_khz) * mu_khz - static_cast<long double>(nu_khz[m]) * nu_khz[m]);
      j(i, k) = static_cast<double>(static_cast<long double>(rabi_khz) * rabi_khz * recoil_khz * s);
    }
  return j;
}

inline Eigen::MatrixXd confusion_matrix(int n, double eps) {
  const Eigen::Index dim = Eigen::Index{1} << n;
  Eigen::MatrixXd m(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) {
      int beta = 0;
      for (int b = 0; b < n; ++b) beta += ((i >> b) & 1) != ((j >> b) & 1);
      m(i, j) = std::pow(1.0 - eps, beta) * std::pow(eps, n - beta);
    }
  return m;
}

// Exact Binder moments of the staggered magnetization under the uniform
// distribution, by enumerating all strings.
inline double uniform_binder_raw(int n) {
  double m2 = 0.0, m4 = 0.0;
  const std::uint64_t dim = std::uint64_t{1} << n;
  for (std::uint64_t s = 0; s < dim; ++s) {
    int sum = 0;
    for (int ion = 0; ion < n; ++ion) {
      const int x = ((s >> (n - 1 - ion)) & 1) ? 1 : -1;
      sum += (ion % 2 ? 1 : -1) * x;
    }
    const double m = std::abs(sum) / static_cast<double>(n);
    m2 += m * m;
    m4 += m * m * m * m;
  }
  m2 /= dim;
  m4 /= dim;
  return 1.5 - m4 / (2 * m2 * m2);
}

inline double classical_energy(const Eigen::MatrixXd& j, std::uint64_t s) {
  const int n = static_cast<int>(j.rows());
  double e = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      const int xa = ((s >> (n - 1 - a)) & 1) ? 1 : -1;
      const int xb = ((s >> (n - 1 - b)) & 1) ? 1 : -1;
      e += j(a, b) * xa * xb;
    }
  return e;
}

}  // namespace oracle
