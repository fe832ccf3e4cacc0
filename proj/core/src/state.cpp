#include "tfim/state.hpp"

#include <bit>
#include <cmath>

#include "tfim/error.hpp"

namespace tfim {
namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr Complex kI{0.0, 1.0};

void check_dim(std::size_t size, int n_spins) {
  if (n_spins < 1 || n_spins > 30 || size != (std::size_t{1} << n_spins))
    throw Error(ErrorKind::dimension_mismatch, "amplitude buffer does not match 2^n");
}

// Rows index the rotated (measurement) bit, columns the z bit.
// x: |up_x> = (|1> + |0>)/sqrt2, |down_x> = (|1> - |0>)/sqrt2.
constexpr Complex kToX[2][2] = {{-kInvSqrt2, kInvSqrt2}, {kInvSqrt2, kInvSqrt2}};
// y: |up_y> = (|1> + i|0>)/sqrt2, |down_y> = (|1> - i|0>)/sqrt2; rows are
// conjugated eigenvectors.
constexpr Complex kToY[2][2] = {{Complex{0, kInvSqrt2}, kInvSqrt2},
                                {Complex{0, -kInvSqrt2}, kInvSqrt2}};
constexpr Complex kFromY[2][2] = {{Complex{0, -kInvSqrt2}, Complex{0, kInvSqrt2}},
                                  {kInvSqrt2, kInvSqrt2}};

}  // namespace

StateVector::StateVector(int n_spins)
    : n_spins_(n_spins), amplitudes_(std::size_t{1} << n_spins) {
  if (n_spins < 1 || n_spins > 30) throw Error(ErrorKind::invalid_argument, "n_spins out of range");
}

StateVector::StateVector(int n_spins, std::vector<Complex> amplitudes)
    : n_spins_(n_spins), amplitudes_(std::move(amplitudes)) {
  check_dim(amplitudes_.size(), n_spins);
}

double StateVector::norm() const {
  double s = 0.0;
  for (const auto& a : amplitudes_) s += std::norm(a);
  return std::sqrt(s);
}

void StateVector::normalize() {
  const double nrm = norm();
  if (!(nrm > 0.0)) throw Error(ErrorKind::invalid_argument, "cannot normalize a zero state");
  for (auto& a : amplitudes_) a /= nrm;
}

std::vector<double> StateVector::probabilities() const {
  std::vector<double> p(amplitudes_.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::norm(amplitudes_[i]);
  return p;
}

StateVector StateVector::basis_state(int n_spins, std::uint64_t index) {
  StateVector s(n_spins);
  if (index >= s.dim()) throw Error(ErrorKind::invalid_argument, "basis index out of range");
  s[index] = 1.0;
  return s;
}

Complex inner_product(const StateVector& a, const StateVector& b) {
  if (a.dim() != b.dim()) throw Error(ErrorKind::dimension_mismatch, "state dimensions differ");
  Complex s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

double fidelity(const StateVector& a, const StateVector& b) {
  return std::norm(inner_product(a, b));
}

StateVector prepare_initial_state(int n_spins, Direction direction) {
  StateVector s(n_spins);
  // Single spin: amplitude[1] = 1/sqrt2, amplitude[0] = +-i/sqrt2.
  const Complex down = direction == Direction::plus_y ? Complex{0, kInvSqrt2}
                                                      : Complex{0, -kInvSqrt2};
  const Complex up = kInvSqrt2;
  for (std::uint64_t idx = 0; idx < s.dim(); ++idx) {
    const int ones = std::popcount(idx);
    s[idx] = std::pow(up, ones) * std::pow(down, n_spins - ones);
  }
  return s;
}

void apply_uniform_single_spin_gate(std::span<Complex> a, int n_spins,
                                    const Complex (&gate)[2][2]) {
  check_dim(a.size(), n_spins);
  for (int bit = 0; bit < n_spins; ++bit) {
    const std::size_t stride = std::size_t{1} << bit;
    for (std::size_t base = 0; base < a.size(); base += 2 * stride) {
      for (std::size_t off = 0; off < stride; ++off) {
        const std::size_t i0 = base + off;
        const std::size_t i1 = i0 + stride;
        const Complex v0 = a[i0];
        const Complex v1 = a[i1];
        a[i0] = gate[0][0] * v0 + gate[0][1] * v1;
        a[i1] = gate[1][0] * v0 + gate[1][1] * v1;
      }
    }
  }
}

StateVector rotate_measurement_basis(const StateVector& state, Axis axis) {
  StateVector out = state;
  if (axis == Axis::x) apply_uniform_single_spin_gate(out.amplitudes(), out.n_spins(), kToX);
  if (axis == Axis::y) apply_uniform_single_spin_gate(out.amplitudes(), out.n_spins(), kToY);
  return out;
}

StateVector unrotate_measurement_basis(const StateVector& state, Axis axis) {
  StateVector out = state;
  // The x map is real symmetric and squares to one.
  if (axis == Axis::x) apply_uniform_single_spin_gate(out.amplitudes(), out.n_spins(), kToX);
  if (axis == Axis::y) apply_uniform_single_spin_gate(out.amplitudes(), out.n_spins(), kFromY);
  return out;
}

void apply_sigma_y_sum(std::span<const Complex> in, std::span<Complex> out, int n_spins) {
  check_dim(in.size(), n_spins);
  check_dim(out.size(), n_spins);
  // sigma_y |1> = i |0>, sigma_y |0> = -i |1>; so (sigma_y psi)[t] carries
  // -i when bit t_k is set and +i otherwise.
  for (std::size_t t = 0; t < in.size(); ++t) {
    Complex acc = 0.0;
    for (int k = 0; k < n_spins; ++k) {
      const std::size_t mask = std::size_t{1} << k;
      const Complex v = in[t ^ mask];
      acc += (t & mask) ? Complex{v.imag(), -v.real()} : Complex{-v.imag(), v.real()};
    }
    out[t] = acc;
  }
}

void apply_global_y_flip(std::span<Complex> a, int n_spins) {
  check_dim(a.size(), n_spins);
  // i sigma_y |1> = -|0> and i sigma_y |0> = |1>, so source index s lands on
  // its complement with sign (-1)^popcount(s).
  const std::size_t all = a.size() - 1;
  for (std::size_t s = 0; s < a.size(); ++s) {
    const std::size_t t = s ^ all;
    if (t < s) continue;
    const double fs = (std::popcount(s) & 1) ? -1.0 : 1.0;
    const double ft = (std::popcount(t) & 1) ? -1.0 : 1.0;
    const Complex vs = a[s];
    a[s] = ft * a[t];
    a[t] = fs * vs;
  }
}

double total_sigma_y(const StateVector& state) {
  std::vector<Complex> tmp(state.dim());
  apply_sigma_y_sum(state.amplitudes(), tmp, state.n_spins());
  Complex s = 0.0;
  for (std::size_t i = 0; i < tmp.size(); ++i) s += std::conj(state[i]) * tmp[i];
  return s.real();
}

Complex global_y_flip_expectation(const StateVector& state) {
  StateVector flipped = state;
  apply_global_y_flip(flipped.amplitudes(), flipped.n_spins());
  return inner_product(state, flipped);
}

}  // namespace tfim
