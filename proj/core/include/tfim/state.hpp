#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace tfim {

using Complex = std::complex<double>;

// Basis convention used everywhere in the library: the computational index of
// an N-spin configuration has ion 1 as its most significant bit, with
// |down> = 0 and |up> = 1. Pauli operators take their standard form with
// sigma_z |up> = +|up>.
enum class Axis { x, y, z };

/// Bit position (0 = least significant) that stores ion `ion` (0-based).
constexpr int bit_of_ion(int ion, int n_spins) { return n_spins - 1 - ion; }

/// +1 if ion `ion` (0-based) reads as up in `index`, -1 otherwise.
constexpr int spin_value(std::uint64_t index, int ion, int n_spins) {
  return ((index >> bit_of_ion(ion, n_spins)) & 1u) ? 1 : -1;
}

class StateVector {
 public:
  StateVector() = default;
  explicit StateVector(int n_spins);
  StateVector(int n_spins, std::vector<Complex> amplitudes);

  int n_spins() const { return n_spins_; }
  std::size_t dim() const { return amplitudes_.size(); }

  std::span<Complex> amplitudes() { return amplitudes_; }
  std::span<const Complex> amplitudes() const { return amplitudes_; }
  Complex& operator[](std::size_t i) { return amplitudes_[i]; }
  const Complex& operator[](std::size_t i) const { return amplitudes_[i]; }

  double norm() const;
  void normalize();
  std::vector<double> probabilities() const;

  static StateVector basis_state(int n_spins, std::uint64_t index);

 private:
  int n_spins_ = 0;
  std::vector<Complex> amplitudes_;
};

Complex inner_product(const StateVector& a, const StateVector& b);  // <a|b>
double fidelity(const StateVector& a, const StateVector& b);        // |<a|b>|^2

enum class Direction { plus_y, minus_y };

/// Product state with every spin in the +1 (plus_y) or -1 (minus_y)
/// eigenvector of sigma_y.
StateVector prepare_initial_state(int n_spins, Direction direction);

/// Rotates so that z-basis sampling of the result reads out the requested
/// axis: bit 1 means the spin was found along +axis. Axis::z is the identity.
StateVector rotate_measurement_basis(const StateVector& state, Axis axis);
/// Inverse of rotate_measurement_basis.
StateVector unrotate_measurement_basis(const StateVector& state, Axis axis);

// In-place kernels on raw amplitude buffers of length 2^n.
void apply_uniform_single_spin_gate(std::span<Complex> amplitudes, int n_spins,
                                    const Complex (&gate)[2][2]);
/// out = sum_i sigma_y^(i) in, with the z-basis convention.
void apply_sigma_y_sum(std::span<const Complex> in, std::span<Complex> out, int n_spins);
/// Global pi rotation about y: U = prod_i (i sigma_y^(i)), in place.
void apply_global_y_flip(std::span<Complex> amplitudes, int n_spins);

/// <sum_i sigma_y^(i)>.
double total_sigma_y(const StateVector& state);
/// <U> for the global pi rotation about y.
Complex global_y_flip_expectation(const StateVector& state);

}  // namespace tfim
