#include "tfim/hamiltonian.hpp"

#include <bit>
#include <cmath>
#include <sstream>

#include "tfim/error.hpp"

namespace tfim {

std::vector<double> classical_energies(const CouplingMatrix& couplings, int max_spins) {
  const int n = couplings.n();
  if (n < 1) throw Error(ErrorKind::invalid_argument, "empty coupling matrix");
  if (n > max_spins) {
    std::ostringstream msg;
    msg << "classical energy table for N=" << n << " exceeds the configured maximum of "
        << max_spins << " spins";
    throw Error(ErrorKind::resource_guard, msg.str());
  }
  const auto& j = couplings.values;
  const std::size_t dim = std::size_t{1} << n;
  std::vector<double> e(dim);

  // All spins down: every bond contributes +J.
  double e0 = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < a; ++b) e0 += j(a, b);
  e[0] = e0;

  // Raise the lowest set bit from down to up on top of an already known state.
  for (std::size_t s = 1; s < dim; ++s) {
    const int p = std::countr_zero(s);
    const std::size_t prev = s ^ (std::size_t{1} << p);
    const int ion = n - 1 - p;
    double field = 0.0;
    for (int other = 0; other < n; ++other) {
      if (other == ion) continue;
      field += j(ion, other) * spin_value(prev, other, n);
    }
    e[s] = e[prev] + 2.0 * field;
  }
  return e;
}

void IsingFrameOperator::apply(std::span<const Complex> in, std::span<Complex> out) const {
  const std::size_t dim = energies.size();
  if (in.size() != dim || out.size() != dim)
    throw Error(ErrorKind::dimension_mismatch, "state dimension does not match Hamiltonian");
  for (std::size_t t = 0; t < dim; ++t) out[t] = (diag_scale * energies[t]) * in[t];
  if (field_khz == 0.0) return;
  // In the x frame sigma_y|1> = -i|0>, sigma_y|0> = +i|1>.
  const Complex ib{0.0, field_khz};
  for (int bit = 0; bit < n_spins; ++bit) {
    const std::size_t stride = std::size_t{1} << bit;
    for (std::size_t base = 0; base < dim; base += 2 * stride) {
      for (std::size_t off = 0; off < stride; ++off) {
        const std::size_t i0 = base + off;
        const std::size_t i1 = i0 + stride;
        out[i1] -= ib * in[i0];
        out[i0] += ib * in[i1];
      }
    }
  }
}

IsingHamiltonian::IsingHamiltonian(const CouplingMatrix& couplings, double field_khz,
                                   CouplingSign sign)
    : n_(couplings.n()), field_(field_khz), sign_(sign) {
  if (n_ < 1) throw Error(ErrorKind::invalid_argument, "empty coupling matrix");
  if (n_ > 30) throw Error(ErrorKind::resource_guard, "too many spins for a state vector");
  couplings_ = std::make_shared<const CouplingMatrix>(couplings);

  auto energies = classical_energies(couplings, 30);
  if (sign == CouplingSign::ferromagnetic)
    for (auto& e : energies) e = -e;
  energies_ = std::make_shared<const std::vector<double>>(std::move(energies));

  std::vector<Bond> bonds;
  for (int a = 0; a < n_; ++a) {
    for (int b = 0; b < a; ++b) {
      const double jab = couplings.values(a, b);
      if (jab == 0.0) continue;
      bonds.push_back({(std::size_t{1} << bit_of_ion(a, n_)) | (std::size_t{1} << bit_of_ion(b, n_)),
                       coupling_sign() * jab});
    }
  }
  bonds_ = std::make_shared<const std::vector<Bond>>(std::move(bonds));
}

IsingHamiltonian IsingHamiltonian::with_field(double field_khz) const {
  IsingHamiltonian h = *this;
  h.field_ = field_khz;
  return h;
}

void IsingHamiltonian::apply(std::span<const Complex> in, std::span<Complex> out) const {
  const std::size_t d = dim();
  if (in.size() != d || out.size() != d)
    throw Error(ErrorKind::dimension_mismatch, "state dimension does not match Hamiltonian");
  for (std::size_t t = 0; t < d; ++t) {
    Complex acc = 0.0;
    for (const Bond& bond : *bonds_) acc += bond.j * in[t ^ bond.mask];
    out[t] = acc;
  }
  if (field_ == 0.0) return;
  // z basis: sigma_y|1> = i|0>, sigma_y|0> = -i|1>.
  const Complex ib{0.0, field_};
  for (int bit = 0; bit < n_; ++bit) {
    const std::size_t stride = std::size_t{1} << bit;
    for (std::size_t base = 0; base < d; base += 2 * stride) {
      for (std::size_t off = 0; off < stride; ++off) {
        const std::size_t i0 = base + off;
        const std::size_t i1 = i0 + stride;
        out[i1] += ib * in[i0];
        out[i0] -= ib * in[i1];
      }
    }
  }
}

StateVector IsingHamiltonian::apply(const StateVector& state) const {
  if (state.n_spins() != n_)
    throw Error(ErrorKind::dimension_mismatch, "state spin count does not match Hamiltonian");
  StateVector out(n_);
  apply(state.amplitudes(), out.amplitudes());
  return out;
}

IsingFrameOperator IsingHamiltonian::ising_frame_operator() const {
  return {*energies_, 1.0, field_, n_};
}

void IsingHamiltonian::apply_ising_frame(std::span<const Complex> in,
                                         std::span<Complex> out) const {
  ising_frame_operator().apply(in, out);
}

double IsingHamiltonian::norm_bound() const {
  double s = 0.0;
  for (const Bond& bond : *bonds_) s += std::abs(bond.j);
  return s + n_ * std::abs(field_);
}

double IsingHamiltonian::expectation(const StateVector& state) const {
  const StateVector h = apply(state);
  return inner_product(state, h).real();
}

}  // namespace tfim
