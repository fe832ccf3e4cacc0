#include "tfim/spectrum.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "parallel.hpp"
#include "tfim/error.hpp"

namespace tfim {
namespace {

Complex i_power(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

LinearMap frame_map(const IsingFrameOperator& op) {
  return [op](std::span<const Complex> in, std::span<Complex> out) { op.apply(in, out); };
}

Projector sector_projector(int n, FlipSector sector) {
  if (sector == FlipSector::all) return {};
  return [n, sector](std::span<Complex> v) { project_flip_sector_ising_frame(v, n, sector); };
}

struct FramePair {
  double energy;
  std::vector<Complex> vector;
  double residual;
};

std::vector<FramePair> frame_eigenpairs(const IsingHamiltonian& h, int k, FlipSector sector,
                                        const LanczosOptions& options) {
  const auto op = h.ising_frame_operator();
  auto pairs = lanczos_lowest(frame_map(op), h.dim(), k, std::max(h.norm_bound(), 1e-300),
                              options, sector_projector(h.n_spins(), sector));
  std::vector<FramePair> out;
  out.reserve(pairs.size());
  for (auto& p : pairs) out.push_back({p.value, std::move(p.vector), p.residual});
  return out;
}

}  // namespace

void project_flip_sector_ising_frame(std::span<Complex> amplitudes, int n_spins,
                                     FlipSector sector) {
  if (sector == FlipSector::all) return;
  const std::size_t dim = std::size_t{1} << n_spins;
  if (amplitudes.size() != dim)
    throw Error(ErrorKind::dimension_mismatch, "amplitude buffer does not match 2^n");
  // (P psi)[t] = i^(3N) (-1)^popcount(t) psi[~t] in the x frame.
  const Complex base = i_power(3 * n_spins);
  const double s = sector == FlipSector::even ? 1.0 : -1.0;
  const std::size_t all = dim - 1;
  for (std::size_t t = 0; t < dim; ++t) {
    const std::size_t u = t ^ all;
    if (u < t) continue;
    const Complex pt = std::popcount(t) % 2 ? -base : base;
    const Complex pu = std::popcount(u) % 2 ? -base : base;
    const Complex a = amplitudes[t];
    const Complex b = amplitudes[u];
    amplitudes[t] = 0.5 * (a + s * pt * b);
    amplitudes[u] = 0.5 * (b + s * pu * a);
  }
}

std::vector<EigenState> lowest_eigenpairs(const IsingHamiltonian& h, int k, FlipSector sector,
                                          LanczosOptions options) {
  if (k < 1 || static_cast<std::size_t>(k) > h.dim())
    throw Error(ErrorKind::invalid_argument, "k must lie in [1, 2^n]");
  auto pairs = frame_eigenpairs(h, k, sector, options);
  std::vector<EigenState> out;
  out.reserve(pairs.size());
  for (auto& p : pairs) {
    StateVector frame(h.n_spins(), std::move(p.vector));
    out.push_back({p.energy, unrotate_measurement_basis(frame, Axis::x), p.residual});
  }
  return out;
}

GapPoint coupled_gap(const IsingHamiltonian& h, double j0_khz, const GapOptions& options) {
  if (!(j0_khz > 0.0)) throw Error(ErrorKind::invalid_argument, "J0 must be positive");
  if (options.initial_states < 2)
    throw Error(ErrorKind::invalid_argument, "coupled gap needs at least 2 initial states");
  LanczosOptions lanczos;
  lanczos.relative_tolerance = options.eigen_tolerance;
  lanczos.seed = options.seed;

  const int n = h.n_spins();
  const std::size_t sector_dim = std::max<std::size_t>(h.dim() / 2, 1);
  const IsingFrameOperator y_sum{h.ising_energies(), 0.0, -1.0, n};
  const double tol = options.degeneracy_tolerance * j0_khz;

  int k = static_cast<int>(std::min<std::size_t>(options.initial_states, sector_dim));
  for (;;) {
    const auto pairs = frame_eigenpairs(h, k, FlipSector::even, lanczos);
    const bool complete = pairs.size() >= sector_dim;
    const double e0 = pairs.front().energy;

    std::size_t ground_end = 1;
    while (ground_end < pairs.size() && pairs[ground_end].energy - e0 <= tol) ++ground_end;

    std::vector<std::vector<Complex>> images;
    for (std::size_t g = 0; g < ground_end; ++g) {
      std::vector<Complex> yg(h.dim());
      y_sum.apply(pairs[g].vector, yg);
      images.push_back(std::move(yg));
    }

    std::ostringstream candidates;
    bool truncated = ground_end == pairs.size() && !complete;
    std::size_t start = ground_end;
    while (!truncated && start < pairs.size()) {
      std::size_t end = start + 1;
      while (end < pairs.size() && pairs[end].energy - pairs[start].energy <= tol) ++end;
      if (end == pairs.size() && !complete) {
        truncated = true;
        break;
      }
      double element_sq = 0.0;
      for (std::size_t e = start; e < end; ++e) {
        for (const auto& yg : images) {
          Complex dot = 0.0;
          for (std::size_t t = 0; t < yg.size(); ++t) dot += std::conj(pairs[e].vector[t]) * yg[t];
          element_sq += std::norm(dot);
        }
      }
      const double element = std::sqrt(element_sq);
      if (element > options.coupling_threshold) {
        GapPoint point;
        point.field_khz = h.field_khz();
        point.ground_energy = e0;
        point.excited_energy = pairs[start].energy;
        point.gap_khz = std::max(pairs[start].energy - e0, 0.0);
        point.matrix_element = element;
        point.states_examined = static_cast<int>(pairs.size());
        return point;
      }
      candidates << " E=" << pairs[start].energy << " (x" << (end - start) << ", |<e|Y|g>|=" << element
                 << ")";
      start = end;
    }

    if (complete && !truncated) {
      std::ostringstream msg;
      msg << "no excited state couples to the ground branch at B=" << h.field_khz()
          << " kHz; candidates:" << candidates.str();
      throw Error(ErrorKind::ambiguous_coupling, msg.str());
    }
    k = static_cast<int>(std::min<std::size_t>(2 * static_cast<std::size_t>(k), sector_dim));
  }
}

std::vector<double> default_b_grid(int points, double lo, double hi) {
  if (points < 2 || !(lo > 0.0) || !(hi > lo))
    throw Error(ErrorKind::invalid_argument, "grid needs >= 2 points and 0 < lo < hi");
  std::vector<double> grid(points);
  const double step = std::log(hi / lo) / (points - 1);
  for (int i = 0; i < points; ++i) grid[i] = lo * std::exp(step * i);
  grid.back() = hi;
  return grid;
}

SpectrumScan critical_gap_scan(const CouplingMatrix& couplings, const std::vector<double>& b_grid,
                               const GapOptions& options) {
  if (b_grid.size() < 50)
    throw Error(ErrorKind::invalid_argument, "field grid needs at least 50 points");
  const auto [lo, hi] = std::minmax_element(b_grid.begin(), b_grid.end());
  if (*lo > 0.01 * (1 + 1e-12) || *hi < 5.0 * (1 - 1e-12) || *lo < 0.0)
    throw Error(ErrorKind::invalid_argument, "field grid must span [0.01, 5] J0");
  const double j0 = couplings.mean_nearest_neighbor;
  if (!(j0 > 0.0))
    throw Error(ErrorKind::invalid_argument, "mean nearest-neighbour coupling must be positive");

  SpectrumScan scan;
  scan.n_spins = couplings.n();
  scan.j0_khz = j0;
  scan.alpha = couplings.fitted_alpha;
  scan.b_grid = b_grid;
  scan.gaps.assign(b_grid.size(), 0.0);

  const IsingHamiltonian base(couplings, 0.0, options.sign);
  detail::parallel_for(b_grid.size(), options.workers, [&](std::size_t i) {
    GapOptions local = options;
    local.seed = options.seed + 0x9e3779b97f4a7c15ULL * (i + 1);
    scan.gaps[i] = coupled_gap(base.with_field(b_grid[i] * j0), j0, local).gap_khz / j0;
  });

  const auto best = std::min_element(scan.gaps.begin(), scan.gaps.end());
  scan.critical_gap = *best;
  scan.critical_field = b_grid[static_cast<std::size_t>(best - scan.gaps.begin())];
  return scan;
}

void write_scan_csv(std::ostream& out, const SpectrumScan& scan) {
  const auto old = out.precision(17);
  out << "b_over_j0,gap_over_j0\n";
  for (std::size_t i = 0; i < scan.b_grid.size(); ++i)
    out << scan.b_grid[i] << ',' << scan.gaps[i] << '\n';
  out.precision(old);
}

std::string scan_summary_json(const SpectrumScan& scan) {
  nlohmann::json j;
  j["N"] = scan.n_spins;
  j["alpha"] = scan.alpha;
  j["J0_khz"] = scan.j0_khz;
  j["B_c"] = scan.critical_field;
  j["Delta_c"] = scan.critical_gap;
  return j.dump(2);
}

}  // namespace tfim
