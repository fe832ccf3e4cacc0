#include "tfim/observables.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <iomanip>
#include <complex>
#include <numbers>
#include <numeric>
#include <ostream>

#include "tfim/error.hpp"
#include "tfim/hamiltonian.hpp"

namespace tfim {
namespace {

struct Weights {
  int n = 0;
  std::vector<std::pair<std::uint64_t, double>> entries;
  double shots = 0.0;  // 0 for exact distributions
};

void require_basis(Axis actual, Axis expected, const char* what) {
  if (actual != expected) {
    std::string msg = std::string(what) + " needs " + axis_name(expected) + "-basis data, got " +
                      axis_name(actual);
    throw Error(ErrorKind::invalid_argument, msg);
  }
}

Weights view(const SampleSet& s, Axis expected, const char* what) {
  require_basis(s.basis, expected, what);
  s.validate();
  if (s.total_shots == 0) throw Error(ErrorKind::invalid_argument, std::string(what) + ": no shots");
  Weights w;
  w.n = s.n_spins;
  w.shots = static_cast<double>(s.total_shots);
  for (const auto& [index, count] : s.counts)
    if (count > 0) w.entries.emplace_back(index, count / w.shots);
  return w;
}

Weights view(const ProbabilityDistribution& d, Axis expected, const char* what) {
  require_basis(d.basis, expected, what);
  if (d.n_spins < 1 || d.values.size() != (std::size_t{1} << d.n_spins))
    throw Error(ErrorKind::dimension_mismatch, "distribution length does not match 2^n");
  Weights w;
  w.n = d.n_spins;
  for (std::size_t i = 0; i < d.values.size(); ++i)
    if (d.values[i] != 0.0) w.entries.emplace_back(i, d.values[i]);
  return w;
}

double staggered_sum(std::uint64_t bits, int n) {
  double s = 0.0;
  for (int ion = 0; ion < n; ++ion) s += (ion % 2 == 0 ? -1.0 : 1.0) * spin_value(bits, ion, n);
  return s;
}

double plain_sum(std::uint64_t bits, int n) { return 2.0 * std::popcount(bits) - n; }

template <class Signed>
MagnetizationSummary summarize(const Weights& w, Signed&& sign_of_ion) {
  MagnetizationSummary m;
  std::vector<double> means(w.n, 0.0);
  for (const auto& [bits, p] : w.entries) {
    double s = 0.0;
    for (int ion = 0; ion < w.n; ++ion) {
      const double x = spin_value(bits, ion, w.n);
      s += sign_of_ion(ion) * x;
      means[ion] += p * x;
    }
    const double v = std::abs(s) / w.n;
    m.per_shot_mean += p * v;
    m.second_moment += p * v * v;
    m.fourth_moment += p * v * v * v * v;
  }
  double total = 0.0;
  for (int ion = 0; ion < w.n; ++ion) total += sign_of_ion(ion) * means[ion];
  m.of_expectations = std::abs(total) / w.n;
  if (w.shots > 1.0) {
    const double var = std::max(m.second_moment - m.per_shot_mean * m.per_shot_mean, 0.0);
    m.per_shot_stderr = std::sqrt(var / (w.shots - 1.0));
  }
  return m;
}

double staggered_sign(int ion) { return ion % 2 == 0 ? -1.0 : 1.0; }
double unit_sign(int) { return 1.0; }

BinderCumulant binder_from_moments(double m2, double m4, int n) {
  if (!(m2 > 0.0))
    throw Error(ErrorKind::invalid_argument, "Binder cumulant undefined: second moment is zero");
  BinderCumulant b;
  b.raw = 1.5 - m4 / (2.0 * m2 * m2);
  const double g0 = uniform_binder_reference(n);
  b.scaled = (b.raw - g0) / (1.0 - g0);
  return b;
}

CorrelationProfile correlations_from(const Weights& w) {
  const int n = w.n;
  CorrelationProfile c;
  Eigen::MatrixXd second = Eigen::MatrixXd::Zero(n, n);
  c.means.assign(n, 0.0);
  std::vector<double> q1(n > 1 ? n - 1 : 0, 0.0);
  std::vector<double> q2(q1.size(), 0.0);
  std::vector<double> x(n);
  for (const auto& [bits, p] : w.entries) {
    for (int i = 0; i < n; ++i) x[i] = spin_value(bits, i, n);
    for (int i = 0; i < n; ++i) {
      c.means[i] += p * x[i];
      for (int j = i; j < n; ++j) second(i, j) += p * x[i] * x[j];
    }
    for (int r = 1; r < n; ++r) {
      double q = 0.0;
      for (int m = 0; m + r < n; ++m) q += x[m] * x[m + r];
      q /= (n - r);
      q1[r - 1] += p * q;
      q2[r - 1] += p * q * q;
    }
  }
  c.pair_matrix.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const double v = second(i, j) - c.means[i] * c.means[j];
      c.pair_matrix(i, j) = c.pair_matrix(j, i) = v;
    }
  for (int r = 1; r < n; ++r) {
    double s = 0.0;
    for (int m = 0; m + r < n; ++m) s += c.pair_matrix(m, m + r);
    c.averaged.push_back(s / (n - r));
    c.reference_row.push_back(c.pair_matrix(0, r));
    if (w.shots > 1.0)
      c.averaged_stderr.push_back(
          std::sqrt(std::max(q2[r - 1] - q1[r - 1] * q1[r - 1], 0.0) / (w.shots - 1.0)));
  }
  if (!c.averaged.empty() && c.averaged.front() != 0.0) {
    const double cut = std::abs(c.averaged.front()) / std::exp(1.0);
    for (std::size_t r = 1; r <= c.averaged.size(); ++r)
      if (std::abs(c.averaged[r - 1]) < cut) {
        c.correlation_length = static_cast<int>(r);
        break;
      }
  }
  return c;
}

EnergyDistribution energies_from(const Weights& w, const CouplingMatrix& couplings,
                                 std::span<const double> string_probabilities) {
  if (couplings.n() != w.n)
    throw Error(ErrorKind::dimension_mismatch, "coupling matrix size does not match the samples");
  const auto table = classical_energies(couplings);
  double scale = 1.0;
  for (double e : table) scale = std::max(scale, std::abs(e));
  const double tol = 1e-9 * scale;

  std::vector<std::size_t> order(table.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return table[a] < table[b]; });
  std::vector<std::size_t> level_of(table.size());
  EnergyDistribution ed;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const double e = table[order[k]];
    if (ed.energies.empty() || e - ed.energies.back() > tol) ed.energies.push_back(e);
    level_of[order[k]] = ed.energies.size() - 1;
  }
  ed.probabilities.assign(ed.energies.size(), 0.0);
  for (const auto& [bits, p] : w.entries) ed.probabilities[level_of[bits]] += p;
  double acc = 0.0;
  for (double p : ed.probabilities) ed.cumulative.push_back(acc += p);
  ed.entropy_per_particle = entropy_per_particle(string_probabilities, w.n);
  return ed;
}

MagnetizationHistogram histogram_from(const Weights& w) {
  MagnetizationHistogram h;
  for (int k = 0; k <= w.n; ++k) h.values.push_back(2 * k - w.n);
  h.probabilities.assign(w.n + 1, 0.0);
  double mean = 0.0;
  for (const auto& [bits, p] : w.entries) {
    const int ones = std::popcount(bits);
    h.probabilities[ones] += p;
    mean += p * (2 * ones - w.n);
  }
  h.mean_fraction = mean / w.n;
  return h;
}

}  // namespace

double staggered_magnetization(std::uint64_t bitstring, int n_spins) {
  if (n_spins < 1) throw Error(ErrorKind::invalid_argument, "need at least one spin");
  return std::abs(staggered_sum(bitstring, n_spins)) / n_spins;
}

double uniform_magnetization(std::uint64_t bitstring, int n_spins) {
  if (n_spins < 1) throw Error(ErrorKind::invalid_argument, "need at least one spin");
  return std::abs(plain_sum(bitstring, n_spins)) / n_spins;
}

MagnetizationSummary staggered_magnetization(const SampleSet& samples) {
  return summarize(view(samples, Axis::x, "staggered magnetization"), staggered_sign);
}
MagnetizationSummary staggered_magnetization(const ProbabilityDistribution& dist) {
  return summarize(view(dist, Axis::x, "staggered magnetization"), staggered_sign);
}
MagnetizationSummary uniform_magnetization(const SampleSet& samples) {
  return summarize(view(samples, Axis::x, "magnetization"), unit_sign);
}
MagnetizationSummary uniform_magnetization(const ProbabilityDistribution& dist) {
  return summarize(view(dist, Axis::x, "magnetization"), unit_sign);
}

double uniform_binder_reference(int n_spins) {
  if (n_spins < 1) throw Error(ErrorKind::invalid_argument, "need at least one spin");
  double m2 = 0.0, m4 = 0.0;
  for (int k = 0; k <= n_spins; ++k) {
    const double log_weight = std::lgamma(n_spins + 1.0) - std::lgamma(k + 1.0) -
                              std::lgamma(n_spins - k + 1.0) - n_spins * std::log(2.0);
    const double w = std::exp(log_weight);
    const double m = static_cast<double>(2 * k - n_spins) / n_spins;
    m2 += w * m * m;
    m4 += w * m * m * m * m;
  }
  return 1.5 - m4 / (2.0 * m2 * m2);
}

BinderCumulant binder_cumulant(std::span<const double> per_shot, int n_spins) {
  if (per_shot.size() < 2) throw Error(ErrorKind::invalid_argument, "Binder cumulant needs at least 2 shots");
  double m2 = 0.0, m4 = 0.0;
  for (double m : per_shot) {
    m2 += m * m;
    m4 += m * m * m * m;
  }
  m2 /= per_shot.size();
  m4 /= per_shot.size();
  return binder_from_moments(m2, m4, n_spins);
}

BinderCumulant binder_cumulant(const SampleSet& samples) {
  if (samples.total_shots < 2) throw Error(ErrorKind::invalid_argument, "Binder cumulant needs at least 2 shots");
  const auto m = staggered_magnetization(samples);
  return binder_from_moments(m.second_moment, m.fourth_moment, samples.n_spins);
}

BinderCumulant binder_cumulant(const ProbabilityDistribution& dist) {
  const auto m = staggered_magnetization(dist);
  return binder_from_moments(m.second_moment, m.fourth_moment, dist.n_spins);
}

CorrelationProfile correlations(const SampleSet& samples) {
  return correlations_from(view(samples, Axis::x, "correlations"));
}
CorrelationProfile correlations(const ProbabilityDistribution& dist) {
  return correlations_from(view(dist, Axis::x, "correlations"));
}

StructureFunction structure_function(const CorrelationProfile& profile) {
  const int n = static_cast<int>(profile.averaged.size()) + 1;
  if (n < 2) throw Error(ErrorKind::invalid_argument, "structure function needs at least 2 spins");
  StructureFunction sf;
  for (int m = 1; m <= n; ++m) {
    const double k = m * std::numbers::pi / n;
    std::complex<double> acc = 0.0;
    for (int r = 1; r < n; ++r) acc += profile.averaged[r - 1] * std::polar(1.0, k * r);
    sf.k_values.push_back(k);
    sf.s_values.push_back(std::abs(acc) / (n - 1));
  }
  return sf;
}

double staggered_moment_s_pi(const ProbabilityDistribution& dist) {
  const Weights w = view(dist, Axis::x, "staggered moment");
  if (w.n < 2) throw Error(ErrorKind::invalid_argument, "need at least 2 spins");
  std::vector<double> means(w.n, 0.0);
  double m1 = 0.0, m2 = 0.0;
  for (const auto& [bits, p] : w.entries) {
    const double s = staggered_sum(bits, w.n);
    m1 += p * s;
    m2 += p * s * s;
    for (int ion = 0; ion < w.n; ++ion) means[ion] += p * spin_value(bits, ion, w.n);
  }
  double local = 0.0;
  for (double m : means) local += 1.0 - m * m;
  return std::abs(m2 - m1 * m1 - local) / (static_cast<double>(w.n) * (w.n - 1));
}

double entropy_per_particle(std::span<const double> probabilities, int n_spins) {
  if (n_spins < 1) throw Error(ErrorKind::invalid_argument, "need at least one spin");
  double s = 0.0;
  for (double p : probabilities)
    if (p > 0.0) s -= p * std::log2(p);
  return s / n_spins;
}

EnergyDistribution energy_distribution(const SampleSet& samples, const CouplingMatrix& couplings) {
  const Weights w = view(samples, Axis::x, "energy distribution");
  std::vector<double> p;
  p.reserve(w.entries.size());
  for (const auto& e : w.entries) p.push_back(e.second);
  return energies_from(w, couplings, p);
}

EnergyDistribution energy_distribution(const ProbabilityDistribution& dist,
                                       const CouplingMatrix& couplings) {
  return energies_from(view(dist, Axis::x, "energy distribution"), couplings, dist.values);
}

MagnetizationHistogram transverse_magnetization_histogram(const SampleSet& samples) {
  return histogram_from(view(samples, Axis::y, "transverse magnetization histogram"));
}
MagnetizationHistogram transverse_magnetization_histogram(const ProbabilityDistribution& dist) {
  return histogram_from(view(dist, Axis::y, "transverse magnetization histogram"));
}

MagnetizationHistogram magnetization_histogram(const SampleSet& samples) {
  return histogram_from(view(samples, samples.basis, "magnetization histogram"));
}
MagnetizationHistogram magnetization_histogram(const ProbabilityDistribution& dist) {
  return histogram_from(view(dist, dist.basis, "magnetization histogram"));
}

std::vector<ObservableRow> tidy_rows(const CorrelationProfile& profile) {
  std::vector<ObservableRow> rows;
  for (std::size_t r = 1; r <= profile.averaged.size(); ++r) {
    ObservableRow row{"C_r", static_cast<double>(r), profile.averaged[r - 1], std::nullopt};
    if (!profile.averaged_stderr.empty()) row.stderr_value = profile.averaged_stderr[r - 1];
    rows.push_back(row);
  }
  for (std::size_t r = 1; r <= profile.reference_row.size(); ++r)
    rows.push_back({"C_1_1plus_r", static_cast<double>(r), profile.reference_row[r - 1], std::nullopt});
  for (std::size_t i = 0; i < profile.means.size(); ++i)
    rows.push_back({"x_mean", static_cast<double>(i + 1), profile.means[i], std::nullopt});
  if (profile.correlation_length)
    rows.push_back({"correlation_length", 0.0, static_cast<double>(*profile.correlation_length), std::nullopt});
  return rows;
}

std::vector<ObservableRow> tidy_rows(const StructureFunction& sf) {
  std::vector<ObservableRow> rows;
  for (std::size_t i = 0; i < sf.k_values.size(); ++i)
    rows.push_back({"S_k", sf.k_values[i], sf.s_values[i], std::nullopt});
  return rows;
}

std::vector<ObservableRow> tidy_rows(const EnergyDistribution& ed) {
  std::vector<ObservableRow> rows;
  for (std::size_t i = 0; i < ed.energies.size(); ++i)
    rows.push_back({"P_E", ed.energies[i], ed.probabilities[i], std::nullopt});
  for (std::size_t i = 0; i < ed.energies.size(); ++i)
    rows.push_back({"cumulative_E", ed.energies[i], ed.cumulative[i], std::nullopt});
  rows.push_back({"entropy_per_particle", 0.0, ed.entropy_per_particle, std::nullopt});
  return rows;
}

std::vector<ObservableRow> tidy_rows(const MagnetizationHistogram& h) {
  std::vector<ObservableRow> rows;
  for (std::size_t i = 0; i < h.values.size(); ++i)
    rows.push_back({"P_Sy", static_cast<double>(h.values[i]), h.probabilities[i], std::nullopt});
  rows.push_back({"Sy_mean_fraction", 0.0, h.mean_fraction, std::nullopt});
  return rows;
}

void write_tidy_csv(std::ostream& out, const std::vector<ObservableRow>& rows, bool header) {
  const auto old = out.precision(17);
  if (header) out << "quantity,index,value,stderr\n";
  for (const auto& r : rows) {
    out << r.quantity << ',' << r.index << ',' << r.value << ',';
    if (r.stderr_value) out << *r.stderr_value;
    out << '\n';
  }
  out.precision(old);
}

}  // namespace tfim
