#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tfim/couplings.hpp"
#include "tfim/detection.hpp"

namespace tfim {

/// Per-shot staggered magnetization |sum_i (-1)^i x_i| / N, i counted from 1.
double staggered_magnetization(std::uint64_t bitstring, int n_spins);
/// Per-shot |sum_i x_i| / N.
double uniform_magnetization(std::uint64_t bitstring, int n_spins);

struct MagnetizationSummary {
  double per_shot_mean = 0.0;    // mean of per-shot values
  double per_shot_stderr = 0.0;  // zero for exact distributions
  double second_moment = 0.0;
  double fourth_moment = 0.0;
  double of_expectations = 0.0;  // |sum_i s_i <x_i>| / N
};

MagnetizationSummary staggered_magnetization(const SampleSet& samples);
MagnetizationSummary staggered_magnetization(const ProbabilityDistribution& dist);
MagnetizationSummary uniform_magnetization(const SampleSet& samples);
MagnetizationSummary uniform_magnetization(const ProbabilityDistribution& dist);

struct BinderCumulant {
  double raw = 0.0;     // 3/2 - <m^4> / (2 <m^2>^2)
  double scaled = 0.0;  // (raw - g_uniform) / (1 - g_uniform)
};

/// From per-shot m_s values (at least two).
BinderCumulant binder_cumulant(std::span<const double> per_shot, int n_spins);
BinderCumulant binder_cumulant(const SampleSet& samples);
BinderCumulant binder_cumulant(const ProbabilityDistribution& dist);
/// Raw cumulant of m_s over the uniform distribution of N-spin strings.
double uniform_binder_reference(int n_spins);

struct CorrelationProfile {
  Eigen::MatrixXd pair_matrix;              // C_ij, zero-based ions
  std::vector<double> means;                // <x_i>
  std::vector<double> averaged;             // C(r) for r = 1..N-1 (index r-1)
  std::vector<double> averaged_stderr;      // empty for exact distributions
  std::vector<double> reference_row;        // C_{1,1+r}
  std::optional<int> correlation_length;    // smallest r with |C(r)| < |C(1)|/e
};

CorrelationProfile correlations(const SampleSet& samples);
CorrelationProfile correlations(const ProbabilityDistribution& dist);

struct StructureFunction {
  std::vector<double> k_values;  // m pi / N, m = 1..N
  std::vector<double> s_values;
};

StructureFunction structure_function(const CorrelationProfile& profile);

/// S(pi) from the variance of the staggered sum,
/// |Var(M_s) - sum_i Var(x_i)| / (N (N - 1)); equals the Fourier route when
/// (-1)^r C_{i,i+r} does not depend on i or r.
double staggered_moment_s_pi(const ProbabilityDistribution& dist);

struct EnergyDistribution {
  std::vector<double> energies;       // distinct classical energies, ascending
  std::vector<double> probabilities;  // P(E) summed over strings at that energy
  std::vector<double> cumulative;
  double entropy_per_particle = 0.0;  // -(1/N) sum_s P_s log2 P_s over strings
};

EnergyDistribution energy_distribution(const SampleSet& samples, const CouplingMatrix& couplings);
EnergyDistribution energy_distribution(const ProbabilityDistribution& dist,
                                       const CouplingMatrix& couplings);
/// Entropy per particle (base 2) of a distribution over strings; entries
/// that are not positive are skipped.
double entropy_per_particle(std::span<const double> probabilities, int n_spins);

struct MagnetizationHistogram {
  std::vector<int> values;            // S_y = -N, -N+2, ..., N
  std::vector<double> probabilities;
  double mean_fraction = 0.0;         // <S_y> / N
};

MagnetizationHistogram transverse_magnetization_histogram(const SampleSet& samples);
MagnetizationHistogram transverse_magnetization_histogram(const ProbabilityDistribution& dist);
/// Same histogram of (#ones - #zeros) for data taken in any basis.
MagnetizationHistogram magnetization_histogram(const SampleSet& samples);
MagnetizationHistogram magnetization_histogram(const ProbabilityDistribution& dist);

// One row of a tidy observable table.
struct ObservableRow {
  std::string quantity;
  double index = 0.0;
  double value = 0.0;
  std::optional<double> stderr_value;
};

std::vector<ObservableRow> tidy_rows(const CorrelationProfile& profile);
std::vector<ObservableRow> tidy_rows(const StructureFunction& sf);
std::vector<ObservableRow> tidy_rows(const EnergyDistribution& ed);
std::vector<ObservableRow> tidy_rows(const MagnetizationHistogram& h);
void write_tidy_csv(std::ostream& out, const std::vector<ObservableRow>& rows, bool header = true);

}  // namespace tfim
