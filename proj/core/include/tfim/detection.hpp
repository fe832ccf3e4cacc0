#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "tfim/state.hpp"

namespace tfim {

// Measured bitstrings for one measurement basis. Keys are computational
// indices (ion 1 is the most significant bit).
struct SampleSet {
  Axis basis = Axis::z;
  int n_spins = 0;
  std::map<std::uint64_t, std::uint64_t> counts;
  std::uint64_t total_shots = 0;
  double epsilon = 1.0;     // detection efficiency the samples went through
  std::uint64_t seed = 0;

  void validate() const;
};

enum class DistributionKind { raw, observed, deconvolved };

struct ProbabilityDistribution {
  int n_spins = 0;
  Axis basis = Axis::z;
  DistributionKind kind = DistributionKind::raw;
  std::vector<double> values;  // length 2^n

  /// Born-rule probabilities after rotating the state to `basis`.
  static ProbabilityDistribution from_state(const StateVector& state, Axis basis);
  /// Empirical frequencies (kind = observed).
  static ProbabilityDistribution from_samples(const SampleSet& samples);

  double total() const;
  int negative_count() const;
  double min_value() const;
};

// Per-spin readout channel. epsilon_dark is P(read 0 | 0) and epsilon_bright
// is P(read 1 | 1); the symmetric channel has both equal to epsilon.
struct DetectionChannel {
  double epsilon_dark = 1.0;
  double epsilon_bright = 1.0;

  static DetectionChannel symmetric(double epsilon) { return {epsilon, epsilon}; }
  bool is_symmetric() const { return epsilon_dark == epsilon_bright; }
  void validate() const;  // both in (0.5, 1]
};

/// Draws `shots` i.i.d. bitstrings after rotating into `basis`.
SampleSet sample(const StateVector& state, std::uint64_t shots, std::uint64_t seed,
                 Axis basis = Axis::z);

/// (1 - eps)^beta eps^(n - beta) with beta the Hamming distance of i and j.
double confusion_matrix_entry(std::uint64_t i, std::uint64_t j, double epsilon, int n_spins);

/// P' = M P using the single-spin product structure (never forms M).
ProbabilityDistribution apply_detection_error(const ProbabilityDistribution& dist,
                                              const DetectionChannel& channel);
/// Flips every measured bit independently with the channel's error rates.
SampleSet apply_detection_error(const SampleSet& samples, const DetectionChannel& channel,
                                std::uint64_t seed);

/// P = M^-1 P'. Entries may come out slightly negative; they are kept.
ProbabilityDistribution deconvolve(const ProbabilityDistribution& observed,
                                   const DetectionChannel& channel);

void write_sample_set_csv(std::ostream& out, const SampleSet& samples);
std::string sample_set_metadata_json(const SampleSet& samples);
/// Reads the CSV written above. Every row must use the same basis and width.
SampleSet read_sample_set_csv(std::istream& in);
SampleSet read_sample_set_csv(const std::filesystem::path& path);

std::string to_bitstring(std::uint64_t index, int n_spins);
char axis_name(Axis axis);
Axis parse_axis(const std::string& name);

}  // namespace tfim
