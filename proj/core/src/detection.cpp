#include "tfim/detection.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "tfim/error.hpp"

namespace tfim {
namespace {

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

void check_distribution(const ProbabilityDistribution& d) {
  if (d.n_spins < 1 || d.n_spins > 30 || d.values.size() != (std::size_t{1} << d.n_spins))
    throw Error(ErrorKind::dimension_mismatch, "distribution length does not match 2^n");
}

// Applies the same 2x2 matrix (columns = true bit value) to every spin.
void apply_single_spin(std::vector<double>& p, int n, const double (&m)[2][2]) {
  for (int bit = 0; bit < n; ++bit) {
    const std::size_t stride = std::size_t{1} << bit;
    for (std::size_t base = 0; base < p.size(); base += 2 * stride) {
      for (std::size_t off = 0; off < stride; ++off) {
        const std::size_t i0 = base + off;
        const std::size_t i1 = i0 + stride;
        const double p0 = p[i0];
        const double p1 = p[i1];
        p[i0] = m[0][0] * p0 + m[0][1] * p1;
        p[i1] = m[1][0] * p0 + m[1][1] * p1;
      }
    }
  }
}

}  // namespace

void SampleSet::validate() const {
  if (n_spins < 1 || n_spins > 63) throw Error(ErrorKind::invalid_argument, "sample set spin count out of range");
  std::uint64_t sum = 0;
  for (const auto& [index, count] : counts) {
    if (n_spins < 64 && index >= (std::uint64_t{1} << n_spins))
      throw Error(ErrorKind::invalid_argument, "bitstring index exceeds 2^n");
    sum += count;
  }
  if (sum != total_shots) throw Error(ErrorKind::invalid_argument, "counts do not add up to total_shots");
}

ProbabilityDistribution ProbabilityDistribution::from_state(const StateVector& state, Axis basis) {
  ProbabilityDistribution d;
  d.n_spins = state.n_spins();
  d.basis = basis;
  d.kind = DistributionKind::raw;
  d.values = rotate_measurement_basis(state, basis).probabilities();
  return d;
}

ProbabilityDistribution ProbabilityDistribution::from_samples(const SampleSet& samples) {
  samples.validate();
  if (samples.total_shots == 0) throw Error(ErrorKind::invalid_argument, "sample set is empty");
  if (samples.n_spins > 30) throw Error(ErrorKind::resource_guard, "too many spins for a dense distribution");
  ProbabilityDistribution d;
  d.n_spins = samples.n_spins;
  d.basis = samples.basis;
  d.kind = DistributionKind::observed;
  d.values.assign(std::size_t{1} << samples.n_spins, 0.0);
  const double inv = 1.0 / static_cast<double>(samples.total_shots);
  for (const auto& [index, count] : samples.counts) d.values[index] = count * inv;
  return d;
}

double ProbabilityDistribution::total() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s;
}

int ProbabilityDistribution::negative_count() const {
  return static_cast<int>(std::count_if(values.begin(), values.end(), [](double v) { return v < 0.0; }));
}

double ProbabilityDistribution::min_value() const {
  return values.empty() ? 0.0 : *std::min_element(values.begin(), values.end());
}

void DetectionChannel::validate() const {
  auto ok = [](double e) { return e > 0.5 && e <= 1.0; };
  if (!ok(epsilon_dark) || !ok(epsilon_bright)) {
    std::ostringstream msg;
    msg << "detection efficiency must lie in (0.5, 1]; got dark=" << epsilon_dark
        << " bright=" << epsilon_bright;
    throw Error(ErrorKind::invalid_argument, msg.str());
  }
}

SampleSet sample(const StateVector& state, std::uint64_t shots, std::uint64_t seed, Axis basis) {
  if (shots < 1) throw Error(ErrorKind::invalid_argument, "need at least one shot");
  if (std::abs(state.norm() - 1.0) > 1e-6)
    throw Error(ErrorKind::invalid_argument, "state must be normalized before sampling");
  const auto probs = rotate_measurement_basis(state, basis).probabilities();
  std::vector<double> cumulative(probs.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) cumulative[i] = acc += probs[i];

  SampleSet out;
  out.basis = basis;
  out.n_spins = state.n_spins();
  out.total_shots = shots;
  out.seed = seed;
  std::mt19937_64 rng(seed);
  for (std::uint64_t s = 0; s < shots; ++s) {
    const double u = uniform01(rng) * acc;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    if (it == cumulative.end()) --it;
    // Skip zero-probability entries that share the cumulative value.
    auto index = static_cast<std::uint64_t>(it - cumulative.begin());
    while (probs[index] == 0.0 && index + 1 < probs.size()) ++index;
    ++out.counts[index];
  }
  return out;
}

double confusion_matrix_entry(std::uint64_t i, std::uint64_t j, double epsilon, int n_spins) {
  DetectionChannel::symmetric(epsilon).validate();
  if (n_spins < 1 || n_spins > 63) throw Error(ErrorKind::invalid_argument, "spin count out of range");
  const std::uint64_t limit = std::uint64_t{1} << n_spins;
  if (i >= limit || j >= limit) throw Error(ErrorKind::invalid_argument, "index exceeds 2^n");
  const int beta = std::popcount(i ^ j);
  return std::pow(1.0 - epsilon, beta) * std::pow(epsilon, n_spins - beta);
}

ProbabilityDistribution apply_detection_error(const ProbabilityDistribution& dist,
                                              const DetectionChannel& channel) {
  check_distribution(dist);
  channel.validate();
  const double a = channel.epsilon_dark;
  const double b = channel.epsilon_bright;
  const double m[2][2] = {{a, 1.0 - b}, {1.0 - a, b}};
  ProbabilityDistribution out = dist;
  out.kind = DistributionKind::observed;
  apply_single_spin(out.values, dist.n_spins, m);
  return out;
}

SampleSet apply_detection_error(const SampleSet& samples, const DetectionChannel& channel,
                                std::uint64_t seed) {
  samples.validate();
  channel.validate();
  const double flip_dark = 1.0 - channel.epsilon_dark;
  const double flip_bright = 1.0 - channel.epsilon_bright;
  SampleSet out = samples;
  out.counts.clear();
  out.seed = seed;
  out.epsilon = 0.5 * (channel.epsilon_dark + channel.epsilon_bright);
  std::mt19937_64 rng(seed);
  for (const auto& [index, count] : samples.counts) {
    for (std::uint64_t c = 0; c < count; ++c) {
      std::uint64_t read = index;
      for (int bit = 0; bit < samples.n_spins; ++bit) {
        const std::uint64_t mask = std::uint64_t{1} << bit;
        const double p = (index & mask) ? flip_bright : flip_dark;
        if (uniform01(rng) < p) read ^= mask;
      }
      ++out.counts[read];
    }
  }
  return out;
}

ProbabilityDistribution deconvolve(const ProbabilityDistribution& observed,
                                   const DetectionChannel& channel) {
  check_distribution(observed);
  channel.validate();
  const double a = channel.epsilon_dark;
  const double b = channel.epsilon_bright;
  const double det = a + b - 1.0;
  const double m[2][2] = {{b / det, -(1.0 - b) / det}, {-(1.0 - a) / det, a / det}};
  ProbabilityDistribution out = observed;
  out.kind = DistributionKind::deconvolved;
  apply_single_spin(out.values, observed.n_spins, m);
  return out;
}

std::string to_bitstring(std::uint64_t index, int n_spins) {
  std::string s(static_cast<std::size_t>(n_spins), '0');
  for (int ion = 0; ion < n_spins; ++ion)
    if ((index >> bit_of_ion(ion, n_spins)) & 1u) s[ion] = '1';
  return s;
}

char axis_name(Axis axis) {
  switch (axis) {
    case Axis::x: return 'x';
    case Axis::y: return 'y';
    default: return 'z';
  }
}

Axis parse_axis(const std::string& name) {
  if (name == "x") return Axis::x;
  if (name == "y") return Axis::y;
  if (name == "z") return Axis::z;
  throw Error(ErrorKind::invalid_argument, "unknown measurement basis '" + name + "'");
}

void write_sample_set_csv(std::ostream& out, const SampleSet& samples) {
  out << "basis,bitstring,count\n";
  for (const auto& [index, count] : samples.counts)
    out << axis_name(samples.basis) << ',' << to_bitstring(index, samples.n_spins) << ',' << count << '\n';
}

std::string sample_set_metadata_json(const SampleSet& samples) {
  nlohmann::json j;
  j["basis"] = std::string(1, axis_name(samples.basis));
  j["n_spins"] = samples.n_spins;
  j["shots"] = samples.total_shots;
  j["epsilon"] = samples.epsilon;
  j["seed"] = samples.seed;
  return j.dump(2);
}

SampleSet read_sample_set_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("basis,bitstring,count", 0) != 0)
    throw Error(ErrorKind::io, "sample CSV must start with 'basis,bitstring,count'");
  SampleSet out;
  bool first = true;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string basis, bits, count;
    if (!std::getline(fields, basis, ',') || !std::getline(fields, bits, ',') || !std::getline(fields, count))
      throw Error(ErrorKind::io, "malformed sample CSV row " + std::to_string(row));
    const Axis axis = parse_axis(basis);
    const int n = static_cast<int>(bits.size());
    if (first) {
      out.basis = axis;
      out.n_spins = n;
      first = false;
    } else if (axis != out.basis || n != out.n_spins) {
      throw Error(ErrorKind::io, "mixed basis or width in sample CSV at row " + std::to_string(row));
    }
    if (n < 1 || n > 63) throw Error(ErrorKind::io, "bitstring width out of range at row " + std::to_string(row));
    std::uint64_t index = 0;
    for (char c : bits) {
      if (c != '0' && c != '1') throw Error(ErrorKind::io, "non-binary bitstring at row " + std::to_string(row));
      index = (index << 1) | static_cast<std::uint64_t>(c == '1');
    }
    std::uint64_t k = 0;
    try {
      std::size_t used = 0;
      k = std::stoull(count, &used);
      if (used != count.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw Error(ErrorKind::io, "bad count at row " + std::to_string(row));
    }
    out.counts[index] += k;
    out.total_shots += k;
  }
  if (first) throw Error(ErrorKind::io, "sample CSV has no rows");
  return out;
}

SampleSet read_sample_set_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
  return read_sample_set_csv(in);
}

}  // namespace tfim
