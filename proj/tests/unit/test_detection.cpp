#include <doctest.h>

#include <bit>
#include <cmath>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "tfim/detection.hpp"
#include "tfim/error.hpp"

using namespace tfim;

namespace {

StateVector random_state(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  StateVector s(n);
  for (auto& a : s.amplitudes()) a = {g(rng), g(rng)};
  s.normalize();
  return s;
}

ProbabilityDistribution random_distribution(int n, std::uint64_t seed) {
  return ProbabilityDistribution::from_state(random_state(n, seed), Axis::z);
}

Eigen::MatrixXd dense_channel(int n, double dark, double bright) {
  Eigen::MatrixXd m(2, 2);
  m << dark, 1.0 - bright, 1.0 - dark, bright;
  Eigen::MatrixXd out = Eigen::MatrixXd::Identity(1, 1);
  for (int k = 0; k < n; ++k) {
    Eigen::MatrixXd next(out.rows() * 2, out.cols() * 2);
    for (Eigen::Index i = 0; i < out.rows(); ++i)
      for (Eigen::Index j = 0; j < out.cols(); ++j) next.block(2 * i, 2 * j, 2, 2) = out(i, j) * m;
    out = next;
  }
  return out;
}

}  // namespace

TEST_CASE("sampling reproduces Born probabilities") {
  const auto psi = random_state(4, 3);
  const auto p = psi.probabilities();
  const std::uint64_t shots = 1000000;
  const auto s = sample(psi, shots, 99);
  CHECK(s.total_shots == shots);
  double chi2 = 0.0;
  for (std::uint64_t i = 0; i < 16; ++i) {
    const auto it = s.counts.find(i);
    const double observed = it == s.counts.end() ? 0.0 : static_cast<double>(it->second);
    const double expected = p[i] * shots;
    chi2 += (observed - expected) * (observed - expected) / expected;
  }
  // 15 degrees of freedom; the 0.999 quantile is 37.7.
  CHECK(chi2 < 37.7);
  const auto again = sample(psi, shots, 99);
  CHECK(again.counts == s.counts);
}

TEST_CASE("sampling in a rotated basis") {
  const auto plus = prepare_initial_state(6, Direction::plus_y);
  const auto s = sample(plus, 500, 1, Axis::y);
  CHECK(s.basis == Axis::y);
  REQUIRE(s.counts.size() == 1);
  CHECK(s.counts.begin()->first == 63u);
}

TEST_CASE("confusion matrix entries") {
  CHECK(confusion_matrix_entry(341, 341, 0.93, 10) == doctest::Approx(0.483982307).epsilon(1e-8));
  CHECK(std::abs(confusion_matrix_entry(341, 341, 0.93, 10) - std::pow(0.93, 10)) < 1e-6);
  CHECK(confusion_matrix_entry(0b101, 0b110, 0.9, 3) == doctest::Approx(0.1 * 0.1 * 0.9));
  CHECK_THROWS_AS(confusion_matrix_entry(0, 0, 0.5, 3), Error);
}

TEST_CASE("delta distribution through the channel") {
  ProbabilityDistribution d{10, Axis::x, DistributionKind::raw, std::vector<double>(1024, 0.0)};
  d.values[341] = 1.0;
  const auto out = apply_detection_error(d, DetectionChannel::symmetric(0.93));
  CHECK(out.kind == DistributionKind::observed);
  CHECK(out.values[341] == doctest::Approx(std::pow(0.93, 10)).epsilon(1e-12));
  for (int bit = 0; bit < 10; ++bit)
    CHECK(out.values[341 ^ (1u << bit)] == doctest::Approx(std::pow(0.93, 9) * 0.07).epsilon(1e-12));
  CHECK(out.total() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("product-structure channel equals dense matrix multiplication") {
  for (int n = 1; n <= 4; ++n) {
    const auto d = random_distribution(n, 40 + n);
    Eigen::VectorXd p(d.values.size());
    for (std::size_t i = 0; i < d.values.size(); ++i) p(static_cast<Eigen::Index>(i)) = d.values[i];

    const auto sym = apply_detection_error(d, DetectionChannel::symmetric(0.93));
    const Eigen::VectorXd ref = oracle::confusion_matrix(n, 0.93) * p;
    for (std::size_t i = 0; i < d.values.size(); ++i) CHECK(std::abs(sym.values[i] - ref(i)) < 1e-12);

    const auto asym = apply_detection_error(d, DetectionChannel{0.95, 0.88});
    const Eigen::VectorXd ref2 = dense_channel(n, 0.95, 0.88) * p;
    for (std::size_t i = 0; i < d.values.size(); ++i) CHECK(std::abs(asym.values[i] - ref2(i)) < 1e-12);

    const auto back = deconvolve(sym, DetectionChannel::symmetric(0.93));
    const Eigen::VectorXd ref3 = oracle::confusion_matrix(n, 0.93).inverse() * ref;
    for (std::size_t i = 0; i < d.values.size(); ++i) CHECK(std::abs(back.values[i] - ref3(i)) < 1e-12);
  }
}

TEST_CASE("forward then inverse is the identity at N=10") {
  const auto d = random_distribution(10, 5);
  for (const auto ch : {DetectionChannel::symmetric(0.93), DetectionChannel{0.97, 0.9}}) {
    const auto back = deconvolve(apply_detection_error(d, ch), ch);
    CHECK(back.kind == DistributionKind::deconvolved);
    double worst = 0.0;
    for (std::size_t i = 0; i < d.values.size(); ++i) worst = std::max(worst, std::abs(back.values[i] - d.values[i]));
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("finite-shot deconvolution sharpens Neel peaks") {
  StateVector s(10);
  s[341] = std::sqrt(0.45);
  s[682] = std::sqrt(0.45);
  s[0] = std::sqrt(0.1);
  const auto clean = sample(s, 4000, 17);
  const auto noisy = apply_detection_error(clean, DetectionChannel::symmetric(0.93), 18);
  CHECK(noisy.total_shots == 4000);
  CHECK(noisy.epsilon == doctest::Approx(0.93));
  const auto observed = ProbabilityDistribution::from_samples(noisy);
  const auto fixed = deconvolve(observed, DetectionChannel::symmetric(0.93));
  CHECK(fixed.values[341] > observed.values[341]);
  CHECK(fixed.values[682] > observed.values[682]);
  CHECK(fixed.values[341] + fixed.values[682] == doctest::Approx(0.9).epsilon(0.05));
  CHECK(fixed.total() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(fixed.negative_count() > 0);
  CHECK(fixed.min_value() < 0.0);
}

TEST_CASE("sampled channel flips bits at the error rate") {
  StateVector s = StateVector::basis_state(8, 0);
  const auto clean = sample(s, 20000, 1);
  const auto noisy = apply_detection_error(clean, DetectionChannel::symmetric(0.9), 2);
  double flips = 0.0;
  for (const auto& [bits, count] : noisy.counts) flips += std::popcount(bits) * static_cast<double>(count);
  CHECK(flips / (8.0 * 20000.0) == doctest::Approx(0.1).epsilon(0.05));
}

TEST_CASE("channel validation") {
  CHECK_NOTHROW(DetectionChannel::symmetric(1.0).validate());
  CHECK_THROWS_AS(DetectionChannel::symmetric(0.5).validate(), Error);
  CHECK_THROWS_AS((DetectionChannel{0.9, 1.1}.validate()), Error);
}

TEST_CASE("sample CSV round trip") {
  const auto s = sample(random_state(5, 8), 300, 4, Axis::x);
  std::stringstream io;
  write_sample_set_csv(io, s);
  const auto back = read_sample_set_csv(io);
  CHECK(back.basis == Axis::x);
  CHECK(back.n_spins == 5);
  CHECK(back.counts == s.counts);
  CHECK(back.total_shots == 300);
  CHECK(to_bitstring(341, 10) == "0101010101");
  CHECK(parse_axis("y") == Axis::y);
  CHECK_THROWS_AS(parse_axis("w"), Error);

  std::stringstream bad("basis,bitstring,count\nx,0101,3\nx,011,1\n");
  CHECK_THROWS_AS(read_sample_set_csv(bad), Error);
}
