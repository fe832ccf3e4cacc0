#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "tfim/error.hpp"
#include "tfim/ion_chain.hpp"

using namespace tfim;

TEST_CASE("two ions sit at the analytic stationary point") {
  const auto trap = TrapParameters::from_mhz(2, 0.62, 4.1);
  EquilibriumOptions opt;
  opt.gradient_tolerance = 1e-14;
  const auto u = equilibrium_positions(trap, opt);
  REQUIRE(u.size() == 2);
  const double expected = std::pow(4.0, -1.0 / 3.0);
  CHECK(u[0] == doctest::Approx(-expected).epsilon(1e-12));
  CHECK(u[1] == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("ten-ion equilibrium matches gradient descent") {
  const auto trap = TrapParameters::from_mhz(10, 0.7, 4.1);
  const auto u = equilibrium_positions(trap);
  const auto ref = oracle::gradient_descent_positions(10);
  REQUIRE(u.size() == ref.size());
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(std::abs(u[i] - ref[i]) < 1e-8);
  CHECK(equilibrium_gradient_norm(u) < 1e-10);
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(u[i] == doctest::Approx(-u[u.size() - 1 - i]).epsilon(1e-10));
}

TEST_CASE("two-ion rocking mode has the closed-form frequency") {
  const auto trap = TrapParameters::from_mhz(2, 0.62, 4.1);
  const auto chain = solve_chain(trap);
  REQUIRE(chain.mode_freqs_khz.size() == 2);
  CHECK(chain.mode_freqs_khz[0] == doctest::Approx(4100.0).epsilon(1e-12));
  CHECK(chain.mode_freqs_khz[1] ==
        doctest::Approx(std::sqrt(4100.0 * 4100.0 - 620.0 * 620.0)).epsilon(1e-12));
}

TEST_CASE("ten-ion transverse spectrum matches a Jacobi eigensolver") {
  for (double axial : {620.0, 700.0, 800.0, 880.0}) {
    CAPTURE(axial);
    TrapParameters trap{10, axial, 4100.0, 18.5};
    const auto chain = solve_chain(trap);
    const auto ref = oracle::transverse_frequencies(chain.positions, axial, 4100.0);
    REQUIRE(chain.mode_freqs_khz.size() == ref.size());
    for (std::size_t m = 0; m < ref.size(); ++m)
      CHECK(std::abs(chain.mode_freqs_khz[m] - ref[m]) / ref[m] < 1e-9);
  }
}

TEST_CASE("mode vectors are orthonormal and complete") {
  const auto chain = solve_chain(TrapParameters::from_mhz(10, 0.8, 4.1));
  const Eigen::MatrixXd& b = chain.mode_vectors;
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(10, 10);
  CHECK((b.transpose() * b - id).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((b * b.transpose() - id).cwiseAbs().maxCoeff() < 1e-9);
  // Center-of-mass mode is uniform across the chain.
  for (int i = 0; i < 10; ++i) CHECK(std::abs(std::abs(b(i, 0)) - 1.0 / std::sqrt(10.0)) < 1e-9);
}

TEST_CASE("ion chain rejects invalid traps") {
  CHECK_THROWS_AS(equilibrium_positions(TrapParameters{0, 700.0, 4100.0}), Error);
  CHECK_THROWS_AS(equilibrium_positions(TrapParameters{10, -1.0, 4100.0}), Error);
  try {
    // Ten ions buckle into a zigzag just below 0.9 MHz axial at 4.1 MHz transverse.
    solve_chain(TrapParameters::from_mhz(10, 0.95, 4.1));
    FAIL("expected zigzag_instability");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::zigzag_instability);
  }
}
