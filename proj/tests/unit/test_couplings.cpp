#include <doctest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "tfim/couplings.hpp"
#include "tfim/error.hpp"

using namespace tfim;

TEST_CASE("detuning rule places the beatnote above the COM mode") {
  const auto trap = TrapParameters::from_mhz(10, 0.7, 4.1);
  const DriveParameters drive;
  const double eta = std::sqrt(18.5 / 4100.0);
  CHECK(drive.beatnote_detuning_khz(trap) == doctest::Approx(4100.0 + 3.0 * eta * 600.0).epsilon(1e-14));
}

TEST_CASE("four-ion couplings equal a term-by-term re-summation") {
  const auto trap = TrapParameters::from_mhz(4, 0.7, 4.1);
  const DriveParameters drive;
  const auto chain = solve_chain(trap);
  const auto j = ising_couplings(chain, trap, drive);
  const auto ref = oracle::coupling_sum(chain.mode_vectors, chain.mode_freqs_khz, 600.0, 18.5,
                                        drive.beatnote_detuning_khz(trap));
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      if (a == b) {
        CHECK(j.values(a, b) == 0.0);
        continue;
      }
      CHECK(std::abs(j.values(a, b) - ref(a, b)) <= 1e-12 * std::abs(ref(a, b)));
      CHECK(j.values(a, b) == j.values(b, a));
    }
}

TEST_CASE("retaining only the COM mode gives uniform couplings") {
  const auto trap = TrapParameters::from_mhz(6, 0.7, 4.1);
  const auto chain = solve_chain(trap);
  const auto j = ising_couplings(chain, trap, DriveParameters{}, {0});
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < a; ++b) CHECK(j.values(a, b) == doctest::Approx(j.values(1, 0)).epsilon(1e-12));
}

TEST_CASE("physical ten-ion couplings are of order one kHz") {
  for (double axial : {0.62, 0.7, 0.8, 0.88}) {
    CAPTURE(axial);
    const auto j = physical_couplings(TrapParameters::from_mhz(10, axial, 4.1), DriveParameters{});
    CHECK(j.mean_nearest_neighbor > 0.3);
    CHECK(j.mean_nearest_neighbor < 3.0);
    CHECK(j.fitted_alpha > 0.4);
    CHECK(j.fitted_alpha < 1.5);
  }
}

TEST_CASE("fitted exponent falls as the axial confinement tightens") {
  const auto lo = physical_couplings(TrapParameters::from_mhz(10, 0.62, 4.1), DriveParameters{});
  const auto hi = physical_couplings(TrapParameters::from_mhz(10, 0.88, 4.1), DriveParameters{});
  CHECK(lo.fitted_alpha > hi.fitted_alpha);
  CHECK(lo.fitted_alpha == doctest::Approx(1.2).epsilon(0.15 / 1.2));
  CHECK(hi.fitted_alpha == doctest::Approx(0.7).epsilon(0.15 / 0.7));
}

TEST_CASE("power-law fit recovers synthetic exponents exactly") {
  for (double alpha : {0.5, 1.0, 1.37}) {
    const auto j = synthetic_power_law(10, 0.8, alpha);
    CHECK(j.fitted_alpha == doctest::Approx(alpha).epsilon(1e-12));
    CHECK(j.fitted_j0 == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(j.fit_residual < 1e-12);
    CHECK(j.mean_nearest_neighbor == doctest::Approx(0.8).epsilon(1e-14));
    CHECK(j.values(0, 3) == doctest::Approx(0.8 / std::pow(3.0, alpha)).epsilon(1e-14));
  }
}

TEST_CASE("interaction range") {
  CHECK(interaction_range(1.0) == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(interaction_range(std::log(5.0) / std::log(10.0)) == doctest::Approx(10.0).epsilon(1e-12));
  CHECK_THROWS_AS(interaction_range(0.0), Error);
  CHECK_FALSE(synthetic_power_law(6, 1.0, 0.0).range_xi.has_value());
}

TEST_CASE("axial bisection hits the requested exponent") {
  const auto trap = TrapParameters::from_mhz(10, 0.7, 4.1);
  const DriveParameters drive;
  const double axial = axial_frequency_for_alpha(1.0, trap, drive, 550.0, 950.0);
  auto t = trap;
  t.axial_khz = axial;
  CHECK(physical_couplings(t, drive).fitted_alpha == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("beatnote on a mode is a sideband resonance") {
  const auto trap = TrapParameters::from_mhz(4, 0.7, 4.1);
  const auto chain = solve_chain(trap);
  DriveParameters drive;
  drive.detuning_rule = DetuningRule::explicit_value;
  drive.detuning_khz = chain.mode_freqs_khz[1] + 0.2;
  try {
    ising_couplings(chain, trap, drive);
    FAIL("expected sideband_resonance");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::sideband_resonance);
  }
}

TEST_CASE("coupling CSV round trip is exact") {
  const auto j = physical_couplings(TrapParameters::from_mhz(6, 0.75, 4.1), DriveParameters{});
  std::stringstream s;
  write_couplings_csv(s, j);
  const auto back = read_couplings_csv(s);
  REQUIRE(back.n() == 6);
  CHECK((back.values - j.values).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back.fitted_alpha == doctest::Approx(j.fitted_alpha).epsilon(1e-14));
}
