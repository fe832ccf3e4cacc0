#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "tfim/error.hpp"
#include "tfim/spectrum.hpp"

using namespace tfim;

TEST_CASE("coupled gap matches the dense even-sector oracle") {
  for (int n : {4, 5, 6}) {
    for (double alpha : {0.7, 1.0, 1.4}) {
      const auto j = synthetic_power_law(n, 1.0, alpha);
      for (double b : {0.01, 0.1, 0.35, 1.0, 4.0}) {
        CAPTURE(n);
        CAPTURE(alpha);
        CAPTURE(b);
        const auto gp = coupled_gap(IsingHamiltonian(j, b), 1.0);
        CHECK(std::abs(gp.gap_khz - oracle::coupled_gap(j.values, b)) < 1e-8);
        CHECK(gp.matrix_element > 1e-8);
      }
    }
  }
}

TEST_CASE("scan minimum at N=4 equals the dense oracle on every grid point") {
  const auto j = synthetic_power_law(4, 1.0, 1.0);
  GapOptions opt;
  opt.workers = 1;
  const auto grid = default_b_grid(60);
  const auto scan = critical_gap_scan(j, grid, opt);
  REQUIRE(scan.gaps.size() == grid.size());
  double best = 1e300;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double ref = oracle::coupled_gap(j.values, grid[i]);
    CHECK(std::abs(scan.gaps[i] - ref) < 1e-8);
    best = std::min(best, ref);
  }
  CHECK(std::abs(scan.critical_gap - best) < 1e-8);
}

TEST_CASE("default grid is logarithmic over [0.01, 5]") {
  const auto g = default_b_grid();
  REQUIRE(g.size() == 200);
  CHECK(g.front() == doctest::Approx(0.01));
  CHECK(g.back() == doctest::Approx(5.0));
  CHECK(g[1] / g[0] == doctest::Approx(g[199] / g[198]).epsilon(1e-10));
}

TEST_CASE("scan validates its grid and coupling scale") {
  const auto j = synthetic_power_law(4, 1.0, 1.0);
  CHECK_THROWS_AS(critical_gap_scan(j, default_b_grid(20)), Error);
  CHECK_THROWS_AS(critical_gap_scan(j, default_b_grid(60, 0.1, 5.0)), Error);
  CHECK_THROWS_AS(critical_gap_scan(j, default_b_grid(60, 0.01, 2.0)), Error);
}

TEST_CASE("critical gap shrinks with interaction range") {
  GapOptions opt;
  const auto grid = default_b_grid(80);
  const auto shortr = critical_gap_scan(synthetic_power_law(8, 1.0, 3.0), grid, opt);
  const auto mid = critical_gap_scan(synthetic_power_law(8, 1.0, 0.7), grid, opt);
  const auto flat = critical_gap_scan(synthetic_power_law(8, 1.0, 0.05), grid, opt);
  CHECK(shortr.critical_gap > mid.critical_gap);
  CHECK(shortr.critical_field > mid.critical_field);
  CHECK(mid.critical_gap > flat.critical_gap);
  CHECK(flat.critical_gap < 0.1);
  CHECK(flat.critical_field < 0.1);
}

TEST_CASE("scan is reproducible and independent of the worker count") {
  const auto j = synthetic_power_law(6, 1.0, 1.1);
  const auto grid = default_b_grid(50);
  GapOptions one;
  one.workers = 1;
  GapOptions many;
  many.workers = 3;
  const auto a = critical_gap_scan(j, grid, one);
  const auto b = critical_gap_scan(j, grid, many);
  CHECK(a.gaps == b.gaps);
  CHECK(a.critical_field == b.critical_field);
}

TEST_CASE("scan CSV and summary") {
  const auto scan = critical_gap_scan(synthetic_power_law(4, 1.0, 1.0), default_b_grid(50));
  std::ostringstream csv;
  write_scan_csv(csv, scan);
  std::istringstream in(csv.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "b_over_j0,gap_over_j0");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 50);
  const auto js = scan_summary_json(scan);
  CHECK(js.find("\"B_c\"") != std::string::npos);
  CHECK(js.find("\"Delta_c\"") != std::string::npos);
}
