#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "tfim/config.hpp"
#include "tfim/digest.hpp"
#include "tfim/error.hpp"
#include "tfim/harness.hpp"

using namespace tfim;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("tfim_test_" + std::to_string(std::random_device{}()) + "_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

RunConfig small_quench(const fs::path& out, std::uint64_t seed = 11) {
  return parse_run_config(json{{"mode", "quench"},
                               {"seed", seed},
                               {"output_dir", out.string()},
                               {"couplings", {{"source", "synthetic"}, {"n", 6}, {"alpha", 1.05}}},
                               {"schedule", {{"tau_j0", 0.4}}},
                               {"shots", 500}}
                              .dump());
}

}  // namespace

TEST_CASE("sha256 of known strings") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("config defaults and round trip") {
  const auto c = parse_run_config(R"({"mode": "spectrum_scan", "couplings": {"source": "synthetic"}})");
  CHECK(c.mode == RunMode::spectrum_scan);
  CHECK(c.grid_points == 200);
  CHECK(c.detection.epsilon_dark == 0.93);
  CHECK(c.shots == 4000);
  const auto again = parse_run_config(to_json(c));
  CHECK(to_json(again) == to_json(c));
  CHECK(parse_run_mode("fm_comparison") == RunMode::fm_comparison);
}

TEST_CASE("config errors are collected into one report") {
  try {
    parse_run_config(R"({"mode": "warp", "bogus": 1, "detection": {"epsilon": 0.4}, "shots": -3})");
    FAIL("expected a config error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::config);
    const std::string msg = e.what();
    CHECK(msg.find("mode") != std::string::npos);
    CHECK(msg.find("bogus") != std::string::npos);
    CHECK(msg.find("epsilon") != std::string::npos);
    CHECK(msg.find("shots") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_run_config("{not json"), Error);
  CHECK_THROWS_AS(parse_run_config(R"({"seed": 1, "couplings": {"source": "synthetic", "n": 6.5}, "schedule": {"tau_ms": 0.4}})"), Error);
  CHECK_THROWS_AS(parse_run_config(R"({"schedule": {"tau_ms": 0.4, "tau_j0": 0.4}})"), Error);
}

TEST_CASE("config lists") {
  const auto a = parse_run_configs(R"([{"mode": "quench", "seed": 1, "couplings": {"source": "synthetic"}, "schedule": {"tau_ms": 0.4}},
                                      {"mode": "fm_comparison", "seed": 2, "couplings": {"source": "synthetic", "n": 8}, "schedule": {"tau_ms": 0.4}}])");
  REQUIRE(a.size() == 2);
  CHECK(a[1].mode == RunMode::fm_comparison);
  const auto b = parse_run_configs(R"({"runs": [{"mode": "spectrum_scan", "couplings": {"source": "synthetic"}}]})");
  CHECK(b.size() == 1);
}

TEST_CASE("resource guard") {
  auto c = parse_run_config(R"({"seed": 1, "schedule": {"tau_ms": 0.4}, "couplings": {"source": "synthetic", "n": 22}})");
  try {
    check_resources(c);
    FAIL("expected resource_guard");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::resource_guard);
  }
  c.allow_large = true;
  CHECK_NOTHROW(check_resources(c));
}

TEST_CASE("quench run writes a complete, reproducible manifest") {
  const auto root = scratch("quench");
  const auto m1 = run(small_quench(root / "a"));
  const auto m2 = run(small_quench(root / "b"));
  CHECK(m1.mode == "quench");
  CHECK(m1.config_digest == sha256_hex(m1.config_json));
  REQUIRE(m1.files.size() == m2.files.size());
  for (std::size_t i = 0; i < m1.files.size(); ++i) {
    CHECK(m1.files[i].name == m2.files[i].name);
    CHECK(m1.files[i].sha256 == m2.files[i].sha256);
    CHECK(sha256_file(root / "a" / m1.files[i].name) == m1.files[i].sha256);
  }
  for (const char* f : {"couplings.csv", "observables_ideal.csv", "observables_deconvolved.csv", "samples_x.csv",
                        "samples_x.json", "correlations_pairs.csv", "summary.csv", "manifest.json"})
    CHECK(fs::exists(root / "a" / f));
  const auto manifest = json::parse(slurp(root / "a" / "manifest.json"));
  CHECK(manifest["config"]["seed"] == 11);
  CHECK(manifest.contains("couplings_sha256"));
  CHECK(manifest["summary"]["ideal"]["neel_population"].get<double>() > 0.0);

  const auto m3 = run(small_quench(root / "c", 12));
  bool differs = false;
  for (std::size_t i = 0; i < m1.files.size(); ++i)
    if (m1.files[i].name == "samples_x.csv") differs = m1.files[i].sha256 != m3.files[i].sha256;
  CHECK(differs);
  fs::remove_all(root);
}

TEST_CASE("sweep isolates failures and resumes") {
  const auto root = scratch("sweep");
  std::vector<RunConfig> configs;
  configs.push_back(small_quench(root / "ignored"));
  auto bad = small_quench(root / "ignored");
  bad.couplings.kind = CouplingSource::Kind::file;
  bad.couplings.path = root / "missing.csv";
  configs.push_back(bad);
  configs.push_back(small_quench(root / "ignored", 12));

  const auto first = sweep(configs, root, 1);
  REQUIRE(first.entries.size() == 3);
  CHECK(first.entries[0].status == "ok");
  CHECK(first.entries[1].status == "failed");
  CHECK(first.entries[1].error_kind == "config");
  CHECK(first.entries[1].message.find("missing.csv") != std::string::npos);
  CHECK(first.entries[2].status == "ok");
  CHECK(first.failures() == 1);
  CHECK(fs::exists(root / "sweep_report.json"));
  REQUIRE(fs::exists(first.combined_csv));
  CHECK(slurp(first.combined_csv).rfind("run,", 0) == 0);

  const auto second = sweep(configs, root, 1);
  CHECK(second.entries[0].status == "skipped");
  CHECK(second.entries[1].status == "failed");
  CHECK(second.entries[2].status == "skipped");

  // A tampered artifact forces that entry to rerun.
  std::ofstream(first.entries[0].output_dir / "summary.csv", std::ios::app) << "x\n";
  const auto third = sweep(configs, root, 1);
  CHECK(third.entries[0].status == "ok");
  CHECK(third.entries[2].status == "skipped");
  fs::remove_all(root);
}

TEST_CASE("deconvolving a sample file") {
  const auto root = scratch("deconv");
  run(small_quench(root / "q"));
  const auto report = deconvolve_sample_file(root / "q" / "samples_x.csv", DetectionChannel::symmetric(0.93), root / "d");
  CHECK(report.total == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(report.negative_entries >= 0);
  CHECK(fs::exists(root / "d" / "deconvolved.csv"));
  CHECK(fs::exists(root / "d" / "deconvolved.json"));
  CHECK_THROWS_AS(deconvolve_sample_file(root / "nothing.csv", DetectionChannel::symmetric(0.93), root / "d"), Error);
  fs::remove_all(root);
}

#ifdef TFIM_CLI_PATH
TEST_CASE("command line reports errors as JSON") {
  const auto root = scratch("cli");
  std::ofstream(root / "bad.json") << R"({"mode": "quench", "frobnicate": true})";
  const std::string cmd = std::string("\"") + TFIM_CLI_PATH + "\" quench -c \"" + (root / "bad.json").string() +
                          "\" > \"" + (root / "out.txt").string() + "\" 2> \"" + (root / "err.txt").string() + "\"";
  const int status = std::system(cmd.c_str());
  CHECK(status != 0);
  const auto err = json::parse(slurp(root / "err.txt"));
  CHECK(err["error"] == "config");
  CHECK(err["problems"].size() >= 1);

  std::ofstream(root / "ok.json") << R"({"seed": 3, "schedule": {"tau_j0": 0.4}, "couplings": {"source": "synthetic", "n": 4}})";
  const std::string dry = std::string("\"") + TFIM_CLI_PATH + "\" quench --dry-run -c \"" + (root / "ok.json").string() +
                          "\" > \"" + (root / "dry.txt").string() + "\"";
  CHECK(std::system(dry.c_str()) == 0);
  CHECK(json::parse(slurp(root / "dry.txt"))["mode"] == "quench");
  fs::remove_all(root);
}
#endif
