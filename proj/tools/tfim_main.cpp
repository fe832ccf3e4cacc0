#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "tfim/config.hpp"
#include "tfim/error.hpp"
#include "tfim/harness.hpp"

namespace {

using nlohmann::json;

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> shots;
  std::optional<double> epsilon;
  std::optional<std::string> out;
  std::optional<int> workers;
  bool allow_large = false;
  bool dry_run = false;
};

int fail(const std::string& kind, const std::string& message) {
  json err{{"error", kind}, {"message", message}};
  if (kind == "config") {
    json problems = json::array();
    std::string rest = message;
    for (std::size_t pos; (pos = rest.find("; ")) != std::string::npos; rest.erase(0, pos + 2))
      problems.push_back(rest.substr(0, pos));
    problems.push_back(rest);
    err["problems"] = problems;
  }
  std::cerr << err.dump() << '\n';
  return 1;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw tfim::Error(tfim::ErrorKind::io, "cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Command-line flags take precedence over the file; the merged document is
// validated as a whole.
std::string merged_config(const Overrides& o, tfim::RunMode mode) {
  json j;
  try {
    j = json::parse(read_file(o.config));
  } catch (const json::parse_error& e) {
    throw tfim::Error(tfim::ErrorKind::config, std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw tfim::Error(tfim::ErrorKind::config, "config must be a JSON object");
  const std::string name(tfim::to_string(mode));
  if (j.contains("mode") && j["mode"] != name)
    throw tfim::Error(tfim::ErrorKind::config,
                      "config mode '" + j["mode"].dump() + "' does not match subcommand mode '" + name + "'");
  j["mode"] = name;
  if (o.seed) j["seed"] = *o.seed;
  if (o.shots) j["shots"] = *o.shots;
  if (o.epsilon) j["detection"] = {{"epsilon", *o.epsilon}};
  if (o.out) j["output_dir"] = *o.out;
  if (o.workers) j["workers"] = *o.workers;
  if (o.allow_large) j["limits"]["allow_large"] = true;
  return j.dump();
}

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("-c,--config", o.config, "JSON run configuration")->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "random seed for sampling");
  cmd->add_option("--shots", o.shots, "measurement shots");
  cmd->add_option("--epsilon", o.epsilon, "per-spin detection efficiency");
  cmd->add_option("-o,--out", o.out, "output directory");
  cmd->add_option("-j,--workers", o.workers, "worker threads (0 = all cores)");
  cmd->add_flag("--allow-large", o.allow_large, "permit runs above the spin limit");
  cmd->add_flag("--dry-run", o.dry_run, "validate and print the resolved config");
}

int run_mode(const Overrides& o, tfim::RunMode mode) {
  const auto config = tfim::parse_run_config(merged_config(o, mode));
  tfim::check_resources(config);
  if (o.dry_run) {
    std::cout << tfim::to_json(config) << '\n';
    return 0;
  }
  const auto manifest = tfim::run(config);
  std::cout << json{{"output_dir", config.output_dir.string()},
                    {"wall_seconds", manifest.wall_seconds},
                    {"summary", json::parse(manifest.summary_json)}}
                   .dump(2)
            << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trapped-ion transverse-field Ising simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", tfim::library_version());

  struct Mode {
    const char* name;
    const char* help;
    tfim::RunMode mode;
    Overrides opts;
  };
  Mode modes[] = {
      {"spectrum", "critical gap scan over the transverse field", tfim::RunMode::spectrum_scan, {}},
      {"quench", "exponential field ramp followed by x-basis readout", tfim::RunMode::quench, {}},
      {"reverse", "ramp down and back up, tracking transverse magnetization", tfim::RunMode::coherence_reversal, {}},
      {"rampsweep", "Binder cumulant versus ramp time constant", tfim::RunMode::ramp_speed_sweep, {}},
      {"fm", "ferromagnetic versus antiferromagnetic ordering", tfim::RunMode::fm_comparison, {}},
  };
  for (auto& m : modes) add_common(app.add_subcommand(m.name, m.help), m.opts);

  std::string sweep_file, sweep_root;
  int sweep_workers = 0;
  auto* sweep = app.add_subcommand("sweep", "run a list of configs on a worker pool");
  sweep->add_option("-c,--config", sweep_file, "JSON array of run configurations")->required()->check(CLI::ExistingFile);
  sweep->add_option("-o,--out", sweep_root, "sweep output root")->required();
  sweep->add_option("-j,--workers", sweep_workers, "concurrent runs (0 = all cores)");

  std::string samples_file, deconv_out = "deconv-out";
  double deconv_eps = 0.93;
  std::optional<double> eps_dark, eps_bright;
  auto* deconv = app.add_subcommand("deconv", "deconvolve detection errors from a sample CSV");
  deconv->add_option("samples", samples_file, "sample CSV (basis,bitstring,count)")->required()->check(CLI::ExistingFile);
  deconv->add_option("--epsilon", deconv_eps, "symmetric detection efficiency");
  deconv->add_option("--epsilon-dark", eps_dark, "P(read 0 | 0)");
  deconv->add_option("--epsilon-bright", eps_bright, "P(read 1 | 1)");
  deconv->add_option("-o,--out", deconv_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return fail("usage", e.what());
  }

  try {
    for (auto& m : modes)
      if (app.got_subcommand(m.name)) return run_mode(m.opts, m.mode);

    if (app.got_subcommand(sweep)) {
      const auto configs = tfim::parse_run_configs(read_file(sweep_file));
      for (const auto& c : configs) tfim::check_resources(c);
      const auto report = tfim::sweep(configs, sweep_root, sweep_workers);
      std::cout << json{{"runs", report.entries.size()},
                        {"failures", report.failures()},
                        {"combined_csv", report.combined_csv.string()}}
                       .dump(2)
                << '\n';
      return report.failures() == 0 ? 0 : 2;
    }

    if (app.got_subcommand(deconv)) {
      tfim::DetectionChannel channel = tfim::DetectionChannel::symmetric(deconv_eps);
      if (eps_dark || eps_bright) {
        if (!(eps_dark && eps_bright))
          throw tfim::Error(tfim::ErrorKind::config, "--epsilon-dark and --epsilon-bright go together");
        channel = {*eps_dark, *eps_bright};
      }
      const auto report = tfim::deconvolve_sample_file(samples_file, channel, deconv_out);
      std::cout << json{{"negative_entries", report.negative_entries},
                        {"min_value", report.min_value},
                        {"total", report.total}}
                       .dump(2)
                << '\n';
      return 0;
    }
  } catch (const tfim::Error& e) {
    return fail(std::string(tfim::to_string(e.kind())), e.what());
  } catch (const std::exception& e) {
    return fail("internal", e.what());
  }
  return 0;
}
