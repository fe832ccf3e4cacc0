#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tfim/config.hpp"
#include "tfim/detection.hpp"

namespace tfim {

struct ArtifactRecord {
  std::string name;  // relative to the output directory
  std::string sha256;
  std::uintmax_t bytes = 0;
};

struct RunManifest {
  std::string version;
  std::string mode;
  std::string config_json;    // resolved config with defaults
  std::string config_digest;  // sha256 of config_json
  std::string couplings_sha256;
  std::string summary_json;   // headline numbers of the run
  double wall_seconds = 0.0;
  std::vector<ArtifactRecord> files;
};

std::string library_version();

/// Throws resource_guard when the run would exceed the configured spin limit.
void check_resources(const RunConfig& config);

/// Runs one pipeline and writes its artifacts plus manifest.json into
/// config.output_dir. Throws config errors before any computation starts.
RunManifest run(const RunConfig& config);

struct SweepEntry {
  std::size_t index = 0;
  std::string status;  // "ok", "skipped" or "failed"
  std::string error_kind;
  std::string message;
  std::filesystem::path output_dir;
};

struct SweepReport {
  std::vector<SweepEntry> entries;
  std::filesystem::path combined_csv;  // empty when nothing ran
  std::size_t failures() const;
};

/// Runs every config on a bounded worker pool. Failures are recorded per
/// entry; entries whose output directory already holds a manifest with the
/// same config digest and intact files are skipped. Per-run summary.csv
/// files are merged into root/combined.csv and the report goes to
/// root/sweep_report.json.
SweepReport sweep(const std::vector<RunConfig>& configs, const std::filesystem::path& root,
                  int workers = 0);

struct DeconvolutionReport {
  int negative_entries = 0;
  double min_value = 0.0;
  double total = 0.0;
  std::vector<ArtifactRecord> files;
};

/// Reads a sample CSV, deconvolves its empirical distribution and writes
/// deconvolved.csv and deconvolved.json into out_dir.
DeconvolutionReport deconvolve_sample_file(const std::filesystem::path& samples_csv,
                                           const DetectionChannel& channel,
                                           const std::filesystem::path& out_dir);

}  // namespace tfim
