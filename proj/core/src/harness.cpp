#include "tfim/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>

#include <json.hpp>

#include "parallel.hpp"
#include "tfim/digest.hpp"
#include "tfim/dynamics.hpp"
#include "tfim/error.hpp"
#include "tfim/observables.hpp"
#include "tfim/spectrum.hpp"

#ifndef TFIM_VERSION
#define TFIM_VERSION "0.0.0"
#endif

namespace tfim {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix(seed ^ splitmix(stream));
}

std::string number(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  const fs::path& dir() const { return dir_; }

  void write(const std::string& name, const std::string& content) {
    std::ofstream out(dir_ / name, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::io, "cannot write " + (dir_ / name).string());
    out << content;
    if (!out) throw Error(ErrorKind::io, "write failed for " + (dir_ / name).string());
    std::lock_guard lock(mutex_);
    names_.push_back(name);
  }

  std::vector<ArtifactRecord> records() const {
    std::vector<ArtifactRecord> out;
    for (const auto& n : names_)
      out.push_back({n, sha256_file(dir_ / n), fs::file_size(dir_ / n)});
    return out;
  }

 private:
  fs::path dir_;
  std::vector<std::string> names_;
  std::mutex mutex_;
};

std::uint64_t neel_index(int n, bool first_up) {
  std::uint64_t idx = 0;
  for (int ion = 0; ion < n; ++ion)
    if ((ion % 2 == 0) == first_up) idx |= std::uint64_t{1} << bit_of_ion(ion, n);
  return idx;
}

double neel_population(const ProbabilityDistribution& d) {
  return d.values[neel_index(d.n_spins, true)] + d.values[neel_index(d.n_spins, false)];
}

struct Measured {
  ProbabilityDistribution ideal;
  SampleSet samples;  // after the detection channel
  ProbabilityDistribution observed;
  ProbabilityDistribution deconvolved;
};

Measured measure(const StateVector& state, Axis basis, const RunConfig& cfg, std::uint64_t stream) {
  Measured m;
  m.ideal = ProbabilityDistribution::from_state(state, basis);
  const SampleSet clean = sample(state, cfg.shots, stream_seed(*cfg.seed, 2 * stream), basis);
  m.samples = apply_detection_error(clean, cfg.detection, stream_seed(*cfg.seed, 2 * stream + 1));
  m.observed = ProbabilityDistribution::from_samples(m.samples);
  m.deconvolved = deconvolve(m.observed, cfg.detection);
  return m;
}

std::string samples_text(const SampleSet& s) {
  std::ostringstream out;
  write_sample_set_csv(out, s);
  return out.str();
}

std::string tidy_text(const std::vector<ObservableRow>& rows) {
  std::ostringstream out;
  write_tidy_csv(out, rows);
  return out.str();
}

double resolve_tau(const RunConfig& cfg, double j0) {
  return cfg.tau_ms ? *cfg.tau_ms : *cfg.tau_j0 / j0;
}

StepControl step_control(const RunConfig& cfg) {
  StepControl c;
  c.steps_per_tau = cfg.steps_per_tau;
  return c;
}

std::string summary_csv(const std::vector<std::pair<std::string, std::string>>& fields) {
  std::string header, row;
  for (const auto& [k, v] : fields) {
    header += (header.empty() ? "" : ",") + k;
    row += (row.empty() ? "" : ",") + v;
  }
  return header + "\n" + row + "\n";
}

// Order parameters of one x-basis distribution, as tidy rows and summary JSON.
std::vector<ObservableRow> order_rows(const ProbabilityDistribution& d, const CouplingMatrix& j,
                                      json& summary) {
  const auto ms = staggered_magnetization(d);
  const auto binder = binder_cumulant(d);
  const auto profile = correlations(d);
  const auto sf = structure_function(profile);
  const auto energy = energy_distribution(d, j);
  std::vector<ObservableRow> rows;
  rows.push_back({"staggered_magnetization_per_shot", 0.0, ms.per_shot_mean, std::nullopt});
  rows.push_back({"staggered_magnetization_of_means", 0.0, ms.of_expectations, std::nullopt});
  rows.push_back({"binder_raw", 0.0, binder.raw, std::nullopt});
  rows.push_back({"binder_scaled", 0.0, binder.scaled, std::nullopt});
  rows.push_back({"neel_population", 0.0, neel_population(d), std::nullopt});
  for (auto* part : {&profile}) {
    auto r = tidy_rows(*part);
    rows.insert(rows.end(), r.begin(), r.end());
  }
  auto r1 = tidy_rows(sf);
  rows.insert(rows.end(), r1.begin(), r1.end());
  auto r2 = tidy_rows(energy);
  rows.insert(rows.end(), r2.begin(), r2.end());

  summary["staggered_magnetization"] = ms.per_shot_mean;
  summary["binder_scaled"] = binder.scaled;
  summary["neel_population"] = neel_population(d);
  summary["S_pi"] = sf.s_values.back();
  summary["C_1"] = profile.averaged.empty() ? 0.0 : profile.averaged.front();
  summary["correlation_length"] =
      profile.correlation_length ? json(*profile.correlation_length) : json(nullptr);
  summary["entropy_per_particle"] = energy.entropy_per_particle;
  summary["negative_entries"] = d.negative_count();
  return rows;
}

json run_quench(const RunConfig& cfg, const CouplingMatrix& j, Outputs& out) {
  const int n = j.n();
  const double j0 = j.mean_nearest_neighbor;
  const double tau = resolve_tau(cfg, j0);
  const auto schedule = RampSchedule::exponential(j0, tau, cfg.b_initial, cfg.total_duration_ms.value_or(0.0));
  const auto traj = evolve(prepare_initial_state(n, cfg.initial_state), j, schedule, step_control(cfg), cfg.sign);
  const auto m = measure(traj.final_state().state, Axis::x, cfg, 0);

  json summary;
  summary["tau_ms"] = tau;
  summary["total_duration_ms"] = schedule.total_duration_ms;
  summary["final_field_over_j0"] = traj.final_state().field_khz / j0;
  summary["steps"] = traj.steps;
  summary["max_norm_drift"] = traj.max_norm_drift;
  out.write("observables_ideal.csv", tidy_text(order_rows(m.ideal, j, summary["ideal"])));
  out.write("observables_deconvolved.csv", tidy_text(order_rows(m.deconvolved, j, summary["deconvolved"])));
  out.write("samples_x.csv", samples_text(m.samples));
  out.write("samples_x.json", sample_set_metadata_json(m.samples));

  std::ostringstream pairs;
  pairs << std::setprecision(17) << "source,i,j,C\n";
  for (const auto* d : {&m.ideal, &m.deconvolved}) {
    const auto c = correlations(*d);
    const char* label = d == &m.ideal ? "ideal" : "deconvolved";
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) pairs << label << ',' << a + 1 << ',' << b + 1 << ',' << c.pair_matrix(a, b) << '\n';
  }
  out.write("correlations_pairs.csv", pairs.str());

  if (cfg.diagnose_adiabaticity) {
    GapOptions g;
    g.sign = cfg.sign;
    g.workers = cfg.workers;
    const auto scan = critical_gap_scan(j, default_b_grid(cfg.grid_points, cfg.b_min, cfg.b_max), g);
    const auto report = adiabaticity_diagnostic(schedule, scan);
    summary["adiabaticity"] = {{"ramp_rate_khz", report.ramp_rate_khz},
                               {"critical_gap_khz", report.critical_gap_khz},
                               {"ratio", report.ratio},
                               {"label", report.label}};
  }

  out.write("summary.csv",
            summary_csv({{"alpha", number(j.fitted_alpha)},
                         {"j0_khz", number(j0)},
                         {"tau_ms", number(tau)},
                         {"neel_population_ideal", number(summary["ideal"]["neel_population"])},
                         {"neel_population_deconvolved", number(summary["deconvolved"]["neel_population"])},
                         {"S_pi_ideal", number(summary["ideal"]["S_pi"])},
                         {"S_pi_deconvolved", number(summary["deconvolved"]["S_pi"])},
                         {"entropy_ideal", number(summary["ideal"]["entropy_per_particle"])},
                         {"entropy_deconvolved", number(summary["deconvolved"]["entropy_per_particle"])}}));
  return summary;
}

json run_reversal(const RunConfig& cfg, const CouplingMatrix& j, Outputs& out) {
  const int n = j.n();
  const double j0 = j.mean_nearest_neighbor;
  const double tau = resolve_tau(cfg, j0);
  const auto schedule = RampSchedule::reversal(j0, tau, cfg.b_initial, cfg.total_duration_ms.value_or(0.0));
  const auto traj = evolve(prepare_initial_state(n, cfg.initial_state), j, schedule, step_control(cfg), cfg.sign);

  json summary;
  summary["tau_ms"] = tau;
  summary["total_duration_ms"] = schedule.total_duration_ms;
  std::vector<ObservableRow> rows;
  std::uint64_t stream = 0;
  for (const auto* label : {"initial", "turnaround", "final"}) {
    const auto& snap = traj.at_label(label);
    const auto m = measure(snap.state, Axis::y, cfg, stream++);
    const auto ideal = transverse_magnetization_histogram(m.ideal);
    const auto degraded = transverse_magnetization_histogram(apply_detection_error(m.ideal, cfg.detection));
    const auto measured = transverse_magnetization_histogram(m.observed);
    for (const auto& [tag, h] : {std::pair{"ideal", &ideal}, {"channel", &degraded}, {"sampled", &measured}}) {
      for (auto row : tidy_rows(*h)) {
        row.quantity += std::string("_") + label + "_" + tag;
        rows.push_back(row);
      }
      summary[label][tag] = h->mean_fraction;
    }
    if (std::string(label) == "final") {
      out.write("samples_y_final.csv", samples_text(m.samples));
      out.write("samples_y_final.json", sample_set_metadata_json(m.samples));
    }
  }
  for (const auto* tag : {"ideal", "channel", "sampled"}) {
    const double initial = summary["initial"][tag];
    summary["recovered_fraction"][tag] = initial != 0.0 ? double(summary["final"][tag]) / initial : 0.0;
  }
  out.write("sy_histograms.csv", tidy_text(rows));
  out.write("summary.csv",
            summary_csv({{"alpha", number(j.fitted_alpha)},
                         {"tau_ms", number(tau)},
                         {"recovered_ideal", number(summary["recovered_fraction"]["ideal"])},
                         {"recovered_channel", number(summary["recovered_fraction"]["channel"])},
                         {"recovered_sampled", number(summary["recovered_fraction"]["sampled"])}}));
  return summary;
}

json run_ramp_sweep(const RunConfig& cfg, const CouplingMatrix& j, Outputs& out) {
  const int n = j.n();
  const double j0 = j.mean_nearest_neighbor;
  struct Row {
    double tau, duration, raw, scaled, scaled_deconvolved, staggered;
  };
  std::vector<Row> rows(cfg.ramp_taus_ms.size());
  detail::parallel_for(rows.size(), cfg.workers, [&](std::size_t i) {
    const double tau = cfg.ramp_taus_ms[i];
    const auto schedule = RampSchedule::exponential(j0, tau, cfg.b_initial);
    const auto traj = evolve(prepare_initial_state(n, cfg.initial_state), j, schedule, step_control(cfg), cfg.sign);
    const auto m = measure(traj.final_state().state, Axis::x, cfg, i);
    const auto ideal = binder_cumulant(m.ideal);
    const auto measured = binder_cumulant(m.deconvolved);
    rows[i] = {tau, schedule.total_duration_ms, ideal.raw, ideal.scaled, measured.scaled,
               staggered_magnetization(m.ideal).per_shot_mean};
  });
  std::ostringstream csv;
  csv << std::setprecision(17)
      << "tau_ms,duration_ms,binder_raw_ideal,binder_scaled_ideal,binder_scaled_deconvolved,staggered_ideal\n";
  json summary = json::array();
  for (const auto& r : rows) {
    csv << r.tau << ',' << r.duration << ',' << r.raw << ',' << r.scaled << ',' << r.scaled_deconvolved << ','
        << r.staggered << '\n';
    summary.push_back({{"tau_ms", r.tau}, {"duration_ms", r.duration}, {"binder_scaled_ideal", r.scaled},
                       {"binder_scaled_deconvolved", r.scaled_deconvolved}});
  }
  out.write("rampsweep.csv", csv.str());
  out.write("summary.csv", csv.str());
  return json{{"rows", summary}};
}

json run_fm(const RunConfig& cfg, const CouplingMatrix& j, Outputs& out) {
  const int n = j.n();
  const double j0 = j.mean_nearest_neighbor;
  const double tau = resolve_tau(cfg, j0);
  const auto schedule = RampSchedule::exponential(j0, tau, cfg.b_initial, cfg.total_duration_ms.value_or(0.0));
  const auto control = step_control(cfg);

  // Ferromagnetic order is reached from the top of the antiferromagnetic
  // spectrum; the sign-flipped model started from +y must agree.
  const auto afm = evolve(prepare_initial_state(n, Direction::plus_y), j, schedule, control,
                          CouplingSign::antiferromagnetic);
  const auto fm = evolve(prepare_initial_state(n, Direction::minus_y), j, schedule, control,
                         CouplingSign::antiferromagnetic);
  const auto fm_check = evolve(prepare_initial_state(n, Direction::plus_y), j, schedule, control,
                               CouplingSign::ferromagnetic);

  const auto m_afm = measure(afm.final_state().state, Axis::x, cfg, 0);
  const auto m_fm = measure(fm.final_state().state, Axis::x, cfg, 1);
  const auto check = ProbabilityDistribution::from_state(fm_check.final_state().state, Axis::x);

  json summary;
  summary["tau_ms"] = tau;
  summary["afm_staggered_ideal"] = staggered_magnetization(m_afm.ideal).per_shot_mean;
  summary["afm_staggered_deconvolved"] = staggered_magnetization(m_afm.deconvolved).per_shot_mean;
  summary["fm_magnetization_ideal"] = uniform_magnetization(m_fm.ideal).per_shot_mean;
  summary["fm_magnetization_deconvolved"] = uniform_magnetization(m_fm.deconvolved).per_shot_mean;
  summary["fm_sign_flip_magnetization"] = uniform_magnetization(check).per_shot_mean;

  std::vector<ObservableRow> rows;
  for (const auto& [tag, d] : {std::pair{"fm_ideal", &m_fm.ideal}, {"fm_deconvolved", &m_fm.deconvolved},
                               {"afm_ideal", &m_afm.ideal}}) {
    for (auto row : tidy_rows(magnetization_histogram(*d))) {
      row.quantity = std::string(tag) + "_" + (row.quantity == "P_Sy" ? "P_Sx" : "Sx_mean_fraction");
      rows.push_back(row);
    }
  }
  out.write("magnetization_histograms.csv", tidy_text(rows));
  out.write("samples_x_fm.csv", samples_text(m_fm.samples));
  out.write("samples_x_afm.csv", samples_text(m_afm.samples));
  out.write("summary.csv",
            summary_csv({{"alpha", number(j.fitted_alpha)},
                         {"tau_ms", number(tau)},
                         {"fm_magnetization_ideal", number(summary["fm_magnetization_ideal"])},
                         {"afm_staggered_ideal", number(summary["afm_staggered_ideal"])},
                         {"fm_magnetization_deconvolved", number(summary["fm_magnetization_deconvolved"])},
                         {"afm_staggered_deconvolved", number(summary["afm_staggered_deconvolved"])}}));
  return summary;
}

json run_spectrum(const RunConfig& cfg, const CouplingMatrix& base, Outputs& out) {
  std::vector<std::pair<double, CouplingMatrix>> cases;
  if (cfg.alphas.empty()) {
    cases.emplace_back(base.fitted_alpha, base);
  } else {
    for (double a : cfg.alphas)
      cases.emplace_back(a, synthetic_power_law(cfg.couplings.n, cfg.couplings.j0_khz, a));
  }
  const auto grid = default_b_grid(cfg.grid_points, cfg.b_min, cfg.b_max);
  GapOptions options;
  options.sign = cfg.sign;
  options.workers = cfg.workers;
  if (cfg.seed) options.seed = *cfg.seed;

  std::ostringstream table;
  table << std::setprecision(17) << "alpha,n,j0_khz,b_c_over_j0,delta_c_over_j0\n";
  json summary = json::array();
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto scan = critical_gap_scan(cases[i].second, grid, options);
    std::ostringstream csv;
    write_scan_csv(csv, scan);
    out.write(cases.size() == 1 ? std::string("scan.csv") : "scan_" + std::to_string(i) + ".csv", csv.str());
    table << cases[i].first << ',' << scan.n_spins << ',' << scan.j0_khz << ',' << scan.critical_field << ','
          << scan.critical_gap << '\n';
    auto s = json::parse(scan_summary_json(scan));
    s["alpha"] = cases[i].first;
    summary.push_back(s);
  }
  out.write("critical.csv", table.str());
  out.write("summary.csv", table.str());
  return json{{"scans", summary}};
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

json manifest_json(const RunManifest& m, const std::string& started) {
  json files = json::array();
  for (const auto& f : m.files) files.push_back({{"name", f.name}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  return {{"version", m.version},
          {"mode", m.mode},
          {"started_at", started},
          {"wall_seconds", m.wall_seconds},
          {"config", json::parse(m.config_json)},
          {"config_digest", m.config_digest},
          {"couplings_sha256", m.couplings_sha256},
          {"integrator", {{"scheme", "commutator-free Magnus, order 4"}, {"exponential", "Lanczos-Krylov"}}},
          {"summary", json::parse(m.summary_json)},
          {"files", files}};
}

bool completed_run(const fs::path& dir, const std::string& digest) {
  std::ifstream in(dir / "manifest.json");
  if (!in) return false;
  try {
    const json m = json::parse(in);
    if (m.at("config_digest").get<std::string>() != digest) return false;
    for (const auto& f : m.at("files"))
      if (sha256_file(dir / f.at("name").get<std::string>()) != f.at("sha256").get<std::string>()) return false;
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace

std::string library_version() { return TFIM_VERSION; }

void check_resources(const RunConfig& config) {
  const int n = config.couplings.n_spins();
  if (n > config.max_spins && !config.allow_large) {
    std::ostringstream msg;
    msg << "N=" << n << " exceeds limits.max_spins=" << config.max_spins
        << "; set limits.allow_large to run anyway";
    throw Error(ErrorKind::resource_guard, msg.str());
  }
}

RunManifest run(const RunConfig& config) {
  const auto problems = config_problems(config);
  if (!problems.empty()) {
    std::string msg;
    for (const auto& p : problems) msg += (msg.empty() ? "" : "; ") + p;
    throw Error(ErrorKind::config, msg);
  }
  check_resources(config);

  const auto t0 = std::chrono::steady_clock::now();
  const std::string started = utc_now();
  Outputs out(config.output_dir);

  const CouplingMatrix j = build_couplings(config.couplings);
  if (config.mode != RunMode::spectrum_scan || config.alphas.empty()) {
    if (!(j.mean_nearest_neighbor > 0.0))
      throw Error(ErrorKind::invalid_argument, "couplings need a positive mean nearest-neighbour value");
  }
  {
    std::ostringstream csv;
    write_couplings_csv(csv, j);
    out.write("couplings.csv", csv.str());
  }

  json summary;
  switch (config.mode) {
    case RunMode::spectrum_scan: summary = run_spectrum(config, j, out); break;
    case RunMode::quench: summary = run_quench(config, j, out); break;
    case RunMode::coherence_reversal: summary = run_reversal(config, j, out); break;
    case RunMode::ramp_speed_sweep: summary = run_ramp_sweep(config, j, out); break;
    case RunMode::fm_comparison: summary = run_fm(config, j, out); break;
  }
  summary["n_spins"] = j.n();
  summary["j0_khz"] = j.mean_nearest_neighbor;
  summary["fitted_alpha"] = j.fitted_alpha;

  RunManifest m;
  m.version = library_version();
  m.mode = std::string(to_string(config.mode));
  m.config_json = to_json(config);
  m.config_digest = sha256_hex(m.config_json);
  m.couplings_sha256 = couplings_digest(j);
  m.summary_json = summary.dump();
  m.files = out.records();
  m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::ofstream mf(config.output_dir / "manifest.json", std::ios::trunc);
  mf << manifest_json(m, started).dump(2) << '\n';
  if (!mf) throw Error(ErrorKind::io, "cannot write manifest.json");
  return m;
}

std::size_t SweepReport::failures() const {
  return static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(), [](const SweepEntry& e) { return e.status == "failed"; }));
}

SweepReport sweep(const std::vector<RunConfig>& configs, const fs::path& root, int workers) {
  for (const auto& c : configs)
    if (c.mode != configs.front().mode)
      throw Error(ErrorKind::config, "a sweep must use a single mode");
  fs::create_directories(root);

  SweepReport report;
  report.entries.resize(configs.size());
  detail::parallel_for(configs.size(), workers, [&](std::size_t i) {
    RunConfig c = configs[i];
    std::ostringstream name;
    name << "run_" << std::setw(3) << std::setfill('0') << i;
    c.output_dir = root / name.str();
    if (workers != 1) c.workers = 1;
    SweepEntry& e = report.entries[i];
    e.index = i;
    e.output_dir = c.output_dir;
    try {
      if (completed_run(c.output_dir, sha256_hex(to_json(c)))) {
        e.status = "skipped";
        return;
      }
      run(c);
      e.status = "ok";
    } catch (const Error& err) {
      e.status = "failed";
      e.error_kind = std::string(to_string(err.kind()));
      e.message = err.what();
    } catch (const std::exception& err) {
      e.status = "failed";
      e.error_kind = "internal";
      e.message = err.what();
    }
  });

  std::string header;
  std::ostringstream merged;
  for (const auto& e : report.entries) {
    if (e.status == "failed") continue;
    std::ifstream in(e.output_dir / "summary.csv");
    std::string line;
    if (!std::getline(in, line)) continue;
    if (header.empty()) {
      header = line;
      merged << "run," << header << '\n';
    }
    if (line != header) continue;
    while (std::getline(in, line))
      if (!line.empty()) merged << e.index << ',' << line << '\n';
  }
  if (!header.empty()) {
    report.combined_csv = root / "combined.csv";
    std::ofstream(report.combined_csv, std::ios::trunc) << merged.str();
  }

  json entries = json::array();
  for (const auto& e : report.entries)
    entries.push_back({{"index", e.index},
                       {"status", e.status},
                       {"error", e.error_kind},
                       {"message", e.message},
                       {"output_dir", e.output_dir.string()}});
  std::ofstream(root / "sweep_report.json", std::ios::trunc)
      << json{{"entries", entries}, {"failures", report.failures()}}.dump(2) << '\n';
  return report;
}

DeconvolutionReport deconvolve_sample_file(const fs::path& samples_csv, const DetectionChannel& channel,
                                           const fs::path& out_dir) {
  channel.validate();
  const SampleSet samples = read_sample_set_csv(samples_csv);
  if (samples.n_spins > 24) throw Error(ErrorKind::resource_guard, "deconvolution is limited to 24 spins");
  const auto observed = ProbabilityDistribution::from_samples(samples);
  const auto result = deconvolve(observed, channel);

  Outputs out(out_dir);
  std::ostringstream csv;
  csv << std::setprecision(17) << "basis,bitstring,observed,deconvolved\n";
  for (std::size_t i = 0; i < result.values.size(); ++i) {
    if (observed.values[i] == 0.0 && result.values[i] == 0.0) continue;
    csv << axis_name(samples.basis) << ',' << to_bitstring(i, samples.n_spins) << ',' << observed.values[i] << ','
        << result.values[i] << '\n';
  }
  out.write("deconvolved.csv", csv.str());

  DeconvolutionReport report;
  report.negative_entries = result.negative_count();
  report.min_value = result.min_value();
  report.total = result.total();
  const json meta{{"source", samples_csv.string()},
                  {"shots", samples.total_shots},
                  {"n_spins", samples.n_spins},
                  {"basis", std::string(1, axis_name(samples.basis))},
                  {"epsilon_dark", channel.epsilon_dark},
                  {"epsilon_bright", channel.epsilon_bright},
                  {"negative_entries", report.negative_entries},
                  {"min_value", report.min_value},
                  {"total", report.total}};
  out.write("deconvolved.json", meta.dump(2) + "\n");
  report.files = out.records();
  return report;
}

}  // namespace tfim
