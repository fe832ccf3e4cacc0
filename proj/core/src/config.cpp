#include "tfim/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <type_traits>

#include <json.hpp>

#include "tfim/error.hpp"

namespace tfim {
namespace {

using nlohmann::json;

constexpr std::string_view kModeNames[] = {"spectrum_scan", "quench", "coherence_reversal",
                                           "ramp_speed_sweep", "fm_comparison"};

// Reads typed fields from one JSON object, recording problems instead of
// throwing so that every mistake is reported at once.
class Reader {
 public:
  Reader(const json& obj, std::string prefix, std::vector<std::string>& problems)
      : obj_(obj), prefix_(std::move(prefix)), problems_(problems) {
    if (!obj_.is_object()) problem("", "must be an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return obj_.is_object() && obj_.contains(key) && !obj_.at(key).is_null();
  }

  template <class T>
  void get(const std::string& key, T& out) {
    if (!has(key)) return;
    convert(key, obj_.at(key), out);
  }

  template <class T>
  void get(const std::string& key, std::optional<T>& out) {
    if (!has(key)) return;
    T value{};
    if (convert(key, obj_.at(key), value)) out = value;
  }

  const json* child(const std::string& key) {
    if (!has(key)) return nullptr;
    return &obj_.at(key);
  }

  void problem(const std::string& key, const std::string& what) {
    problems_.push_back(prefix_ + key + " " + what);
  }

  void reject_unknown() {
    if (!obj_.is_object()) return;
    for (const auto& [key, value] : obj_.items())
      if (!seen_.count(key)) problem(key, "is not a recognised key");
  }

 private:
  // Integer fields must hold whole numbers, and unsigned ones non-negative.
  template <class T>
  bool convert(const std::string& key, const json& v, T& out) {
    if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
      if (!v.is_number_integer()) {
        problem(key, "must be an integer");
        return false;
      }
      if constexpr (std::is_unsigned_v<T>) {
        if (!v.is_number_unsigned()) {
          problem(key, "must not be negative");
          return false;
        }
      }
    }
    try {
      out = v.get<T>();
      return true;
    } catch (const json::exception&) {
      problem(key, "has the wrong type");
      return false;
    }
  }

  const json& obj_;
  std::string prefix_;
  std::vector<std::string>& problems_;
  std::set<std::string> seen_;
};

void read_couplings(const json& j, CouplingSource& src, std::vector<std::string>& problems) {
  Reader r(j, "couplings.", problems);
  std::string source = "synthetic";
  r.get("source", source);
  if (source == "physical") {
    src.kind = CouplingSource::Kind::physical;
    double axial = src.trap.axial_khz / 1e3, com = src.trap.transverse_com_khz / 1e3;
    r.get("n_ions", src.trap.n_ions);
    r.get("axial_mhz", axial);
    r.get("transverse_com_mhz", com);
    r.get("recoil_khz", src.trap.recoil_khz);
    src.trap.axial_khz = axial * 1e3;
    src.trap.transverse_com_khz = com * 1e3;
    r.get("rabi_khz", src.drive.rabi_khz);
    std::string rule = "com_plus_3_eta_omega";
    r.get("detuning_rule", rule);
    if (rule == "com_plus_3_eta_omega") {
      src.drive.detuning_rule = DetuningRule::com_plus_3_eta_omega;
    } else if (rule == "explicit") {
      src.drive.detuning_rule = DetuningRule::explicit_value;
    } else {
      r.problem("detuning_rule", "must be 'explicit' or 'com_plus_3_eta_omega'");
    }
    std::optional<double> detuning_mhz;
    r.get("detuning_mhz", detuning_mhz);
    if (detuning_mhz) src.drive.detuning_khz = *detuning_mhz * 1e3;
    r.get("resonance_guard_khz", src.drive.resonance_guard_khz);
    r.get("target_alpha", src.target_alpha);
    std::vector<double> search;
    r.get("search_mhz", search);
    if (!search.empty()) {
      if (search.size() != 2 || !(search[0] < search[1]))
        r.problem("search_mhz", "must be [lo, hi] with lo < hi");
      else {
        src.search_lo_mhz = search[0];
        src.search_hi_mhz = search[1];
      }
    }
  } else if (source == "synthetic") {
    src.kind = CouplingSource::Kind::synthetic;
    r.get("n", src.n);
    r.get("j0_khz", src.j0_khz);
    r.get("alpha", src.alpha);
  } else if (source == "file") {
    src.kind = CouplingSource::Kind::file;
    std::string path;
    r.get("path", path);
    src.path = path;
  } else {
    r.problem("source", "must be 'physical', 'synthetic' or 'file'");
  }
  r.reject_unknown();
}

RunConfig from_json(const json& j, std::vector<std::string>& problems) {
  RunConfig c;
  Reader r(j, "", problems);
  std::string mode = "quench";
  r.get("mode", mode);
  try {
    c.mode = parse_run_mode(mode);
  } catch (const Error& e) {
    problems.push_back(e.what());
  }
  r.get("seed", c.seed);
  std::string out = c.output_dir.string();
  r.get("output_dir", out);
  c.output_dir = out;
  if (const json* cj = r.child("couplings"))
    read_couplings(*cj, c.couplings, problems);
  else
    problems.push_back("couplings section is required");

  std::string sign = "afm";
  r.get("sign", sign);
  if (sign == "afm")
    c.sign = CouplingSign::antiferromagnetic;
  else if (sign == "fm")
    c.sign = CouplingSign::ferromagnetic;
  else
    r.problem("sign", "must be 'afm' or 'fm'");

  if (const json* sj = r.child("schedule")) {
    Reader s(*sj, "schedule.", problems);
    s.get("b_initial", c.b_initial);
    s.get("tau_ms", c.tau_ms);
    s.get("tau_j0", c.tau_j0);
    s.get("total_duration_ms", c.total_duration_ms);
    s.get("steps_per_tau", c.steps_per_tau);
    s.reject_unknown();
  }

  std::string initial = "plus_y";
  r.get("initial_state", initial);
  if (initial == "plus_y")
    c.initial_state = Direction::plus_y;
  else if (initial == "minus_y")
    c.initial_state = Direction::minus_y;
  else
    r.problem("initial_state", "must be 'plus_y' or 'minus_y'");

  r.get("shots", c.shots);
  if (const json* dj = r.child("detection")) {
    Reader d(*dj, "detection.", problems);
    std::optional<double> eps, dark, bright;
    d.get("epsilon", eps);
    d.get("epsilon_dark", dark);
    d.get("epsilon_bright", bright);
    if (eps && (dark || bright)) d.problem("epsilon", "cannot be combined with epsilon_dark/epsilon_bright");
    if (eps) c.detection = DetectionChannel::symmetric(*eps);
    if (dark || bright) {
      if (!(dark && bright)) d.problem("epsilon_dark", "and epsilon_bright must be given together");
      c.detection = {dark.value_or(1.0), bright.value_or(1.0)};
    }
    d.reject_unknown();
  }

  if (const json* sj = r.child("spectrum")) {
    Reader s(*sj, "spectrum.", problems);
    s.get("points", c.grid_points);
    s.get("b_min", c.b_min);
    s.get("b_max", c.b_max);
    s.get("alphas", c.alphas);
    s.get("diagnose_adiabaticity", c.diagnose_adiabaticity);
    s.reject_unknown();
  }
  if (const json* rj = r.child("ramp_sweep")) {
    Reader s(*rj, "ramp_sweep.", problems);
    s.get("tau_ms", c.ramp_taus_ms);
    s.reject_unknown();
  }
  if (const json* lj = r.child("limits")) {
    Reader s(*lj, "limits.", problems);
    s.get("max_spins", c.max_spins);
    s.get("allow_large", c.allow_large);
    s.reject_unknown();
  }
  r.get("workers", c.workers);
  r.reject_unknown();
  return c;
}

json couplings_json(const CouplingSource& s) {
  json j;
  switch (s.kind) {
    case CouplingSource::Kind::physical:
      j["source"] = "physical";
      j["n_ions"] = s.trap.n_ions;
      j["axial_mhz"] = s.trap.axial_khz / 1e3;
      j["transverse_com_mhz"] = s.trap.transverse_com_khz / 1e3;
      j["recoil_khz"] = s.trap.recoil_khz;
      j["rabi_khz"] = s.drive.rabi_khz;
      j["detuning_rule"] =
          s.drive.detuning_rule == DetuningRule::explicit_value ? "explicit" : "com_plus_3_eta_omega";
      j["detuning_mhz"] = s.drive.detuning_rule == DetuningRule::explicit_value
                              ? json(s.drive.detuning_khz / 1e3)
                              : json(nullptr);
      j["resonance_guard_khz"] = s.drive.resonance_guard_khz;
      j["target_alpha"] = s.target_alpha ? json(*s.target_alpha) : json(nullptr);
      j["search_mhz"] = {s.search_lo_mhz, s.search_hi_mhz};
      break;
    case CouplingSource::Kind::synthetic:
      j["source"] = "synthetic";
      j["n"] = s.n;
      j["j0_khz"] = s.j0_khz;
      j["alpha"] = s.alpha;
      break;
    case CouplingSource::Kind::file:
      j["source"] = "file";
      j["path"] = s.path.string();
      break;
  }
  return j;
}

template <class T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

std::string_view to_string(RunMode mode) { return kModeNames[static_cast<int>(mode)]; }

RunMode parse_run_mode(std::string_view name) {
  for (int i = 0; i < 5; ++i)
    if (kModeNames[i] == name) return static_cast<RunMode>(i);
  throw Error(ErrorKind::config, "unknown mode '" + std::string(name) + "'");
}

int CouplingSource::n_spins() const {
  switch (kind) {
    case Kind::physical: return trap.n_ions;
    case Kind::synthetic: return n;
    case Kind::file: {
      std::ifstream in(path);
      std::string header;
      if (!in || !std::getline(in, header)) return 0;
      const auto pos = header.find("n=");
      if (pos == std::string::npos) return 0;
      try {
        return std::stoi(header.substr(pos + 2));
      } catch (const std::exception&) {
        return 0;
      }
    }
  }
  return 0;
}

std::vector<std::string> config_problems(const RunConfig& c) {
  std::vector<std::string> p;
  const bool samples = c.mode != RunMode::spectrum_scan;
  if (samples && !c.seed) p.push_back("seed is required for modes that sample measurements");
  if (c.output_dir.empty()) p.push_back("output_dir must not be empty");

  const auto& s = c.couplings;
  switch (s.kind) {
    case CouplingSource::Kind::physical:
      try {
        TrapParameters trap = s.trap;
        if (s.target_alpha) trap.axial_khz = std::min(s.search_lo_mhz * 1e3, trap.transverse_com_khz / 2);
        trap.validate();
        s.drive.validate();
      } catch (const Error& e) {
        p.push_back(std::string("couplings: ") + e.what());
      }
      if (s.target_alpha && !(*s.target_alpha > 0.0)) p.push_back("couplings.target_alpha must be positive");
      if (!(s.search_lo_mhz > 0.0)) p.push_back("couplings.search_mhz must be positive");
      break;
    case CouplingSource::Kind::synthetic:
      if (s.n < 2) p.push_back("couplings.n must be at least 2");
      if (!(s.j0_khz > 0.0)) p.push_back("couplings.j0_khz must be positive");
      if (!(s.alpha >= 0.0)) p.push_back("couplings.alpha must be >= 0");
      break;
    case CouplingSource::Kind::file:
      if (s.path.empty())
        p.push_back("couplings.path is required for a file source");
      else if (!std::filesystem::exists(s.path))
        p.push_back("couplings.path " + s.path.string() + " does not exist");
      break;
  }
  if (!c.alphas.empty() && s.kind != CouplingSource::Kind::synthetic)
    p.push_back("spectrum.alphas requires a synthetic coupling source");
  for (double a : c.alphas)
    if (!(a >= 0.0)) p.push_back("spectrum.alphas entries must be >= 0");

  const bool ramps = c.mode != RunMode::spectrum_scan;
  if (ramps) {
    if (c.mode == RunMode::ramp_speed_sweep) {
      if (c.ramp_taus_ms.empty()) p.push_back("ramp_sweep.tau_ms must list at least one time constant");
      for (double t : c.ramp_taus_ms)
        if (!(t > 0.0)) p.push_back("ramp_sweep.tau_ms entries must be positive");
      if (c.tau_ms || c.tau_j0) p.push_back("schedule.tau_ms/tau_j0 are not used by ramp_speed_sweep");
    } else {
      if (c.tau_ms.has_value() == c.tau_j0.has_value())
        p.push_back("schedule needs exactly one of tau_ms or tau_j0");
      if ((c.tau_ms && !(*c.tau_ms > 0.0)) || (c.tau_j0 && !(*c.tau_j0 > 0.0)))
        p.push_back("schedule time constant must be positive");
    }
    if (c.total_duration_ms && !(*c.total_duration_ms > 0.0))
      p.push_back("schedule.total_duration_ms must be positive");
    if (!(c.b_initial >= 0.0)) p.push_back("schedule.b_initial must be >= 0");
    if (c.steps_per_tau < 1) p.push_back("schedule.steps_per_tau must be >= 1");
    if (c.shots < 1) p.push_back("shots must be >= 1");
    try {
      c.detection.validate();
    } catch (const Error& e) {
      p.push_back(std::string("detection.epsilon: ") + e.what());
    }
  }
  if (c.mode == RunMode::spectrum_scan || c.diagnose_adiabaticity) {
    if (c.grid_points < 50) p.push_back("spectrum.points must be at least 50");
    if (!(c.b_min > 0.0) || c.b_min > 0.01) p.push_back("spectrum.b_min must lie in (0, 0.01]");
    if (c.b_max < 5.0) p.push_back("spectrum.b_max must be at least 5");
  }
  if (c.max_spins < 1) p.push_back("limits.max_spins must be positive");
  if (c.workers < 0) p.push_back("workers must be >= 0");
  return p;
}

RunConfig parse_run_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::config, std::string("config is not valid JSON: ") + e.what());
  }
  std::vector<std::string> problems;
  RunConfig c = from_json(j, problems);
  for (auto& p : config_problems(c)) problems.push_back(std::move(p));
  if (!problems.empty()) {
    std::string msg;
    for (const auto& p : problems) msg += (msg.empty() ? "" : "; ") + p;
    throw Error(ErrorKind::config, msg);
  }
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str());
}

std::vector<RunConfig> parse_run_configs(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::config, std::string("sweep file is not valid JSON: ") + e.what());
  }
  const json* runs = &j;
  if (j.is_object() && j.contains("runs")) runs = &j.at("runs");
  if (!runs->is_array()) throw Error(ErrorKind::config, "sweep file must be an array or {\"runs\": [...]}");
  std::vector<RunConfig> out;
  for (const auto& entry : *runs) out.push_back(parse_run_config(entry.dump()));
  return out;
}

std::string to_json(const RunConfig& c) {
  json j;
  j["mode"] = to_string(c.mode);
  j["seed"] = opt(c.seed);
  j["output_dir"] = c.output_dir.string();
  j["couplings"] = couplings_json(c.couplings);
  j["sign"] = c.sign == CouplingSign::antiferromagnetic ? "afm" : "fm";
  j["schedule"] = {{"b_initial", c.b_initial},
                   {"tau_ms", opt(c.tau_ms)},
                   {"tau_j0", opt(c.tau_j0)},
                   {"total_duration_ms", opt(c.total_duration_ms)},
                   {"steps_per_tau", c.steps_per_tau}};
  j["initial_state"] = c.initial_state == Direction::plus_y ? "plus_y" : "minus_y";
  j["shots"] = c.shots;
  j["detection"] = {{"epsilon_dark", c.detection.epsilon_dark},
                    {"epsilon_bright", c.detection.epsilon_bright}};
  j["spectrum"] = {{"points", c.grid_points},
                   {"b_min", c.b_min},
                   {"b_max", c.b_max},
                   {"alphas", c.alphas},
                   {"diagnose_adiabaticity", c.diagnose_adiabaticity}};
  j["ramp_sweep"] = {{"tau_ms", c.ramp_taus_ms}};
  j["limits"] = {{"max_spins", c.max_spins}, {"allow_large", c.allow_large}};
  j["workers"] = c.workers;
  return j.dump(2);
}

CouplingMatrix build_couplings(const CouplingSource& s) {
  switch (s.kind) {
    case CouplingSource::Kind::physical: {
      TrapParameters trap = s.trap;
      if (s.target_alpha)
        trap.axial_khz = axial_frequency_for_alpha(*s.target_alpha, trap, s.drive, s.search_lo_mhz * 1e3,
                                                   s.search_hi_mhz * 1e3);
      return physical_couplings(trap, s.drive);
    }
    case CouplingSource::Kind::synthetic:
      return synthetic_power_law(s.n, s.j0_khz, s.alpha);
    case CouplingSource::Kind::file:
      return read_couplings_csv(s.path);
  }
  throw Error(ErrorKind::config, "unknown coupling source");
}

}  // namespace tfim
