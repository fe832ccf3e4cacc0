#include "tfim/couplings.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "tfim/error.hpp"

namespace tfim {

double DriveParameters::beatnote_detuning_khz(const TrapParameters& trap) const {
  if (detuning_rule == DetuningRule::explicit_value) return detuning_khz;
  const double eta = std::sqrt(trap.recoil_khz / trap.transverse_com_khz);
  return trap.transverse_com_khz + 3.0 * eta * rabi_khz;
}

void DriveParameters::validate() const {
  if (!(rabi_khz > 0.0)) throw Error(ErrorKind::invalid_argument, "Rabi frequency must be positive");
  if (detuning_rule == DetuningRule::explicit_value && !(detuning_khz > 0.0))
    throw Error(ErrorKind::invalid_argument, "explicit detuning must be positive");
  if (!(resonance_guard_khz >= 0.0))
    throw Error(ErrorKind::invalid_argument, "resonance guard must be non-negative");
}

CouplingMatrix ising_couplings(const ChainGeometry& chain, const TrapParameters& trap,
                               const DriveParameters& drive,
                               const std::vector<int>& retained_modes) {
  drive.validate();
  const int n = chain.n_ions();
  if (chain.mode_vectors.rows() != n || chain.mode_vectors.cols() != n ||
      static_cast<int>(chain.mode_freqs_khz.size()) != n)
    throw Error(ErrorKind::dimension_mismatch, "chain geometry is inconsistent");

  std::vector<int> modes = retained_modes;
  if (modes.empty())
    for (int m = 0; m < n; ++m) modes.push_back(m);

  const double mu = drive.beatnote_detuning_khz(trap);
  const double prefactor = drive.rabi_khz * drive.rabi_khz * trap.recoil_khz;

  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  for (int m : modes) {
    if (m < 0 || m >= n) throw Error(ErrorKind::invalid_argument, "mode index out of range");
    const double nu = chain.mode_freqs_khz[m];
    if (std::abs(mu - nu) < drive.resonance_guard_khz) {
      std::ostringstream msg;
      msg << "sideband resonance: detuning " << mu << " kHz is within "
          << drive.resonance_guard_khz << " kHz of mode " << m << " at " << nu << " kHz";
      throw Error(ErrorKind::sideband_resonance, msg.str());
    }
    const Eigen::VectorXd b = chain.mode_vectors.col(m);
    j.noalias() += (prefactor / (mu * mu - nu * nu)) * (b * b.transpose());
  }
  j.diagonal().setZero();
  // Symmetrize exactly; the outer products agree only to rounding.
  const Eigen::MatrixXd sym = 0.5 * (j + j.transpose());
  return characterize(sym);
}

PowerLawFit fit_power_law(const Eigen::MatrixXd& couplings) {
  const auto n = couplings.rows();
  if (n < 3) throw Error(ErrorKind::invalid_argument, "power-law fit needs N >= 3");

  PowerLawFit fit;
  fit.mean_by_separation.resize(n - 1);
  for (Eigen::Index r = 1; r < n; ++r) {
    double sum = 0.0;
    for (Eigen::Index m = 0; m + r < n; ++m) sum += couplings(m, m + r);
    const double mean = sum / static_cast<double>(n - r);
    if (!(mean > 0.0)) {
      std::ostringstream msg;
      msg << "mean coupling at separation " << r << " is not positive (" << mean << ")";
      throw Error(ErrorKind::undefined_fit, msg.str());
    }
    fit.mean_by_separation[r - 1] = mean;
  }

  // Weighted least squares on (log r, log J̄(r)).
  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (Eigen::Index r = 1; r < n; ++r) {
    const double w = static_cast<double>(n - r);
    const double x = std::log(static_cast<double>(r));
    const double y = std::log(fit.mean_by_separation[r - 1]);
    sw += w;
    sx += w * x;
    sy += w * y;
    sxx += w * x * x;
    sxy += w * x * y;
  }
  const double xbar = sx / sw;
  const double ybar = sy / sw;
  const double slope = (sxy - sw * xbar * ybar) / (sxx - sw * xbar * xbar);
  const double intercept = ybar - slope * xbar;
  fit.alpha = -slope;
  fit.j0 = std::exp(intercept);

  double ss = 0.0;
  for (Eigen::Index r = 1; r < n; ++r) {
    const double w = static_cast<double>(n - r);
    const double resid = std::log(fit.mean_by_separation[r - 1]) -
                         (intercept + slope * std::log(static_cast<double>(r)));
    ss += w * resid * resid;
  }
  fit.residual = std::sqrt(ss / sw);
  return fit;
}

double interaction_range(double alpha) {
  if (!(alpha > 0.0))
    throw Error(ErrorKind::invalid_argument, "interaction range diverges for alpha <= 0");
  return std::pow(5.0, 1.0 / alpha);
}

CouplingMatrix synthetic_power_law(int n, double j0_khz, double alpha) {
  if (n < 2) throw Error(ErrorKind::invalid_argument, "need at least 2 spins");
  if (!(j0_khz > 0.0)) throw Error(ErrorKind::invalid_argument, "J0 must be positive");
  if (!(alpha >= 0.0)) throw Error(ErrorKind::invalid_argument, "alpha must be non-negative");
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      if (i != k) j(i, k) = j0_khz / std::pow(static_cast<double>(std::abs(i - k)), alpha);
  CouplingMatrix out = characterize(std::move(j));
  if (n < 3) {
    out.fitted_j0 = j0_khz;
    out.fitted_alpha = alpha;
    out.range_xi = alpha > 0.0 ? std::optional<double>(interaction_range(alpha)) : std::nullopt;
  }
  return out;
}

CouplingMatrix characterize(Eigen::MatrixXd values) {
  if (values.rows() != values.cols())
    throw Error(ErrorKind::dimension_mismatch, "coupling matrix must be square");
  CouplingMatrix out;
  out.values = std::move(values);
  const auto n = out.values.rows();
  if (n >= 2) {
    double nn = 0.0;
    for (Eigen::Index m = 0; m + 1 < n; ++m) nn += out.values(m, m + 1);
    out.mean_nearest_neighbor = nn / static_cast<double>(n - 1);
  }
  if (n >= 3) {
    try {
      const PowerLawFit fit = fit_power_law(out.values);
      out.fitted_j0 = fit.j0;
      out.fitted_alpha = fit.alpha;
      out.fit_residual = fit.residual;
      if (fit.alpha > 1e-12) out.range_xi = interaction_range(fit.alpha);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::undefined_fit) throw;
    }
  }
  return out;
}

CouplingMatrix physical_couplings(const TrapParameters& trap, const DriveParameters& drive) {
  return ising_couplings(solve_chain(trap), trap, drive);
}

double axial_frequency_for_alpha(double target_alpha, TrapParameters trap,
                                 const DriveParameters& drive, double lo_khz,
                                 double hi_khz) {
  auto stable = [&](double axial) {
    trap.axial_khz = axial;
    try {
      solve_chain(trap);
      return true;
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::zigzag_instability) return false;
      throw;
    }
  };
  if (!stable(lo_khz))
    throw Error(ErrorKind::invalid_argument, "lower axial bracket is already zigzag-unstable");
  if (!stable(hi_khz)) {
    double a = lo_khz, b = hi_khz;
    for (int i = 0; i < 60; ++i) {
      const double mid = 0.5 * (a + b);
      (stable(mid) ? a : b) = mid;
    }
    hi_khz = a;
  }
  // alpha decreases monotonically with axial frequency.
  auto alpha_at = [&](double axial) {
    trap.axial_khz = axial;
    return physical_couplings(trap, drive).fitted_alpha;
  };
  const double a_lo = alpha_at(lo_khz);
  const double a_hi = alpha_at(hi_khz);
  if (target_alpha > a_lo || target_alpha < a_hi) {
    std::ostringstream msg;
    msg << "target alpha " << target_alpha << " outside reachable range [" << a_hi << ", "
        << a_lo << "] for this trap";
    throw Error(ErrorKind::invalid_argument, msg.str());
  }
  double lo = lo_khz, hi = hi_khz;
  for (int i = 0; i < 80 && hi - lo > 1e-9 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (alpha_at(mid) > target_alpha ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

void write_couplings_csv(std::ostream& out, const CouplingMatrix& couplings) {
  const auto n = couplings.values.rows();
  out << "n=" << n << ",units=kHz\n";
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < n; ++k) {
      if (k) out << ',';
      out << couplings.values(i, k);
    }
    out << '\n';
  }
}

void write_couplings_csv(const std::filesystem::path& path, const CouplingMatrix& couplings) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  write_couplings_csv(out, couplings);
}

CouplingMatrix read_couplings_csv(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw Error(ErrorKind::io, "empty coupling file");
  int n = 0;
  std::string units;
  {
    std::istringstream hs(header);
    std::string field;
    while (std::getline(hs, field, ',')) {
      const auto eq = field.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = field.substr(0, eq);
      const std::string value = field.substr(eq + 1);
      if (key == "n") n = std::stoi(value);
      if (key == "units") units = value;
    }
  }
  if (n < 2) throw Error(ErrorKind::io, "coupling file header must declare n >= 2");
  if (units != "kHz") throw Error(ErrorKind::io, "coupling file must be in kHz");

  Eigen::MatrixXd j(n, n);
  std::string line;
  for (int i = 0; i < n; ++i) {
    if (!std::getline(in, line)) throw Error(ErrorKind::io, "coupling file truncated");
    std::istringstream ls(line);
    std::string cell;
    for (int k = 0; k < n; ++k) {
      if (!std::getline(ls, cell, ','))
        throw Error(ErrorKind::io, "coupling row " + std::to_string(i) + " too short");
      j(i, k) = std::stod(cell);
    }
  }
  for (int i = 0; i < n; ++i) {
    if (j(i, i) != 0.0) throw Error(ErrorKind::io, "coupling diagonal must be zero");
    for (int k = 0; k < i; ++k)
      if (j(i, k) != j(k, i)) throw Error(ErrorKind::io, "coupling matrix is not symmetric");
  }
  return characterize(std::move(j));
}

CouplingMatrix read_couplings_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot read " + path.string());
  return read_couplings_csv(in);
}

}  // namespace tfim
