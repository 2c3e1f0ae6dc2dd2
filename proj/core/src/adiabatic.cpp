#include "hybridom/adiabatic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hybridom/error.hpp"

namespace hybridom {

namespace {

struct ShiftedMode {
  std::optional<double> omega_eff;
  std::optional<double> chi_tilde;
  bool degenerate = false;
};

ShiftedMode shift(double omega, double nu) {
  ShiftedMode m;
  const double gap = omega - nu;
  if (gap > 0.0) {
    m.omega_eff = std::sqrt(omega * gap);
    m.chi_tilde = std::pow(gap / omega, 0.25);
  } else if (gap == 0.0) {
    m.degenerate = true;
    m.omega_eff = 0.0;
  }
  return m;
}

void check_regime(const DerivedModel& model, const SystemParams& params, RegimeThresholds t,
                  std::vector<std::string>& warnings) {
  const std::pair<const char*, double> rates[] = {{"gamma_m", params.gamma_m},
                                                  {"gamma_c", params.gamma_c},
                                                  {"xi_m", std::fabs(model.xi_m)},
                                                  {"xi_c", std::fabs(model.xi_c)}};
  for (const auto& [name, value] : rates) {
    if (params.kappa < t.ratio * value) {
      std::ostringstream os;
      os << "adiabatic regime: kappa/" << name << " = " << params.kappa / value << " < "
         << t.ratio;
      warnings.push_back(os.str());
    }
  }
}

EffectiveModel build(const DerivedModel& model, const SystemParams& params, double photon_number,
                     double delta_d) {
  EffectiveModel e;
  e.delta_d = delta_d;
  e.photon_number = photon_number;
  const double lorentz = delta_d / (params.kappa * params.kappa + delta_d * delta_d);
  e.g_m = std::sqrt(2.0 * photon_number) * std::fabs(model.xi_m);
  e.g_c = std::sqrt(2.0 * photon_number) * std::fabs(model.xi_c);
  e.nu_m = e.g_m * e.g_m * lorentz;
  e.nu_c = e.g_c * e.g_c * lorentz;
  e.cross_coupling = 2.0 * model.xi_m * model.xi_c * photon_number * lorentz;

  const ShiftedMode m = shift(params.omega_m, e.nu_m);
  const ShiftedMode c = shift(model.omega_c, e.nu_c);
  e.omega_m_eff = m.omega_eff;
  e.omega_c_eff = c.omega_eff;
  e.chi_m_tilde = m.chi_tilde;
  e.chi_c_tilde = c.chi_tilde;
  e.degenerate = m.degenerate || c.degenerate;

  // nu / xi = 2 xi |alpha|^2 L stays finite as xi -> 0.
  if (m.chi_tilde) e.r_m = 2.0 * model.xi_m * photon_number * lorentz / *m.chi_tilde;
  if (c.chi_tilde) e.r_c = 2.0 * model.xi_c * photon_number * lorentz / *c.chi_tilde;
  if (m.chi_tilde && c.chi_tilde) {
    e.g_mc = std::sqrt(e.nu_m * e.nu_c) / (*m.chi_tilde * *c.chi_tilde);
  }
  return e;
}

}  // namespace

EffectiveModel effective_model(const DerivedModel& model, const SystemParams& params,
                               const SteadyState& ss, RegimeThresholds thresholds) {
  EffectiveModel e = build(model, params, ss.photon_number, ss.delta_d);
  check_regime(model, params, thresholds, e.warnings);
  return e;
}

std::vector<EffectiveModel> effective_sweep(const DerivedModel& model, const SystemParams& params,
                                            std::span<const double> delta_d_grid) {
  std::vector<EffectiveModel> out;
  out.reserve(delta_d_grid.size());
  const double k2 = params.kappa * params.kappa;
  for (double dd : delta_d_grid) {
    if (!std::isfinite(dd)) throw ValidationError("effective_sweep: Delta_d grid must be finite");
    const double n = params.eta * params.eta / (k2 + dd * dd);
    out.push_back(build(model, params, n, dd));
  }
  return out;
}

double delta_z_variance(double kappa, double photon_number, double delta_d, double n_ph) {
  return 2.0 * kappa * photon_number * (2.0 * n_ph + 1.0) / (kappa * kappa + delta_d * delta_d);
}

ReducedSystem effective_two_mode_system(const EffectiveModel& eff, const DerivedModel& model,
                                        const SystemParams& params) {
  if (eff.degenerate) {
    throw ValidationError("effective_two_mode_system: degenerate effective model (nu = omega)");
  }
  const double lorentz =
      eff.delta_d / (params.kappa * params.kappa + eff.delta_d * eff.delta_d);
  // drive of dpsi on dp and dP: nu_m / xi_m and -nu_c / xi_c
  const double drive_m = 2.0 * model.xi_m * eff.photon_number * lorentz;
  const double drive_c = 2.0 * model.xi_c * eff.photon_number * lorentz;
  const double wn = params.phase_noise.omega_n;

  ReducedSystem r;
  r.kappa = params.kappa;
  r.drift = Eigen::MatrixXd::Zero(6, 6);
  auto& a = r.drift;
  a(0, 1) = params.omega_m;
  a(1, 0) = -(params.omega_m - eff.nu_m);
  a(1, 1) = -params.gamma_m;
  a(1, 2) = -eff.cross_coupling;
  a(1, 4) = drive_m;
  a(2, 3) = model.omega_c;
  a(3, 0) = -eff.cross_coupling;
  a(3, 2) = -(model.omega_c - eff.nu_c);
  a(3, 3) = -params.gamma_c;
  a(3, 4) = -drive_c;
  a(4, 5) = wn;
  a(5, 4) = -wn;
  a(5, 5) = -params.phase_noise.gamma_tilde;

  const double zz = delta_z_variance(params.kappa, eff.photon_number, eff.delta_d, params.n_ph);
  r.diffusion = Eigen::MatrixXd::Zero(6, 6);
  auto& d = r.diffusion;
  d(1, 1) = model.gamma_m_prime + model.xi_m * model.xi_m * zz;
  d(3, 3) = model.gamma_c_prime + model.xi_c * model.xi_c * zz;
  d(1, 3) = d(3, 1) = -model.xi_m * model.xi_c * zz;
  d(5, 5) = 2.0 * params.phase_noise.linewidth * wn * wn;
  return r;
}

}  // namespace hybridom
