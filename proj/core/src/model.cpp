#include "hybridom/model.hpp"

#include <cmath>
#include <string>

#include "hybridom/error.hpp"

namespace hybridom {

namespace {

void require(bool ok, const char* field, const char* what) {
  if (!ok) {
    throw ValidationError(std::string(field) + ": " + what);
  }
}

bool finite(double x) { return std::isfinite(x); }

}  // namespace

void PhaseNoiseParams::validate() const {
  require(finite(linewidth) && linewidth >= 0.0, "Gamma_l", "must be finite and >= 0");
  require(finite(omega_n) && omega_n > 0.0, "omega_N", "must be finite and > 0");
  require(finite(gamma_tilde) && gamma_tilde >= 0.0, "gamma_tilde", "must be finite and >= 0");
}

void SystemParams::validate() const {
  require(n_atoms > 0, "N_atoms", "must be a positive integer");
  require(finite(cavity_length) && cavity_length > 0.0, "cavity_length", "must be > 0");
  require(finite(pump_wavelength) && pump_wavelength > 0.0, "pump_wavelength", "must be > 0");
  require(finite(kappa) && kappa > 0.0, "kappa", "must be > 0");
  require(finite(g0), "g0", "must be finite");
  require(finite(delta_a) && delta_a != 0.0, "Delta_a", "must be finite and nonzero");
  require(finite(omega_r) && omega_r > 0.0, "omega_R", "must be > 0");
  require(finite(omega_sw) && omega_sw >= 0.0, "omega_sw", "must be >= 0");
  require(finite(gamma_c) && gamma_c >= 0.0, "gamma_c", "must be >= 0");
  require(finite(mirror_mass) && mirror_mass > 0.0, "mirror_mass", "must be > 0");
  require(finite(omega_m) && omega_m > 0.0, "omega_m", "must be > 0");
  require(finite(gamma_m) && gamma_m >= 0.0, "gamma_m", "must be >= 0");
  require(finite(eta) && eta >= 0.0, "eta", "must be >= 0");
  require(finite(delta_c), "delta_c_detuning", "must be finite");
  require(finite(temperature) && temperature >= 0.0, "temperature", "must be >= 0");
  require(finite(n_ph) && n_ph >= 0.0, "n_ph", "must be >= 0");
  phase_noise.validate();
}

SystemParams SystemParams::paper_defaults() {
  using constants::kTwoPi;
  SystemParams p;
  p.n_atoms = 100000;
  p.cavity_length = 187e-6;
  p.pump_wavelength = 780e-9;
  p.kappa = kTwoPi * 1.3e6;
  p.g0 = kTwoPi * 14.1e6;
  // bare cavity (2.41494e15) minus the D2 line (2.41419e15); the pump sits
  // within a few kappa of the cavity.
  p.delta_a = 7.5e11;
  p.omega_r = 23.7e3;
  p.omega_sw = 0.2 * p.omega_r;
  p.gamma_c = 0.001 * p.kappa;
  p.mirror_mass = 1e-12;
  p.omega_m = 1e5;
  p.gamma_m = kTwoPi * 100.0;
  p.eta = 100.0 * p.kappa;
  p.delta_c = -15.0 * p.kappa;
  p.temperature = 0.1e-6;
  p.n_ph = 0.0;
  p.phase_noise.linewidth = kTwoPi * 1e3;
  p.phase_noise.omega_n = kTwoPi * 140e3;
  p.phase_noise.gamma_tilde = 0.5 * p.phase_noise.omega_n;
  return p;
}

double DerivedModel::nonlinear_shift(const SystemParams& params) const {
  return xi_m * xi_m / params.omega_m + xi_c * xi_c / omega_c;
}

double bose_occupation(double omega, double temperature) {
  if (temperature <= 0.0) {
    return 0.0;
  }
  const double x = constants::kHbar * omega / (constants::kBoltzmann * temperature);
  return 1.0 / std::expm1(x);
}

DerivedModel derive(const SystemParams& params) {
  params.validate();

  DerivedModel m;
  m.u0 = params.g0 * params.g0 / params.delta_a;
  const double n_atoms = static_cast<double>(params.n_atoms);
  m.zeta = 0.5 * std::sqrt(n_atoms) * m.u0;
  m.stark_shift = 0.5 * n_atoms * m.u0;

  m.omega_bog = 4.0 * params.omega_r + params.omega_sw;
  m.omega_bog_plus = m.omega_bog + 0.5 * params.omega_sw;
  m.omega_bog_minus = m.omega_bog - 0.5 * params.omega_sw;
  m.chi = std::pow(m.omega_bog_plus / m.omega_bog_minus, 0.25);
  m.omega_c = std::sqrt(m.omega_bog_plus * m.omega_bog_minus);
  m.xi_c = m.zeta / m.chi;

  m.omega_0 = constants::kTwoPi * constants::kSpeedOfLight / params.pump_wavelength;
  m.xi_m = (m.omega_0 / params.cavity_length) *
           std::sqrt(constants::kHbar / (params.mirror_mass * params.omega_m));

  m.n_m = bose_occupation(params.omega_m, params.temperature);
  m.n_c = bose_occupation(m.omega_c, params.temperature);
  m.gamma_m_prime = params.gamma_m * (2.0 * m.n_m + 1.0);
  m.gamma_c_prime = params.gamma_c * (2.0 * m.n_c + 1.0);
  return m;
}

}  // namespace hybridom
