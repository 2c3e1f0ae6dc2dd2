#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hybridom/model.hpp"
#include "hybridom/steady_state.hpp"

namespace hybridom {

// Mirror and Bogoliubov modes after the cavity field is eliminated: both
// oscillators see an optical-spring shift nu and couple through the field.
// Fields that stop being real (nu >= omega) are left empty.
struct EffectiveModel {
  double delta_d = 0.0;
  double photon_number = 0.0;
  double g_m = 0.0;  // sqrt(2) xi_m |alpha|
  double g_c = 0.0;
  double nu_m = 0.0;  // g^2 Delta_d / (kappa^2 + Delta_d^2)
  double nu_c = 0.0;
  // Signed field-mediated q-Q coupling 2 xi_m xi_c |alpha|^2 Delta_d / (kappa^2 + Delta_d^2);
  // its magnitude is sqrt(nu_m nu_c).
  double cross_coupling = 0.0;
  std::optional<double> omega_m_eff;  // sqrt(omega (omega - nu))
  std::optional<double> omega_c_eff;
  std::optional<double> chi_m_tilde;  // ((omega - nu) / omega)^(1/4)
  std::optional<double> chi_c_tilde;
  std::optional<double> g_mc;  // sqrt(nu_m nu_c) / (chi_m chi_c)
  std::optional<double> r_m;   // nu_m / (xi_m chi_m)
  std::optional<double> r_c;
  bool degenerate = false;  // nu equals omega for one of the modes
  std::vector<std::string> warnings;
};

// kappa must exceed `ratio` times each of gamma_m, gamma_c, xi_m, xi_c for
// the field to follow the oscillators adiabatically.
struct RegimeThresholds {
  double ratio = 10.0;
};

EffectiveModel effective_model(const DerivedModel& model, const SystemParams& params,
                               const SteadyState& ss, RegimeThresholds thresholds = {});

// Delta_d-parametrized mode: |alpha|^2 = eta^2 / (kappa^2 + Delta_d^2) with no
// cubic solve, so delta_c is never consulted.
std::vector<EffectiveModel> effective_sweep(const DerivedModel& model, const SystemParams& params,
                                            std::span<const double> delta_d_grid);

// Symmetrized strength of the field noise dZ that the eliminated cavity
// injects into both momentum quadratures: 2 kappa |alpha|^2 (2 n_ph + 1) / (kappa^2 + Delta_d^2).
double delta_z_variance(double kappa, double photon_number, double delta_d, double n_ph);

// Reduced linear system over [dq, dp, dQ, dP, dpsi, dtheta], in the same sign
// convention as the full 8x8 drift matrix.
struct ReducedSystem {
  Eigen::MatrixXd drift;      // 6x6
  Eigen::MatrixXd diffusion;  // 6x6, with the dZ-induced p-P cross term
  double kappa = 0.0;
};

// Throws ValidationError for a degenerate effective model.
ReducedSystem effective_two_mode_system(const EffectiveModel& eff, const DerivedModel& model,
                                        const SystemParams& params);

}  // namespace hybridom
