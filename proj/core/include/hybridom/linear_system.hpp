#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hybridom/model.hpp"
#include "hybridom/steady_state.hpp"

namespace hybridom {

using Matrix8 = Eigen::Matrix<double, 8, 8>;

// Fluctuation vector ordering [dq, dp, dX, dY, dQ, dP, dpsi, dtheta]: each
// mode occupies two consecutive slots starting at 2 * mode.
enum class Mode : int { mirror = 0, field = 1, atom = 2, phase = 3 };

constexpr int first_index(Mode m) { return 2 * static_cast<int>(m); }

struct Couplings {
  double g_rm = 0.0;  // sqrt(2) alpha_R xi_m
  double g_im = 0.0;  // sqrt(2) alpha_I xi_m
  double g_rc = 0.0;  // sqrt(2) alpha_R xi_c
  double g_ic = 0.0;  // sqrt(2) alpha_I xi_c
};

// Linearized Langevin system du/dt = A u + n(t) with <n_i n_j> = D_ij delta(t - t').
struct LinearSystem {
  Matrix8 drift = Matrix8::Zero();
  Matrix8 diffusion = Matrix8::Zero();
  Couplings couplings;
  double kappa = 0.0;  // sets the stability margin
};

LinearSystem build_linear_system(const DerivedModel& model, const SystemParams& params,
                                 const SteadyState& ss);

struct StabilityReport {
  bool stable = false;
  double max_real_eig = 0.0;
  double margin = 0.0;  // eigenvalues must satisfy Re < -margin
  std::vector<std::complex<double>> eigenvalues;
};

// Strict test: every eigenvalue has Re(lambda) < -1e-9 kappa. Throws
// NumericalError if the eigensolver does not converge.
StabilityReport check_stability(const Eigen::MatrixXd& drift, double kappa);
StabilityReport check_stability(const LinearSystem& sys);

// Rebuilds the drift matrix from the linearized Hamiltonian (quadratic form
// plus symplectic structure, with the phase-noise pair treated as an external
// classical drive) and returns max |A_H - A| / max |A|.
double hamiltonian_consistency_residual(const LinearSystem& sys, const DerivedModel& model,
                                        const SystemParams& params, const SteadyState& ss);

// Plain-text 8x8 grids of A and D with an ordering header.
std::string dump(const LinearSystem& sys);

}  // namespace hybridom
