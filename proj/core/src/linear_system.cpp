#include "hybridom/linear_system.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "hybridom/error.hpp"

namespace hybridom {

namespace {
constexpr double kStabilityMargin = 1e-9;  // in units of kappa
constexpr double kSqrt2 = 1.41421356237309504880;
}  // namespace

LinearSystem build_linear_system(const DerivedModel& model, const SystemParams& params,
                                 const SteadyState& ss) {
  LinearSystem sys;
  sys.kappa = params.kappa;

  const double ar = ss.alpha_r();
  const double ai = ss.alpha_i();
  Couplings& g = sys.couplings;
  g.g_rm = kSqrt2 * ar * model.xi_m;
  g.g_im = kSqrt2 * ai * model.xi_m;
  g.g_rc = kSqrt2 * ar * model.xi_c;
  g.g_ic = kSqrt2 * ai * model.xi_c;

  const double wm = params.omega_m;
  const double wc = model.omega_c;
  const double wn = params.phase_noise.omega_n;
  const double k = params.kappa;
  const double dd = ss.delta_d;

  Matrix8& a = sys.drift;
  // mirror
  a(0, 1) = wm;
  a(1, 0) = -wm;
  a(1, 1) = -params.gamma_m;
  a(1, 2) = g.g_rm;
  a(1, 3) = g.g_im;
  // field
  a(2, 0) = -g.g_im;
  a(2, 2) = -k;
  a(2, 3) = dd;
  a(2, 4) = g.g_ic;
  a(2, 6) = -kSqrt2 * ai;
  a(3, 0) = g.g_rm;
  a(3, 2) = -dd;
  a(3, 3) = -k;
  a(3, 4) = -g.g_rc;
  a(3, 6) = kSqrt2 * ar;
  // Bogoliubov mode
  a(4, 5) = wc;
  a(5, 2) = -g.g_rc;
  a(5, 3) = -g.g_ic;
  a(5, 4) = -wc;
  a(5, 5) = -params.gamma_c;
  // laser phase noise
  a(6, 7) = wn;
  a(7, 6) = -wn;
  a(7, 7) = -params.phase_noise.gamma_tilde;

  const double field = k * (2.0 * params.n_ph + 1.0);
  sys.diffusion.diagonal() << 0.0, model.gamma_m_prime, field, field, 0.0, model.gamma_c_prime, 0.0,
      2.0 * params.phase_noise.linewidth * wn * wn;
  return sys;
}

StabilityReport check_stability(const Eigen::MatrixXd& drift, double kappa) {
  if (!drift.allFinite()) {
    throw NumericalError("check_stability: drift matrix has non-finite entries");
  }
  Eigen::EigenSolver<Eigen::MatrixXd> solver(drift, false);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("check_stability: eigenvalue solver did not converge");
  }
  StabilityReport report;
  report.margin = kStabilityMargin * kappa;
  const auto& ev = solver.eigenvalues();
  report.eigenvalues.assign(ev.data(), ev.data() + ev.size());
  report.max_real_eig = -std::numeric_limits<double>::infinity();
  for (const auto& l : report.eigenvalues) report.max_real_eig = std::max(report.max_real_eig, l.real());
  report.stable = report.max_real_eig < -report.margin;
  return report;
}

StabilityReport check_stability(const LinearSystem& sys) {
  return check_stability(Eigen::MatrixXd(sys.drift), sys.kappa);
}

double hamiltonian_consistency_residual(const LinearSystem& sys, const DerivedModel& model,
                                        const SystemParams& params, const SteadyState& ss) {
  // dH = -sqrt2 (aR dX + aI dY)(xi_m dq - xi_c dQ + dpsi) + Dd/2 (dX^2 + dY^2)
  //      + wm/2 (dq^2 + dp^2) + wc/2 (dQ^2 + dP^2) + wN/2 (dpsi^2 + dtheta^2)
  // written as dH = u^T H u / 2.
  Matrix8 h = Matrix8::Zero();
  h(0, 0) = h(1, 1) = params.omega_m;
  h(2, 2) = h(3, 3) = ss.delta_d;
  h(4, 4) = h(5, 5) = model.omega_c;
  h(6, 6) = h(7, 7) = params.phase_noise.omega_n;

  const double ar = ss.alpha_r();
  const double ai = ss.alpha_i();
  const Eigen::Vector2d field_weights(-kSqrt2 * ar, -kSqrt2 * ai);  // multiplies (dX, dY)
  const Eigen::Matrix<double, 3, 1> partner(model.xi_m, -model.xi_c, 1.0);
  const int partner_index[3] = {0, 4, 6};
  for (int f = 0; f < 2; ++f) {
    for (int k = 0; k < 3; ++k) {
      const double c = field_weights(f) * partner(k);
      h(2 + f, partner_index[k]) += c;
      h(partner_index[k], 2 + f) += c;
    }
  }

  // Canonical pairs (x, y) evolve as x' = dH/dy, y' = -dH/dx.
  Matrix8 omega = Matrix8::Zero();
  for (int m = 0; m < 4; ++m) {
    omega(2 * m, 2 * m + 1) = 1.0;
    omega(2 * m + 1, 2 * m) = -1.0;
  }
  Matrix8 rebuilt = omega * h;
  // The laser phase is classical: it drives the field but feels no back-action.
  rebuilt.block<2, 6>(6, 0).setZero();

  rebuilt(1, 1) -= params.gamma_m;
  rebuilt(2, 2) -= params.kappa;
  rebuilt(3, 3) -= params.kappa;
  rebuilt(5, 5) -= params.gamma_c;
  rebuilt(7, 7) -= params.phase_noise.gamma_tilde;

  const double scale = sys.drift.cwiseAbs().maxCoeff();
  const double diff = (rebuilt - sys.drift).cwiseAbs().maxCoeff();
  return scale > 0.0 ? diff / scale : diff;
}

std::string dump(const LinearSystem& sys) {
  std::ostringstream os;
  auto grid = [&os](const char* name, const Matrix8& m) {
    os << "# " << name << " ordering [q, p, X, Y, Q, P, psi, theta]\n";
    char buf[32];
    for (int i = 0; i < 8; ++i) {
      for (int j = 0; j < 8; ++j) {
        std::snprintf(buf, sizeof buf, "%s%.9e", j ? " " : "", m(i, j));
        os << buf;
      }
      os << '\n';
    }
  };
  grid("drift A", sys.drift);
  grid("diffusion D", sys.diffusion);
  return os.str();
}

}  // namespace hybridom
