#include "hybridom/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "hybridom/error.hpp"
#include "hybridom/parallel.hpp"

namespace hybridom {

namespace {
constexpr double kMinRcond = 1e-15;
}

double lyapunov_residual(const Eigen::MatrixXd& drift, const Eigen::MatrixXd& v,
                         const Eigen::MatrixXd& diffusion) {
  const double r = (drift * v + v * drift.transpose() + diffusion).cwiseAbs().maxCoeff();
  const double scale = diffusion.cwiseAbs().maxCoeff();
  return scale > 0.0 ? r / scale : r;
}

CovarianceMatrix solve_lyapunov(const Eigen::MatrixXd& drift, const Eigen::MatrixXd& diffusion) {
  const Eigen::Index n = drift.rows();
  if (drift.cols() != n || diffusion.rows() != n || diffusion.cols() != n) {
    throw ValidationError("solve_lyapunov: drift and diffusion must be square and of equal size");
  }
  if (!drift.allFinite() || !diffusion.allFinite()) {
    throw NumericalError("solve_lyapunov: non-finite input");
  }

  // vec(A V + V A^T) = (I (x) A + A (x) I) vec(V), column-major vec.
  const Eigen::Index nn = n * n;
  Eigen::MatrixXd kron = Eigen::MatrixXd::Zero(nn, nn);
  for (Eigen::Index j = 0; j < n; ++j) {
    kron.block(j * n, j * n, n, n) += drift;
    for (Eigen::Index i = 0; i < n; ++i) {
      kron.block(i * n, j * n, n, n).diagonal().array() += drift(i, j);
    }
  }
  const Eigen::VectorXd rhs = -Eigen::Map<const Eigen::VectorXd>(diffusion.data(), nn);

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(kron);
  const double rcond = lu.rcond();
  if (!(rcond > kMinRcond)) {
    std::ostringstream os;
    os << "solve_lyapunov: Kronecker-sum system is ill-conditioned (rcond estimate " << rcond << ")";
    throw NumericalError(os.str());
  }
  Eigen::VectorXd x = lu.solve(rhs);
  x += lu.solve(rhs - kron * x);  // one step of iterative refinement

  CovarianceMatrix cm;
  cm.v = Eigen::Map<const Eigen::MatrixXd>(x.data(), n, n);
  cm.v = 0.5 * (cm.v + cm.v.transpose()).eval();
  cm.residual = lyapunov_residual(drift, cm.v, diffusion);
  return cm;
}

CovarianceMatrix solve_lyapunov(const LinearSystem& sys) {
  const StabilityReport report = check_stability(sys);
  if (!report.stable) {
    std::ostringstream os;
    os << "solve_lyapunov: system is not stable (max Re(lambda) = " << report.max_real_eig
       << " rad/s); no stationary covariance exists";
    throw UnstableSystemError(os.str(), report.max_real_eig);
  }
  return solve_lyapunov(Eigen::MatrixXd(sys.drift), Eigen::MatrixXd(sys.diffusion));
}

std::string_view to_string(Bipartition b) {
  switch (b) {
    case Bipartition::mirror_atom: return "mirror_atom";
    case Bipartition::mirror_field: return "mirror_field";
    case Bipartition::atom_field: return "atom_field";
  }
  return "unknown";
}

std::string_view to_string(PointStatus s) {
  switch (s) {
    case PointStatus::ok: return "ok";
    case PointStatus::unstable: return "unstable";
    case PointStatus::undefined: return "undefined";
    case PointStatus::fold_point: return "fold_point";
  }
  return "unknown";
}

Eigen::Matrix4d bipartite_block(const Eigen::MatrixXd& v, int mode_a, int mode_b) {
  const int idx[4] = {2 * mode_a, 2 * mode_a + 1, 2 * mode_b, 2 * mode_b + 1};
  if (mode_a == mode_b || idx[3] >= v.rows() || idx[1] >= v.rows() || mode_a < 0 || mode_b < 0) {
    throw ValidationError("bipartite_block: invalid mode pair");
  }
  Eigen::Matrix4d out;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) out(i, j) = v(idx[i], idx[j]);
  }
  return out;
}

double min_partial_transpose_eigenvalue(const Eigen::Matrix4d& v_bp) {
  const double det_b = v_bp.topLeftCorner<2, 2>().determinant();
  const double det_bp = v_bp.bottomRightCorner<2, 2>().determinant();
  const double det_c = v_bp.topRightCorner<2, 2>().determinant();
  const double det_v = v_bp.determinant();
  const double sigma = det_b + det_bp - 2.0 * det_c;
  double disc = sigma * sigma - 4.0 * det_v;
  if (disc < 0.0) {
    if (disc < -1e-12 * std::max(sigma * sigma, 1.0)) {
      std::ostringstream os;
      os << "log_negativity: unphysical covariance (Sigma^2 - 4 det V = " << disc << ")";
      throw NumericalError(os.str());
    }
    disc = 0.0;
  }
  const double inner = std::max(sigma - std::sqrt(disc), 0.0);
  return std::sqrt(0.5 * inner);
}

double log_negativity(const Eigen::Matrix4d& v_bp) {
  const double eta_minus = min_partial_transpose_eigenvalue(v_bp);
  if (!(eta_minus > 0.0)) {
    throw NumericalError("log_negativity: vanishing symplectic eigenvalue");
  }
  return std::max(0.0, -std::log(2.0 * eta_minus));
}

double log_negativity(const CovarianceMatrix& cm, Bipartition pair) {
  int a = 0;
  int b = 0;
  switch (pair) {
    case Bipartition::mirror_atom:
      a = static_cast<int>(Mode::mirror);
      b = static_cast<int>(Mode::atom);
      break;
    case Bipartition::mirror_field:
      a = static_cast<int>(Mode::mirror);
      b = static_cast<int>(Mode::field);
      break;
    case Bipartition::atom_field:
      a = static_cast<int>(Mode::atom);
      b = static_cast<int>(Mode::field);
      break;
  }
  return log_negativity(bipartite_block(cm.v, a, b));
}

std::vector<double> symplectic_eigenvalues(const Eigen::MatrixXd& v) {
  const Eigen::Index n = v.rows();
  if (n % 2 != 0 || v.cols() != n) {
    throw ValidationError("symplectic_eigenvalues: matrix must be square with even dimension");
  }
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index m = 0; m < n / 2; ++m) {
    omega(2 * m, 2 * m + 1) = 1.0;
    omega(2 * m + 1, 2 * m) = -1.0;
  }
  Eigen::EigenSolver<Eigen::MatrixXd> solver(omega * v, false);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("symplectic_eigenvalues: eigenvalue solver did not converge");
  }
  std::vector<double> moduli;
  for (Eigen::Index i = 0; i < n; ++i) moduli.push_back(std::abs(solver.eigenvalues()(i)));
  std::sort(moduli.begin(), moduli.end());
  std::vector<double> out;
  for (std::size_t i = 0; i < moduli.size(); i += 2) out.push_back(0.5 * (moduli[i] + moduli[i + 1]));
  return out;
}

std::optional<double> EntanglementPoint::en(Bipartition b) const {
  for (std::size_t i = 0; i < kAllBipartitions.size(); ++i) {
    if (kAllBipartitions[i] == b) return log_neg[i];
  }
  return std::nullopt;
}

EntanglementPoint entanglement_at(const DerivedModel& model, const SystemParams& params,
                                  const SteadyState& ss) {
  EntanglementPoint pt;
  pt.steady_state = ss;
  const LinearSystem sys = build_linear_system(model, params, ss);
  const StabilityReport report = check_stability(sys);
  pt.steady_state->dynamically_stable = report.stable;
  if (!report.stable) {
    pt.status = PointStatus::unstable;
    return pt;
  }
  const CovarianceMatrix cm =
      solve_lyapunov(Eigen::MatrixXd(sys.drift), Eigen::MatrixXd(sys.diffusion));
  pt.lyapunov_residual = cm.residual;
  pt.min_symplectic = symplectic_eigenvalues(cm.v.topLeftCorner(6, 6)).front();
  for (std::size_t i = 0; i < kAllBipartitions.size(); ++i) {
    pt.log_neg[i] = log_negativity(cm, kAllBipartitions[i]);
  }
  pt.status = ss.fold_point ? PointStatus::fold_point : PointStatus::ok;
  return pt;
}

namespace {

std::vector<EntanglementPoint> evaluate(const DerivedModel& model, const SystemParams& params,
                                        const std::vector<SteadyState>& states,
                                        std::span<const double> xs, bool sweep_eta,
                                        unsigned jobs) {
  std::vector<EntanglementPoint> out(states.size());
  detail::parallel_for(states.size(), jobs, [&](std::size_t i) {
    SystemParams p = params;
    if (sweep_eta) {
      p.eta = xs[i];
    } else {
      p.delta_c = xs[i];
    }
    try {
      out[i] = entanglement_at(model, p, states[i]);
    } catch (const NumericalError&) {
      out[i] = EntanglementPoint{};
      out[i].steady_state = states[i];
      out[i].status = PointStatus::undefined;
    }
    out[i].x = xs[i];
  });
  return out;
}

}  // namespace

std::vector<EntanglementPoint> entanglement_sweep(const DerivedModel& model,
                                                  const SystemParams& params,
                                                  std::span<const double> delta_c_grid,
                                                  unsigned jobs) {
  const auto states = select_branch_by_continuation(model, params, delta_c_grid);
  return evaluate(model, params, states, delta_c_grid, false, jobs);
}

std::vector<EntanglementPoint> entanglement_vs_pump(const DerivedModel& model,
                                                    const SystemParams& params,
                                                    std::span<const double> eta_grid,
                                                    unsigned jobs) {
  std::vector<std::vector<SteadyState>> roots;
  roots.reserve(eta_grid.size());
  SystemParams p = params;
  for (std::size_t i = 0; i < eta_grid.size(); ++i) {
    if (!std::isfinite(eta_grid[i]) || eta_grid[i] < 0.0 ||
        (i > 0 && eta_grid[i] < eta_grid[i - 1])) {
      throw ValidationError("eta grid must be finite, non-negative and sorted ascending");
    }
    p.eta = eta_grid[i];
    roots.push_back(solve_steady_state(model, p));
  }
  return evaluate(model, params, continue_branch(roots), eta_grid, true, jobs);
}

}  // namespace hybridom
