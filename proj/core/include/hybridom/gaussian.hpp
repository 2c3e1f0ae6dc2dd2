#pragma once

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "hybridom/linear_system.hpp"
#include "hybridom/model.hpp"
#include "hybridom/steady_state.hpp"

namespace hybridom {

// Stationary second moments V_ij = <du_i du_j + du_j du_i> / 2 (vacuum 1/2).
struct CovarianceMatrix {
  Eigen::MatrixXd v;
  double residual = 0.0;  // max|A V + V A^T + D| / max|D|
};

// Solves A V + V A^T = -D by a dense Kronecker-sum solve and symmetrizes.
// Does not check stability; throws NumericalError when the Kronecker sum is
// numerically singular.
CovarianceMatrix solve_lyapunov(const Eigen::MatrixXd& drift, const Eigen::MatrixXd& diffusion);

// Refuses unstable systems with UnstableSystemError.
CovarianceMatrix solve_lyapunov(const LinearSystem& sys);

double lyapunov_residual(const Eigen::MatrixXd& drift, const Eigen::MatrixXd& v,
                         const Eigen::MatrixXd& diffusion);

enum class Bipartition { mirror_atom, mirror_field, atom_field };

std::string_view to_string(Bipartition b);
inline constexpr std::array<Bipartition, 3> kAllBipartitions = {
    Bipartition::mirror_atom, Bipartition::atom_field, Bipartition::mirror_field};

// Keeps rows and columns (2a, 2a+1, 2b, 2b+1) of V.
Eigen::Matrix4d bipartite_block(const Eigen::MatrixXd& v, int mode_a, int mode_b);

// Smallest symplectic eigenvalue of the partial transpose of a two-mode CM.
double min_partial_transpose_eigenvalue(const Eigen::Matrix4d& v_bp);

// E_N = max(0, -ln(2 eta_minus)).
double log_negativity(const Eigen::Matrix4d& v_bp);
double log_negativity(const CovarianceMatrix& cm, Bipartition pair);

// Moduli of the eigenvalues of i Omega V, one per mode, ascending.
std::vector<double> symplectic_eigenvalues(const Eigen::MatrixXd& v);

enum class PointStatus { ok, unstable, undefined, fold_point };
std::string_view to_string(PointStatus s);

struct EntanglementPoint {
  double x = 0.0;  // swept value (delta_c or eta, rad/s)
  PointStatus status = PointStatus::ok;
  std::optional<SteadyState> steady_state;
  // Indexed like kAllBipartitions; empty where the point is a gap.
  std::array<std::optional<double>, 3> log_neg;
  std::optional<double> min_symplectic;  // quantum 6x6 block
  double lyapunov_residual = 0.0;

  std::optional<double> en(Bipartition b) const;
};

// E_N for all three pairs at one steady state. Unstable systems give a gap.
EntanglementPoint entanglement_at(const DerivedModel& model, const SystemParams& params,
                                  const SteadyState& ss);

// delta_c sweep on the branch chosen by continuation. Unstable points are
// reported as gaps, never as zeros. `jobs` > 1 fans points out to threads.
std::vector<EntanglementPoint> entanglement_sweep(const DerivedModel& model,
                                                  const SystemParams& params,
                                                  std::span<const double> delta_c_grid,
                                                  unsigned jobs = 1);

// Same at fixed delta_c, sweeping the pump rate eta.
std::vector<EntanglementPoint> entanglement_vs_pump(const DerivedModel& model,
                                                    const SystemParams& params,
                                                    std::span<const double> eta_grid,
                                                    unsigned jobs = 1);

}  // namespace hybridom
