#pragma once

#include <complex>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "hybridom/model.hpp"

namespace hybridom {

enum class Branch { single, lower, middle, upper };

std::string_view to_string(Branch b);

// Semiclassical steady state of the driven cavity.
struct SteadyState {
  std::complex<double> alpha;  // intracavity amplitude, -eta / (kappa + i Delta_d)
  double photon_number = 0.0;  // |alpha|^2
  double delta_d = 0.0;        // effective detuning [rad/s]
  Branch branch = Branch::single;
  bool fold_point = false;     // two roots merged at a turning point
  std::optional<bool> dynamically_stable;

  double alpha_r() const { return alpha.real(); }
  double alpha_i() const { return alpha.imag(); }
};

// Roots n >= 0 of n (kappa^2 + (delta_c - beta n)^2) = eta^2, ascending.
// Double roots closer than 1e-6 max(n, 1) are merged; `fold` marks them.
struct PhotonRoot {
  double n = 0.0;
  bool fold = false;
};
std::vector<PhotonRoot> solve_photon_cubic(double beta, double delta_c, double kappa, double eta);

SteadyState make_steady_state(double photon_number, double beta, double delta_c, double kappa,
                              double eta);

// Every steady state for params.delta_c, sorted by photon number. One root is
// labelled Branch::single, three roots lower/middle/upper.
std::vector<SteadyState> solve_steady_state(const DerivedModel& model, const SystemParams& params);

// One branch followed across a delta_c grid. `start_index` is the grid index
// of the first point; consecutive points are adjacent in the grid.
struct BranchCurve {
  std::size_t start_index = 0;
  std::vector<double> delta_c;
  std::vector<SteadyState> states;
};

// Follows every branch across a sorted grid by matching roots to the nearest
// continuing curve. New curves open at fold points, curves close when their
// root disappears.
std::vector<BranchCurve> sweep_photon_number(const DerivedModel& model, const SystemParams& params,
                                             std::span<const double> delta_c_grid);

// Picks one steady state per grid point by continuation: start at the first
// single-root point and follow the nearest root in both directions. Falls back
// to the upper branch if the grid is entirely multistable.
std::vector<SteadyState> select_branch_by_continuation(const DerivedModel& model,
                                                       const SystemParams& params,
                                                       std::span<const double> delta_c_grid);

// Same continuation for an arbitrary one-parameter family of steady-state sets.
std::vector<SteadyState> continue_branch(const std::vector<std::vector<SteadyState>>& roots);

}  // namespace hybridom
