#include "hybridom/steady_state.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>
#include <utility>

#include "hybridom/error.hpp"

namespace hybridom {

std::string_view to_string(Branch b) {
  switch (b) {
    case Branch::single: return "single";
    case Branch::lower: return "lower";
    case Branch::middle: return "middle";
    case Branch::upper: return "upper";
  }
  return "unknown";
}

namespace {

constexpr double kFoldTolerance = 1e-6;

// Dimensionless cubic f(n) = n (1 + (d - b n)^2) - e^2, all rates in units of kappa.
struct Cubic {
  long double b;
  long double d;
  long double e2;

  long double value(long double n) const {
    const long double s = d - b * n;
    return n * (1.0L + s * s) - e2;
  }
  long double slope(long double n) const {
    return 3.0L * b * b * n * n - 4.0L * b * d * n + (1.0L + d * d);
  }
};

// Safeguarded Newton on a sign-changing bracket.
double polish_root(const Cubic& f, long double lo, long double hi) {
  long double flo = f.value(lo);
  if (flo == 0.0L) return static_cast<double>(lo);
  if (f.value(hi) == 0.0L) return static_cast<double>(hi);
  const bool increasing = flo < 0.0L;
  long double x = 0.5L * (lo + hi);
  for (int it = 0; it < 400; ++it) {
    const long double fx = f.value(x);
    if (fx == 0.0L) break;
    if ((fx < 0.0L) == increasing) {
      lo = x;
    } else {
      hi = x;
    }
    const long double df = f.slope(x);
    long double next = (df != 0.0L) ? x - fx / df : 0.5L * (lo + hi);
    if (!(next > lo && next < hi)) {
      next = 0.5L * (lo + hi);
    }
    if (std::fabs(next - x) <= 4.0L * std::numeric_limits<long double>::epsilon() * std::fabs(x)) {
      x = next;
      break;
    }
    x = next;
  }
  return static_cast<double>(x);
}

}  // namespace

std::vector<PhotonRoot> solve_photon_cubic(double beta, double delta_c, double kappa, double eta) {
  if (!(kappa > 0.0) || !std::isfinite(beta) || !std::isfinite(delta_c) || !std::isfinite(eta)) {
    throw ValidationError("solve_photon_cubic: kappa must be > 0 and inputs finite");
  }
  if (eta == 0.0) {
    return {PhotonRoot{0.0, false}};
  }
  const Cubic f{static_cast<long double>(beta / kappa), static_cast<long double>(delta_c / kappa),
                static_cast<long double>(eta / kappa) * static_cast<long double>(eta / kappa)};
  const long double upper = f.e2;  // f(n) >= n - e^2

  if (f.b == 0.0L) {
    return {PhotonRoot{static_cast<double>(f.e2 / (1.0L + f.d * f.d)), false}};
  }

  // Turning points of f in (0, e^2) split the half-line into monotone pieces.
  std::vector<long double> knots{0.0L};
  const long double disc = f.d * f.d - 3.0L;
  if (disc > 0.0L) {
    const long double root = std::sqrt(disc);
    for (long double c : {(2.0L * f.d - root) / (3.0L * f.b), (2.0L * f.d + root) / (3.0L * f.b)}) {
      if (c > 0.0L && c < upper) knots.push_back(c);
    }
    std::sort(knots.begin() + 1, knots.end());
  }
  knots.push_back(upper);

  // Inputs carry double rounding, so a turning point whose value is zero to
  // that precision is a tangency: keep it as a fold root.
  std::vector<bool> tangent(knots.size(), false);
  std::vector<PhotonRoot> roots;
  for (std::size_t k = 1; k + 1 < knots.size(); ++k) {
    const long double c = knots[k];
    const long double s = f.d - f.b * c;
    const long double scale = f.e2 + c * (1.0L + s * s);
    if (std::fabs(f.value(c)) <= 16.0L * std::numeric_limits<double>::epsilon() * scale) {
      tangent[k] = true;
      roots.push_back(PhotonRoot{static_cast<double>(c), true});
    }
  }
  for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
    if (tangent[k] || tangent[k + 1]) continue;  // f is monotone, the tangency is its only root
    const long double lo = knots[k];
    const long double hi = knots[k + 1];
    const long double flo = f.value(lo);
    const long double fhi = f.value(hi);
    if ((flo <= 0.0L && fhi >= 0.0L) || (flo >= 0.0L && fhi <= 0.0L)) {
      roots.push_back(PhotonRoot{polish_root(f, lo, hi), false});
    }
  }
  std::sort(roots.begin(), roots.end(), [](const PhotonRoot& a, const PhotonRoot& b) { return a.n < b.n; });

  std::vector<PhotonRoot> merged;
  for (const PhotonRoot& r : roots) {
    if (!merged.empty() &&
        std::fabs(r.n - merged.back().n) < kFoldTolerance * std::max(merged.back().n, 1.0)) {
      merged.back().n = 0.5 * (merged.back().n + r.n);
      merged.back().fold = true;
      continue;
    }
    merged.push_back(r);
  }
  return merged;
}

SteadyState make_steady_state(double photon_number, double beta, double delta_c, double kappa,
                              double eta) {
  SteadyState s;
  s.photon_number = photon_number;
  s.delta_d = delta_c - beta * photon_number;
  s.alpha = -eta / std::complex<double>(kappa, s.delta_d);
  return s;
}

std::vector<SteadyState> solve_steady_state(const DerivedModel& model, const SystemParams& params) {
  const double beta = model.nonlinear_shift(params);
  const auto roots = solve_photon_cubic(beta, params.delta_c, params.kappa, params.eta);

  std::vector<SteadyState> out;
  out.reserve(roots.size());
  for (std::size_t i = 0; i < roots.size(); ++i) {
    SteadyState s = make_steady_state(roots[i].n, beta, params.delta_c, params.kappa, params.eta);
    s.fold_point = roots[i].fold;
    if (roots.size() == 1) {
      s.branch = Branch::single;
    } else if (i == 0) {
      s.branch = Branch::lower;
    } else if (i + 1 == roots.size()) {
      s.branch = Branch::upper;
    } else {
      s.branch = Branch::middle;
    }
    out.push_back(s);
  }
  return out;
}

namespace {

std::vector<std::vector<SteadyState>> roots_on_grid(const DerivedModel& model, SystemParams params,
                                                    std::span<const double> grid) {
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    if (!std::isfinite(grid[i]) || !(grid[i] <= grid[i + 1])) {
      throw ValidationError("delta_c grid must be finite and sorted ascending");
    }
  }
  std::vector<std::vector<SteadyState>> all;
  all.reserve(grid.size());
  for (double dc : grid) {
    params.delta_c = dc;
    all.push_back(solve_steady_state(model, params));
  }
  return all;
}

std::size_t nearest(const std::vector<SteadyState>& roots, double n) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < roots.size(); ++k) {
    if (std::fabs(roots[k].photon_number - n) < std::fabs(roots[best].photon_number - n)) best = k;
  }
  return best;
}

}  // namespace

std::vector<BranchCurve> sweep_photon_number(const DerivedModel& model, const SystemParams& params,
                                             std::span<const double> delta_c_grid) {
  const auto all = roots_on_grid(model, params, delta_c_grid);

  std::vector<BranchCurve> curves;
  std::vector<std::size_t> active;  // indices into curves that reached the previous point

  for (std::size_t i = 0; i < all.size(); ++i) {
    const auto& roots = all[i];
    // Greedy nearest matching between active curve endpoints and the new roots.
    std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
    for (std::size_t a = 0; a < active.size(); ++a) {
      const double last = curves[active[a]].states.back().photon_number;
      for (std::size_t r = 0; r < roots.size(); ++r) {
        pairs.emplace_back(std::fabs(roots[r].photon_number - last), a, r);
      }
    }
    std::sort(pairs.begin(), pairs.end());
    std::vector<bool> curve_used(active.size(), false);
    std::vector<bool> root_used(roots.size(), false);
    std::vector<std::size_t> next_active;
    for (const auto& [dist, a, r] : pairs) {
      if (curve_used[a] || root_used[r]) continue;
      curve_used[a] = true;
      root_used[r] = true;
      curves[active[a]].delta_c.push_back(delta_c_grid[i]);
      curves[active[a]].states.push_back(roots[r]);
      next_active.push_back(active[a]);
    }
    for (std::size_t r = 0; r < roots.size(); ++r) {
      if (root_used[r]) continue;
      BranchCurve c;
      c.start_index = i;
      c.delta_c.push_back(delta_c_grid[i]);
      c.states.push_back(roots[r]);
      curves.push_back(std::move(c));
      next_active.push_back(curves.size() - 1);
    }
    active = std::move(next_active);
  }
  return curves;
}

std::vector<SteadyState> continue_branch(const std::vector<std::vector<SteadyState>>& roots) {
  std::vector<SteadyState> chosen(roots.size());
  if (roots.empty()) return chosen;

  std::size_t anchor = roots.size();
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (roots[i].size() == 1) {
      anchor = i;
      break;
    }
  }
  if (anchor == roots.size()) {
    anchor = 0;
    chosen[0] = roots[0].back();
  } else {
    chosen[anchor] = roots[anchor].front();
  }
  for (std::size_t i = anchor + 1; i < roots.size(); ++i) {
    chosen[i] = roots[i][nearest(roots[i], chosen[i - 1].photon_number)];
  }
  for (std::size_t i = anchor; i-- > 0;) {
    chosen[i] = roots[i][nearest(roots[i], chosen[i + 1].photon_number)];
  }
  return chosen;
}

std::vector<SteadyState> select_branch_by_continuation(const DerivedModel& model,
                                                       const SystemParams& params,
                                                       std::span<const double> delta_c_grid) {
  return continue_branch(roots_on_grid(model, params, delta_c_grid));
}

}  // namespace hybridom
