#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "hybridom/error.hpp"
#include "hybridom/steady_state.hpp"
#include "oracles.hpp"

using namespace hybridom;

namespace {

double residual(double n, double beta, double dc, double kappa, double eta) {
  const double d = dc - beta * n;
  return std::fabs(n * (kappa * kappa + d * d) - eta * eta) / (eta * eta);
}

std::vector<double> grid(double lo, double hi, int n, double scale) {
  std::vector<double> g;
  for (int i = 0; i < n; ++i) g.push_back(scale * (lo + (hi - lo) * i / (n - 1)));
  return g;
}

}  // namespace

TEST(SteadyState, UndrivenCavity) {
  SystemParams p = SystemParams::paper_defaults();
  p.eta = 0.0;
  const auto states = solve_steady_state(derive(p), p);
  ASSERT_EQ(states.size(), 1u);
  EXPECT_EQ(states[0].alpha, std::complex<double>(0.0, 0.0));
  EXPECT_EQ(states[0].delta_d, p.delta_c);
  EXPECT_EQ(states[0].branch, Branch::single);
}

TEST(SteadyState, LinearCavityIsLorentzian) {
  SystemParams p = SystemParams::paper_defaults();
  DerivedModel m = derive(p);
  m.xi_m = m.xi_c = 0.0;
  for (double dc : {-30.0, -1.0, 0.0, 2.5, 100.0}) {
    p.delta_c = dc * p.kappa;
    const auto states = solve_steady_state(m, p);
    ASSERT_EQ(states.size(), 1u);
    const double expected = p.eta * p.eta / (p.kappa * p.kappa + p.delta_c * p.delta_c);
    EXPECT_NEAR(states[0].photon_number, expected, 4e-16 * expected);
    EXPECT_EQ(states[0].delta_d, p.delta_c);
  }
}

TEST(SteadyState, SelfConsistency) {
  SystemParams p = SystemParams::paper_defaults();
  const DerivedModel m = derive(p);
  const double beta = m.nonlinear_shift(p);
  for (double dc = -150.0; dc <= 150.0; dc += 7.5) {
    p.delta_c = dc * p.kappa;
    for (const auto& s : solve_steady_state(m, p)) {
      EXPECT_LT(residual(s.photon_number, beta, p.delta_c, p.kappa, p.eta), 1e-10);
      const std::complex<double> alpha = -p.eta / std::complex<double>(p.kappa, s.delta_d);
      EXPECT_LT(std::abs(s.alpha - alpha), 1e-12 * std::abs(alpha));
      EXPECT_NEAR(s.delta_d, p.delta_c - beta * s.photon_number, 1e-9 * std::fabs(s.delta_d));
      EXPECT_NEAR(std::norm(s.alpha), s.photon_number, 1e-9 * s.photon_number);
      EXPECT_EQ(s.alpha_r(), s.alpha.real());
      EXPECT_EQ(s.alpha_i(), s.alpha.imag());
    }
  }
}

TEST(SteadyState, RootsMatchDenseScan) {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> log_beta(-2.0, 1.5), dcu(-50.0, 80.0), log_eta(-1.0, 1.5);
  int multistable = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const double kappa = 1.0;
    const double beta = std::pow(10.0, log_beta(rng));
    const double dc = dcu(rng);
    const double eta = std::pow(10.0, log_eta(rng));
    const auto roots = solve_photon_cubic(beta, dc, kappa, eta);
    const auto scan = oracle::cubic_roots_by_scan(beta, dc, kappa, eta);
    ASSERT_FALSE(roots.empty());
    for (const auto& r : roots) EXPECT_LT(residual(r.n, beta, dc, kappa, eta), 1e-10);
    if (roots.size() == 3) ++multistable;
    // Near-tangent pairs can hide between scan points; compare only when no fold was reported.
    const bool any_fold = std::any_of(roots.begin(), roots.end(), [](const PhotonRoot& r) { return r.fold; });
    if (any_fold) continue;
    ASSERT_EQ(roots.size(), scan.size()) << "beta=" << beta << " dc=" << dc << " eta=" << eta;
    for (std::size_t i = 0; i < roots.size(); ++i) {
      EXPECT_NEAR(roots[i].n, scan[i], 1e-8 * std::max(scan[i], 1e-300)) << i;
    }
  }
  EXPECT_GT(multistable, 5);
}

TEST(SteadyState, RootCountIsOddAwayFromFolds) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const auto roots = solve_photon_cubic(10.0 * u(rng), 100.0 * u(rng) - 20.0, 1.0, 1.0 + 10.0 * u(rng));
    const bool fold = std::any_of(roots.begin(), roots.end(), [](const PhotonRoot& r) { return r.fold; });
    if (!fold) EXPECT_EQ(roots.size() % 2, 1u);
  }
}

TEST(SteadyState, ThreeBranchesAreLabelled) {
  SystemParams p = SystemParams::paper_defaults();
  p.eta = 10.0 * p.kappa;
  p.delta_c = 50.0 * p.kappa;
  const auto states = solve_steady_state(derive(p), p);
  ASSERT_EQ(states.size(), 3u);
  EXPECT_EQ(states[0].branch, Branch::lower);
  EXPECT_EQ(states[1].branch, Branch::middle);
  EXPECT_EQ(states[2].branch, Branch::upper);
  EXPECT_LT(states[0].photon_number, states[1].photon_number);
  EXPECT_LT(states[1].photon_number, states[2].photon_number);
}

TEST(SteadyState, TangentRootsMergeIntoFold) {
  // f(n) = n (1 + (d - n)^2) - e^2 with a double root at n = 2.
  const double n_star = 2.0;
  const double x = n_star - std::sqrt(n_star * n_star - 1.0);
  const double d = x + n_star;
  const double e = std::sqrt(n_star * (1.0 + x * x));
  const auto roots = solve_photon_cubic(1.0, d, 1.0, e);
  ASSERT_EQ(roots.size(), 2u);
  int folds = 0;
  for (const auto& r : roots) {
    if (r.fold) {
      ++folds;
      EXPECT_NEAR(r.n, n_star, 1e-6);
    }
  }
  EXPECT_EQ(folds, 1);
}

TEST(SweepPhotonNumber, SingleRootRegionGivesOneCurve) {
  SystemParams p = SystemParams::paper_defaults();
  const auto g = grid(-150.0, -20.0, 131, p.kappa);
  const auto curves = sweep_photon_number(derive(p), p, g);
  ASSERT_EQ(curves.size(), 1u);
  EXPECT_EQ(curves[0].start_index, 0u);
  EXPECT_EQ(curves[0].states.size(), g.size());
}

TEST(SweepPhotonNumber, PeakBoundedByResonantValue) {
  SystemParams p = SystemParams::paper_defaults();
  const auto g = grid(-150.0, 150.0, 601, p.kappa);
  const double bound = p.eta * p.eta / (p.kappa * p.kappa);
  double peak = 0.0;
  for (const auto& c : sweep_photon_number(derive(p), p, g)) {
    for (const auto& s : c.states) peak = std::max(peak, s.photon_number);
  }
  EXPECT_LE(peak, bound * (1.0 + 1e-12));
  EXPECT_GT(peak, 0.0);
}

TEST(SweepPhotonNumber, BranchesAreContinuous) {
  SystemParams p = SystemParams::paper_defaults();
  p.eta = 10.0 * p.kappa;
  const DerivedModel m = derive(p);
  double coarse = 0.0;
  double fine = 0.0;
  for (int n : {401, 3201}) {
    const auto g = grid(-20.0, 120.0, n, p.kappa);
    double worst = 0.0;
    for (const auto& c : sweep_photon_number(m, p, g)) {
      for (std::size_t k = 1; k < c.states.size(); ++k) {
        if (c.states[k].fold_point || c.states[k - 1].fold_point) continue;
        worst = std::max(worst, std::fabs(c.states[k].photon_number - c.states[k - 1].photon_number));
      }
    }
    (n == 401 ? coarse : fine) = worst;
  }
  EXPECT_LT(fine, coarse);
}

TEST(SweepPhotonNumber, MultistableWindowHasThreeCurves) {
  SystemParams p = SystemParams::paper_defaults();
  p.eta = 10.0 * p.kappa;
  const auto g = grid(-20.0, 120.0, 701, p.kappa);
  const auto curves = sweep_photon_number(derive(p), p, g);
  EXPECT_GE(curves.size(), 3u);
  for (const auto& c : curves) {
    EXPECT_EQ(c.delta_c.size(), c.states.size());
    for (std::size_t k = 0; k < c.delta_c.size(); ++k) EXPECT_EQ(c.delta_c[k], g[c.start_index + k]);
  }
}

TEST(SweepPhotonNumber, RejectsUnsortedGrid) {
  SystemParams p = SystemParams::paper_defaults();
  const std::vector<double> g = {0.0, 2.0, 1.0};
  EXPECT_THROW(sweep_photon_number(derive(p), p, g), ValidationError);
}

TEST(BranchSelection, FollowsContinuationFromSingleRootRegion) {
  SystemParams p = SystemParams::paper_defaults();
  p.eta = 10.0 * p.kappa;
  const DerivedModel m = derive(p);
  const auto g = grid(-20.0, 120.0, 701, p.kappa);
  const auto chosen = select_branch_by_continuation(m, p, g);
  ASSERT_EQ(chosen.size(), g.size());
  // Starting on the red side, the chosen branch stays on the continuously
  // connected (upper) solution through the bistable window.
  for (std::size_t k = 1; k < chosen.size(); ++k) {
    if (chosen[k].branch == Branch::single && chosen[k - 1].branch == Branch::single) continue;
    EXPECT_NE(chosen[k].branch, Branch::middle);
  }
}
