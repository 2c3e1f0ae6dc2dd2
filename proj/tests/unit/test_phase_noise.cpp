#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "hybridom/error.hpp"
#include "hybridom/gaussian.hpp"
#include "hybridom/phase_noise.hpp"
#include "hybridom/steady_state.hpp"
#include "oracles.hpp"

using namespace hybridom;

namespace {

PhaseNoiseParams unit_noise() {
  PhaseNoiseParams p;
  p.linewidth = 1.0;
  p.omega_n = 1.0;
  p.gamma_tilde = 0.5;
  return p;
}

void phase_block(const PhaseNoiseParams& p, Eigen::MatrixXd& a, Eigen::MatrixXd& d) {
  a = Eigen::MatrixXd::Zero(2, 2);
  d = Eigen::MatrixXd::Zero(2, 2);
  a(0, 1) = p.omega_n;
  a(1, 0) = -p.omega_n;
  a(1, 1) = -p.gamma_tilde;
  d(1, 1) = 2.0 * p.linewidth * p.omega_n * p.omega_n;
}

void thermal_oscillator(Eigen::MatrixXd& a, Eigen::MatrixXd& d, double nbar) {
  a = Eigen::MatrixXd::Zero(2, 2);
  d = Eigen::MatrixXd::Zero(2, 2);
  a << 0.0, 1.0, -1.0, -0.5;
  d(1, 1) = 0.5 * (2.0 * nbar + 1.0);
}

}  // namespace

TEST(NoiseSpectrum, SpecialPoints) {
  const SystemParams sp = SystemParams::paper_defaults();
  const PhaseNoiseParams& p = sp.phase_noise;
  EXPECT_NEAR(noise_spectrum(p, 0.0), 2.0 * p.linewidth, 1e-12 * p.linewidth);
  const double at_center = 2.0 * p.linewidth * p.omega_n * p.omega_n / (p.gamma_tilde * p.gamma_tilde);
  EXPECT_NEAR(noise_spectrum(p, p.omega_n), at_center, 1e-12 * at_center);
  const double w = 1e3 * p.omega_n;
  EXPECT_NEAR(noise_spectrum(p, w) * std::pow(w / p.omega_n, 4), 2.0 * p.linewidth, 1e-5 * p.linewidth);
  EXPECT_DOUBLE_EQ(noise_spectrum(p, -0.7 * p.omega_n), noise_spectrum(p, 0.7 * p.omega_n));
}

TEST(NoiseSpectrum, ScalesWithLinewidth) {
  PhaseNoiseParams p = unit_noise();
  const double s1 = noise_spectrum(p, 0.8);
  p.linewidth = 7.0;
  EXPECT_NEAR(noise_spectrum(p, 0.8), 7.0 * s1, 1e-12 * s1);
  p.linewidth = 0.0;
  EXPECT_EQ(noise_spectrum(p, 0.8), 0.0);
}

TEST(NoiseSpectrum, PeakLocation) {
  PhaseNoiseParams p = unit_noise();
  const double peak = spectral_peak_frequency(p);
  EXPECT_NEAR(peak, std::sqrt(1.0 - 0.125), 1e-15);
  std::vector<double> grid;
  for (int i = 0; i <= 200000; ++i) grid.push_back(2.0 * i / 200000.0);
  const auto s = spectrum(p, grid);
  std::size_t best = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i].s > s[best].s) best = i;
  }
  EXPECT_NEAR(s[best].omega, peak, 2e-5);
  p.gamma_tilde = 2.0;
  EXPECT_EQ(spectral_peak_frequency(p), 0.0);
}

TEST(NoiseSpectrum, AreaIsPhaseRateVariance) {
  for (double gt : {0.05, 0.5, 1.3}) {
    PhaseNoiseParams p = unit_noise();
    p.omega_n = 3.0;
    p.gamma_tilde = gt * p.omega_n;
    const double area = oracle::integrate_spectrum([&](double w) { return noise_spectrum(p, w); }, p.omega_n);
    EXPECT_NEAR(area, phase_rate_variance(p), 1e-6 * phase_rate_variance(p));
    Eigen::MatrixXd a, d;
    phase_block(p, a, d);
    EXPECT_NEAR(solve_lyapunov(a, d).v(0, 0), phase_rate_variance(p), 1e-10 * phase_rate_variance(p));
  }
}

TEST(ExactDiscretization, MatchesQuadrature) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const auto rs = oracle::random_stable_system(rng, 5);
    for (double dt : {1e-3, 0.3, 4.0}) {
      const ExactStep step = exact_discretization(rs.a, rs.d, dt);
      Eigen::EigenSolver<Eigen::MatrixXd> es(rs.a);
      const Eigen::MatrixXcd v = es.eigenvectors();
      const Eigen::VectorXcd l = (es.eigenvalues() * dt).array().exp();
      const Eigen::MatrixXd phi = (v * l.asDiagonal() * v.inverse()).real();
      EXPECT_LT((step.transition - phi).cwiseAbs().maxCoeff(), 1e-9 * std::max(1.0, phi.cwiseAbs().maxCoeff()));
      const Eigen::MatrixXd q = oracle::lyapunov_integral(rs.a, rs.d, dt, 4000);
      EXPECT_LT((step.noise_covariance - q).cwiseAbs().maxCoeff(), 1e-8 * q.cwiseAbs().maxCoeff())
          << "dt " << dt;
    }
  }
}

TEST(ExactDiscretization, LongStepReachesStationaryCovariance) {
  std::mt19937_64 rng(2);
  const auto rs = oracle::random_stable_system(rng, 4);
  const ExactStep step = exact_discretization(rs.a, rs.d, 400.0);
  const Eigen::MatrixXd v = oracle::lyapunov_eigenbasis(rs.a, rs.d);
  EXPECT_LT((step.noise_covariance - v).cwiseAbs().maxCoeff(), 1e-8 * v.cwiseAbs().maxCoeff());
  EXPECT_LT(step.transition.cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Sde, ThermalOscillatorExactScheme) {
  Eigen::MatrixXd a, d;
  thermal_oscillator(a, d, 1.5);
  SdeRunConfig cfg;
  cfg.dt = 0.05;
  cfg.n_steps = 20000;
  cfg.n_trajectories = 100;
  cfg.scheme = SdeScheme::exact;
  const SdeResult r = simulate_sde(a, d, cfg);
  EXPECT_EQ(r.samples_per_trajectory, 16000u);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double expect = i == j ? 2.0 : 0.0;
      EXPECT_LT(std::fabs(r.v_est(i, j) - expect), 3.0 * r.std_error(i, j)) << i << j;
    }
  }
}

TEST(Sde, ThermalOscillatorEulerMaruyama) {
  Eigen::MatrixXd a, d;
  thermal_oscillator(a, d, 0.0);
  SdeRunConfig cfg;
  cfg.dt = 0.002;
  cfg.n_steps = 100000;
  cfg.n_trajectories = 60;
  const SdeResult r = simulate_sde(a, d, cfg);
  // first-order bias of the scheme is about dt / gamma relative
  for (int i = 0; i < 2; ++i) {
    EXPECT_LT(std::fabs(r.v_est(i, i) - 0.5), 3.0 * r.std_error(i, i) + 0.005);
  }
}

TEST(Sde, FullSystemAgreesWithLyapunov) {
  const SystemParams p = SystemParams::paper_defaults();
  const DerivedModel m = derive(p);
  std::vector<double> grid;
  for (int i = 0; i <= 200; ++i) grid.push_back(p.kappa * (-150.0 + 135.0 * i / 200.0));
  const LinearSystem sys = build_linear_system(m, p, select_branch_by_continuation(m, p, grid).back());
  const CovarianceMatrix cm = solve_lyapunov(sys);

  SdeRunConfig cfg;
  cfg.scheme = SdeScheme::exact;
  cfg.dt = 0.1 / std::max(p.omega_m, m.omega_c);
  cfg.n_steps = 40000;
  cfg.n_trajectories = 60;
  cfg.seed = 4;
  const SdeResult r = simulate_sde(sys, cfg);
  int outside = 0;
  for (int i = 0; i < 8; ++i) {
    const double z = (r.v_est(i, i) - cm.v(i, i)) / r.std_error(i, i);
    EXPECT_LT(std::fabs(z), 4.0) << "component " << i;
    if (std::fabs(z) > 3.0) ++outside;
  }
  EXPECT_LE(outside, 1);
}

TEST(Sde, ReproducibleAndIndependentOfJobs) {
  Eigen::MatrixXd a, d;
  thermal_oscillator(a, d, 0.3);
  SdeRunConfig cfg;
  cfg.dt = 0.05;
  cfg.n_steps = 2000;
  cfg.n_trajectories = 12;
  cfg.scheme = SdeScheme::exact;
  cfg.seed = 99;
  const SdeResult r1 = simulate_sde(a, d, cfg);
  const SdeResult r2 = simulate_sde(a, d, cfg);
  cfg.jobs = 3;
  const SdeResult r3 = simulate_sde(a, d, cfg);
  EXPECT_EQ(r1.v_est, r2.v_est);
  EXPECT_EQ(r1.v_est, r3.v_est);
  cfg.seed = 100;
  EXPECT_NE(simulate_sde(a, d, cfg).v_est, r1.v_est);
}

TEST(Sde, EulerStepBoundIsEnforced) {
  Eigen::MatrixXd a, d;
  thermal_oscillator(a, d, 0.0);
  SdeRunConfig cfg;
  cfg.dt = 0.2;
  cfg.n_steps = 100;
  EXPECT_THROW(simulate_sde(a, d, cfg), ValidationError);
  cfg.dt *= 0.5;  // 0.1 * 1.5 still too coarse
  EXPECT_THROW(simulate_sde(a, d, cfg), ValidationError);
  cfg.dt = 0.05;
  EXPECT_NO_THROW(simulate_sde(a, d, cfg));
  cfg.scheme = SdeScheme::exact;
  cfg.dt = 10.0;
  EXPECT_NO_THROW(simulate_sde(a, d, cfg));
}

TEST(Sde, InvalidConfigurations) {
  Eigen::MatrixXd a, d;
  thermal_oscillator(a, d, 0.0);
  SdeRunConfig cfg;
  cfg.dt = 0.01;
  cfg.n_steps = 100;
  cfg.n_trajectories = 1;
  EXPECT_THROW(simulate_sde(a, d, cfg), ValidationError);
  cfg.n_trajectories = 4;
  cfg.burn_in_fraction = 1.0;
  EXPECT_THROW(simulate_sde(a, d, cfg), ValidationError);
}

TEST(Sde, DivergentTrajectoryThrows) {
  Eigen::MatrixXd a(1, 1), d(1, 1);
  a << 1.0;
  d << 1.0;
  SdeRunConfig cfg;
  cfg.dt = 0.05;
  cfg.n_steps = 100000;
  cfg.n_trajectories = 2;
  EXPECT_THROW(simulate_sde(a, d, cfg), NumericalError);
}

TEST(Sde, RefusesUnstableSystem) {
  SystemParams p = SystemParams::paper_defaults();
  p.eta = 10.0 * p.kappa;
  p.delta_c = 50.0 * p.kappa;
  const DerivedModel m = derive(p);
  const auto roots = solve_steady_state(m, p);
  ASSERT_EQ(roots.size(), 3u);
  const LinearSystem sys = build_linear_system(m, p, roots[1]);
  SdeRunConfig cfg;
  cfg.scheme = SdeScheme::exact;
  cfg.dt = 1e-7;
  cfg.n_steps = 10;
  EXPECT_THROW(simulate_sde(sys, cfg), UnstableSystemError);
}

TEST(Sde, TrajectoryDumpLayout) {
  Eigen::MatrixXd a, d;
  thermal_oscillator(a, d, 0.0);
  const auto path = std::filesystem::temp_directory_path() / "hybridom_traj_test.bin";
  SdeRunConfig cfg;
  cfg.dt = 0.25;
  cfg.n_steps = 37;
  cfg.n_trajectories = 3;
  cfg.scheme = SdeScheme::exact;
  cfg.trajectory_dump = path;
  simulate_sde(a, d, cfg);

  std::ifstream in(path, std::ios::binary);
  char magic[8];
  std::uint32_t dim = 0;
  std::uint64_t rows = 0;
  double dt = 0.0;
  in.read(magic, 8);
  in.read(reinterpret_cast<char*>(&dim), sizeof dim);
  in.read(reinterpret_cast<char*>(&rows), sizeof rows);
  in.read(reinterpret_cast<char*>(&dt), sizeof dt);
  EXPECT_EQ(std::string(magic, 8), "HYBTRAJ1");
  EXPECT_EQ(dim, 2u);
  EXPECT_EQ(rows, 37u);
  EXPECT_EQ(dt, 0.25);
  in.close();
  EXPECT_EQ(std::filesystem::file_size(path), 28u + 37u * 2u * sizeof(double));
  std::filesystem::remove(path);
}

TEST(SpectrumEstimate, PhaseBlockPeriodogram) {
  const PhaseNoiseParams p = unit_noise();
  Eigen::MatrixXd a, d;
  phase_block(p, a, d);
  SdeRunConfig cfg;
  cfg.dt = 0.01;
  cfg.n_steps = 4096 * 10;
  cfg.n_trajectories = 50;
  const SpectrumEstimate est = spectrum_from_trajectories(a, d, cfg, 0, 4096);
  EXPECT_EQ(est.segments, 50u * 8u);
  ASSERT_EQ(est.omega.size(), 2049u);
  const double dw = est.omega[1];
  EXPECT_NEAR(dw, 2.0 * constants::kPi / (4096 * 0.01), 1e-12);

  double area = est.s[0];
  for (std::size_t k = 1; k < est.s.size(); ++k) area += 2.0 * est.s[k];
  area *= dw / (2.0 * constants::kPi);
  EXPECT_NEAR(area, phase_rate_variance(p), 0.05 * phase_rate_variance(p));

  EXPECT_NEAR(estimate_peak_frequency(est), spectral_peak_frequency(p), 0.1 * spectral_peak_frequency(p));
  for (std::size_t k = 1; k < est.s.size() && est.omega[k] < 2.0; ++k) {
    const double expect = noise_spectrum(p, est.omega[k]);
    EXPECT_LT(std::fabs(est.s[k] - expect), 4.0 * est.std_error[k] + 0.05 * expect) << est.omega[k];
  }
}

TEST(SpectrumEstimate, RejectsBadSegments) {
  const PhaseNoiseParams p = unit_noise();
  Eigen::MatrixXd a, d;
  phase_block(p, a, d);
  SdeRunConfig cfg;
  cfg.dt = 0.01;
  cfg.n_steps = 1000;
  cfg.n_trajectories = 2;
  EXPECT_THROW(spectrum_from_trajectories(a, d, cfg, 0, 1000), ValidationError);
  EXPECT_THROW(spectrum_from_trajectories(a, d, cfg, 0, 4096), ValidationError);
  EXPECT_THROW(spectrum_from_trajectories(a, d, cfg, 2, 256), ValidationError);
}
