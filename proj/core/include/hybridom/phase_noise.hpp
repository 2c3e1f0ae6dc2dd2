#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "hybridom/linear_system.hpp"
#include "hybridom/model.hpp"

namespace hybridom {

struct NoiseSpectrumPoint {
  double omega = 0.0;
  double s = 0.0;
};

// S(omega) = 2 Gamma_l omega_N^4 / ((omega^2 - omega_N^2)^2 + gamma~^2 omega^2),
// two-sided, normalized so that <dpsi^2> = (1/2pi) int S d omega.
double noise_spectrum(const PhaseNoiseParams& p, double omega);
std::vector<NoiseSpectrumPoint> spectrum(const PhaseNoiseParams& p, std::span<const double> omega_grid);

// Location of the spectral maximum: sqrt(omega_N^2 - gamma~^2 / 2) when
// gamma~ < sqrt(2) omega_N, zero otherwise.
double spectral_peak_frequency(const PhaseNoiseParams& p);

// Stationary <dpsi^2> = Gamma_l omega_N^2 / gamma~.
double phase_rate_variance(const PhaseNoiseParams& p);

enum class SdeScheme {
  // x += A x dt + sqrt(D dt) xi; requires dt ||A||_inf < 0.1.
  euler_maruyama,
  // x <- exp(A dt) x + chol(Q_dt) xi with Q_dt = int_0^dt e^{As} D e^{A^T s} ds
  // (Van Loan). Exact in distribution for any dt.
  exact,
};

struct SdeRunConfig {
  double dt = 0.0;  // [s]
  std::size_t n_steps = 0;
  std::size_t n_trajectories = 200;
  double burn_in_fraction = 0.2;
  std::uint64_t seed = 1;
  SdeScheme scheme = SdeScheme::euler_maruyama;
  std::size_t sample_stride = 1;  // accumulate every k-th post-burn-in step
  unsigned jobs = 1;
  std::optional<std::filesystem::path> trajectory_dump;  // trajectory 0 only

  void validate(const Eigen::MatrixXd& drift) const;
};

// dt = 0.01 / kappa, 20% burn-in, 200 trajectories.
SdeRunConfig default_sde_config(const SystemParams& params, std::size_t n_steps);

struct SdeResult {
  Eigen::MatrixXd v_est;   // symmetrized second moments, ensemble and time averaged
  Eigen::MatrixXd std_error;  // standard error across trajectories
  std::size_t samples_per_trajectory = 0;
};

// Integrates du = A u dt + B dW from u = 0, with B B^T = D: quantum input
// noises are replaced by classical white noise with the same symmetrized
// correlators, which leaves the second moments of a linear system unchanged.
// Throws NumericalError if a trajectory diverges.
SdeResult simulate_sde(const Eigen::MatrixXd& drift, const Eigen::MatrixXd& diffusion,
                       const SdeRunConfig& cfg);

// Refuses unstable systems with UnstableSystemError.
SdeResult simulate_sde(const LinearSystem& sys, const SdeRunConfig& cfg);

struct SpectrumEstimate {
  std::vector<double> omega;  // 2 pi k / (M dt), k = 0 .. M/2
  std::vector<double> s;      // Hann-windowed, segment-averaged periodogram
  std::vector<double> std_error;
  std::size_t segments = 0;
};

// Periodogram of one state component, averaged over non-overlapping
// segments of `segment_length` samples from every trajectory.
SpectrumEstimate spectrum_from_trajectories(const Eigen::MatrixXd& drift,
                                            const Eigen::MatrixXd& diffusion,
                                            const SdeRunConfig& cfg, int component,
                                            std::size_t segment_length);

// The phase-noise pair (dpsi, dtheta) of the full system, component dpsi.
SpectrumEstimate spectrum_from_trajectories(const LinearSystem& sys, const SdeRunConfig& cfg,
                                            std::size_t segment_length);

// Parabolic refinement of the discrete maximum.
double estimate_peak_frequency(const SpectrumEstimate& est);

// exp(A h) and Q_h for the exact scheme; exposed for testing.
struct ExactStep {
  Eigen::MatrixXd transition;
  Eigen::MatrixXd noise_covariance;
};
ExactStep exact_discretization(const Eigen::MatrixXd& drift, const Eigen::MatrixXd& diffusion,
                               double dt);

}  // namespace hybridom
