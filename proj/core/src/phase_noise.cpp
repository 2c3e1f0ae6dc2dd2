#include "hybridom/phase_noise.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <fstream>
#include <random>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/FFT>
#include <unsupported/Eigen/MatrixFunctions>

#include "hybridom/error.hpp"
#include "hybridom/gaussian.hpp"
#include "hybridom/parallel.hpp"

namespace hybridom {

double noise_spectrum(const PhaseNoiseParams& p, double omega) {
  const double wn2 = p.omega_n * p.omega_n;
  const double d = omega * omega - wn2;
  return 2.0 * p.linewidth * wn2 * wn2 / (d * d + p.gamma_tilde * p.gamma_tilde * omega * omega);
}

std::vector<NoiseSpectrumPoint> spectrum(const PhaseNoiseParams& p, std::span<const double> omega_grid) {
  p.validate();
  std::vector<NoiseSpectrumPoint> out;
  out.reserve(omega_grid.size());
  for (double w : omega_grid) {
    if (!std::isfinite(w)) throw ValidationError("spectrum: omega grid must be finite");
    out.push_back({w, noise_spectrum(p, w)});
  }
  return out;
}

double spectral_peak_frequency(const PhaseNoiseParams& p) {
  const double x = p.omega_n * p.omega_n - 0.5 * p.gamma_tilde * p.gamma_tilde;
  return x > 0.0 ? std::sqrt(x) : 0.0;
}

double phase_rate_variance(const PhaseNoiseParams& p) {
  return p.linewidth * p.omega_n * p.omega_n / p.gamma_tilde;
}

void SdeRunConfig::validate(const Eigen::MatrixXd& drift) const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("SdeRunConfig: dt must be > 0");
  if (n_steps == 0) throw ValidationError("SdeRunConfig: n_steps must be > 0");
  if (n_trajectories < 2) throw ValidationError("SdeRunConfig: need at least 2 trajectories");
  if (!(burn_in_fraction >= 0.0 && burn_in_fraction < 1.0)) {
    throw ValidationError("SdeRunConfig: burn_in_fraction must lie in [0, 1)");
  }
  if (sample_stride == 0) throw ValidationError("SdeRunConfig: sample_stride must be > 0");
  if (scheme == SdeScheme::euler_maruyama) {
    const double norm = drift.cwiseAbs().rowwise().sum().maxCoeff();
    if (!(dt * norm < 0.1)) {
      std::ostringstream os;
      os << "SdeRunConfig: dt * ||A|| = " << dt * norm
         << " violates the explicit-scheme bound 0.1; reduce dt or use the exact scheme";
      throw ValidationError(os.str());
    }
  }
}

SdeRunConfig default_sde_config(const SystemParams& params, std::size_t n_steps) {
  SdeRunConfig cfg;
  cfg.dt = 0.01 / params.kappa;
  cfg.n_steps = n_steps;
  return cfg;
}

namespace {

// Columns of a matrix L with L L^T = S for symmetric PSD S; zero channels dropped.
// S is first scaled to unit diagonal so that channels many orders of magnitude
// apart (quantum vs. laser-phase noise) keep their relative accuracy.
Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& s) {
  const Eigen::Index n = s.rows();
  Eigen::VectorXd scale(n);
  for (Eigen::Index i = 0; i < n; ++i) scale(i) = s(i, i) > 0.0 ? std::sqrt(s(i, i)) : 0.0;
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (scale(i) > 0.0 && scale(j) > 0.0) c(i, j) = 0.5 * (s(i, j) + s(j, i)) / (scale(i) * scale(j));
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c);
  if (es.info() != Eigen::Success) throw NumericalError("psd_factor: eigensolver failed");
  const double top = std::max(es.eigenvalues().maxCoeff(), 0.0);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (es.eigenvalues()(i) > 1e-14 * top) keep.push_back(i);
  }
  Eigen::MatrixXd l(n, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    l.col(static_cast<Eigen::Index>(k)) =
        scale.asDiagonal() * es.eigenvectors().col(keep[k]) * std::sqrt(es.eigenvalues()(keep[k]));
  }
  return l;
}

struct Stepper {
  Eigen::MatrixXd transition;  // x <- T x + N xi
  Eigen::MatrixXd noise;
};

Stepper make_stepper(const Eigen::MatrixXd& drift, const Eigen::MatrixXd& diffusion,
                     const SdeRunConfig& cfg) {
  const Eigen::Index n = drift.rows();
  Stepper s;
  if (cfg.scheme == SdeScheme::euler_maruyama) {
    s.transition = Eigen::MatrixXd::Identity(n, n) + cfg.dt * drift;
    s.noise = psd_factor(diffusion) * std::sqrt(cfg.dt);
  } else {
    const ExactStep e = exact_discretization(drift, diffusion, cfg.dt);
    s.transition = e.transition;
    s.noise = psd_factor(e.noise_covariance);
  }
  return s;
}

std::mt19937_64 trajectory_rng(std::uint64_t seed, std::size_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(static_cast<std::uint64_t>(index) >> 32)};
  return std::mt19937_64(seq);
}

// Neumaier-compensated accumulator.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::fabs(sum) >= std::fabs(x)) {
      carry += (sum - t) + x;
    } else {
      carry += (x - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + carry; }
};

class TrajectoryDump {
 public:
  TrajectoryDump(const std::filesystem::path& path, int dim, double dt) : out_(path, std::ios::binary) {
    if (!out_) throw ValidationError("cannot open trajectory dump " + path.string());
    static_assert(std::endian::native == std::endian::little, "dump format is little-endian");
    out_.write("HYBTRAJ1", 8);
    const std::uint32_t d = static_cast<std::uint32_t>(dim);
    out_.write(reinterpret_cast<const char*>(&d), sizeof d);
    rows_pos_ = out_.tellp();
    const std::uint64_t zero = 0;
    out_.write(reinterpret_cast<const char*>(&zero), sizeof zero);
    out_.write(reinterpret_cast<const char*>(&dt), sizeof dt);
  }
  ~TrajectoryDump() {
    out_.seekp(rows_pos_);
    out_.write(reinterpret_cast<const char*>(&rows_), sizeof rows_);
  }
  void row(const Eigen::VectorXd& x) {
    out_.write(reinterpret_cast<const char*>(x.data()),
               static_cast<std::streamsize>(sizeof(double) * x.size()));
    ++rows_;
  }

 private:
  std::ofstream out_;
  std::streampos rows_pos_;
  std::uint64_t rows_ = 0;
};

// Runs one trajectory and hands every post-burn-in state to `visit`.
template <typename Visit>
void run_trajectory(const Stepper& stepper, const SdeRunConfig& cfg, std::size_t index,
                    double bound, TrajectoryDump* dump, Visit&& visit) {
  const Eigen::Index n = stepper.transition.rows();
  const Eigen::Index channels = stepper.noise.cols();
  std::mt19937_64 rng = trajectory_rng(cfg.seed, index);
  std::normal_distribution<double> normal(0.0, 1.0);

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd next(n);
  Eigen::VectorXd xi(channels);
  const std::size_t burn = static_cast<std::size_t>(cfg.burn_in_fraction * static_cast<double>(cfg.n_steps));

  for (std::size_t step = 0; step < cfg.n_steps; ++step) {
    for (Eigen::Index c = 0; c < channels; ++c) xi(c) = normal(rng);
    next.noalias() = stepper.transition * x;
    next.noalias() += stepper.noise * xi;
    x.swap(next);
    if (dump) dump->row(x);
    if ((step & 1023) == 0 && !(x.cwiseAbs().maxCoeff() <= bound)) {
      std::ostringstream os;
      os << "simulate_sde: trajectory " << index << " diverged at step " << step
         << " (|u|_max = " << x.cwiseAbs().maxCoeff() << ", bound " << bound << ")";
      throw NumericalError(os.str());
    }
    if (step >= burn) visit(step - burn, x);
  }
}

double divergence_bound(const Eigen::MatrixXd& diffusion, const SdeRunConfig& cfg) {
  const double t_total = cfg.dt * static_cast<double>(cfg.n_steps);
  const double d = std::max(diffusion.diagonal().maxCoeff(), 1e-300);
  return 1e6 * std::sqrt(d * t_total) + 1e6;
}

}  // namespace

ExactStep exact_discretization(const Eigen::MatrixXd& drift, const Eigen::MatrixXd& diffusion,
                               double dt) {
  const Eigen::Index n = drift.rows();
  const double norm = drift.cwiseAbs().rowwise().sum().maxCoeff();
  int doublings = 0;
  double h = dt;
  while (norm * h > 0.5 && doublings < 60) {
    h *= 0.5;
    ++doublings;
  }
  // Van Loan: exp([[-A, D], [0, A^T]] h) = [[., F12], [0, F22]], Phi = F22^T, Q = Phi F12.
  Eigen::MatrixXd block = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  block.topLeftCorner(n, n) = -drift * h;
  block.topRightCorner(n, n) = diffusion * h;
  block.bottomRightCorner(n, n) = drift.transpose() * h;
  const Eigen::MatrixXd e = block.exp();
  Eigen::MatrixXd phi = e.bottomRightCorner(n, n).transpose();
  Eigen::MatrixXd q = phi * e.topRightCorner(n, n);
  q = 0.5 * (q + q.transpose()).eval();
  for (int k = 0; k < doublings; ++k) {
    q = (q + phi * q * phi.transpose()).eval();
    q = 0.5 * (q + q.transpose()).eval();
    phi = (phi * phi).eval();
  }
  return {phi, q};
}

SdeResult simulate_sde(const Eigen::MatrixXd& drift, const Eigen::MatrixXd& diffusion,
                       const SdeRunConfig& cfg) {
  cfg.validate(drift);
  const Eigen::Index n = drift.rows();
  const Stepper stepper = make_stepper(drift, diffusion, cfg);
  const double bound = divergence_bound(diffusion, cfg);

  std::vector<Eigen::MatrixXd> per_traj(cfg.n_trajectories);
  std::vector<std::size_t> counts(cfg.n_trajectories, 0);
  detail::parallel_for(cfg.n_trajectories, cfg.jobs, [&](std::size_t t) {
    std::optional<TrajectoryDump> dump;
    if (t == 0 && cfg.trajectory_dump) dump.emplace(*cfg.trajectory_dump, static_cast<int>(n), cfg.dt);

    std::vector<CompensatedSum> total(static_cast<std::size_t>(n * n));
    Eigen::MatrixXd block = Eigen::MatrixXd::Zero(n, n);
    std::size_t in_block = 0;
    std::size_t count = 0;
    auto flush = [&] {
      for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i <= j; ++i) total[static_cast<std::size_t>(i + n * j)].add(block(i, j));
      block.setZero();
      in_block = 0;
    };
    run_trajectory(stepper, cfg, t, bound, dump ? &*dump : nullptr,
                   [&](std::size_t k, const Eigen::VectorXd& x) {
                     if (k % cfg.sample_stride != 0) return;
                     block.triangularView<Eigen::Upper>() += x * x.transpose();
                     ++count;
                     if (++in_block == 1024) flush();
                   });
    flush();
    if (count == 0) throw ValidationError("simulate_sde: no samples after burn-in");
    Eigen::MatrixXd c(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index i = 0; i <= j; ++i) {
        c(i, j) = c(j, i) = total[static_cast<std::size_t>(i + n * j)].value() / static_cast<double>(count);
      }
    }
    per_traj[t] = std::move(c);
    counts[t] = count;
  });

  const double k = static_cast<double>(cfg.n_trajectories);
  SdeResult res;
  res.samples_per_trajectory = counts.front();
  res.v_est = Eigen::MatrixXd::Zero(n, n);
  res.std_error = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      CompensatedSum s;
      for (const auto& c : per_traj) s.add(c(i, j));
      const double mean = s.value() / k;
      CompensatedSum ss;
      for (const auto& c : per_traj) ss.add((c(i, j) - mean) * (c(i, j) - mean));
      res.v_est(i, j) = mean;
      res.std_error(i, j) = std::sqrt(ss.value() / (k - 1.0) / k);
    }
  }
  return res;
}

SdeResult simulate_sde(const LinearSystem& sys, const SdeRunConfig& cfg) {
  const StabilityReport report = check_stability(sys);
  if (!report.stable) {
    throw UnstableSystemError("simulate_sde: system is not stable", report.max_real_eig);
  }
  return simulate_sde(Eigen::MatrixXd(sys.drift), Eigen::MatrixXd(sys.diffusion), cfg);
}

SpectrumEstimate spectrum_from_trajectories(const Eigen::MatrixXd& drift,
                                            const Eigen::MatrixXd& diffusion,
                                            const SdeRunConfig& cfg, int component,
                                            std::size_t segment_length) {
  cfg.validate(drift);
  if (component < 0 || component >= drift.rows()) {
    throw ValidationError("spectrum_from_trajectories: component out of range");
  }
  if (segment_length < 16 || !std::has_single_bit(segment_length)) {
    throw ValidationError("spectrum_from_trajectories: segment_length must be a power of two >= 16");
  }
  const std::size_t post_burn =
      cfg.n_steps - static_cast<std::size_t>(cfg.burn_in_fraction * static_cast<double>(cfg.n_steps));
  const std::size_t per_traj = post_burn / segment_length;
  if (per_traj == 0) {
    throw ValidationError("spectrum_from_trajectories: trajectory shorter than one segment");
  }

  const Stepper stepper = make_stepper(drift, diffusion, cfg);
  const double bound = divergence_bound(diffusion, cfg);
  const std::size_t m = segment_length;
  const std::size_t bins = m / 2 + 1;

  std::vector<double> window(m);
  double w2 = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    window[i] = 0.5 - 0.5 * std::cos(constants::kTwoPi * static_cast<double>(i) / static_cast<double>(m));
    w2 += window[i] * window[i];
  }
  const double norm = cfg.dt / w2;

  // per-trajectory sums of the periodogram and its square over segments
  std::vector<std::vector<double>> sum(cfg.n_trajectories), sum_sq(cfg.n_trajectories);
  detail::parallel_for(cfg.n_trajectories, cfg.jobs, [&](std::size_t t) {
    Eigen::FFT<double> fft;
    std::vector<double> seg(m);
    std::vector<std::complex<double>> freq;
    sum[t].assign(bins, 0.0);
    sum_sq[t].assign(bins, 0.0);
    std::size_t fill = 0;
    std::size_t done = 0;
    run_trajectory(stepper, cfg, t, bound, nullptr, [&](std::size_t, const Eigen::VectorXd& x) {
      if (done == per_traj) return;
      seg[fill] = x(component) * window[fill];
      if (++fill < m) return;
      fill = 0;
      ++done;
      fft.fwd(freq, seg);
      for (std::size_t b = 0; b < bins; ++b) {
        const double p = norm * std::norm(freq[b]);
        sum[t][b] += p;
        sum_sq[t][b] += p * p;
      }
    });
  });

  SpectrumEstimate est;
  est.segments = per_traj * cfg.n_trajectories;
  const double count = static_cast<double>(est.segments);
  for (std::size_t b = 0; b < bins; ++b) {
    CompensatedSum s, s2;
    for (std::size_t t = 0; t < cfg.n_trajectories; ++t) {
      s.add(sum[t][b]);
      s2.add(sum_sq[t][b]);
    }
    const double mean = s.value() / count;
    const double var = std::max(s2.value() / count - mean * mean, 0.0) * count / std::max(count - 1.0, 1.0);
    est.omega.push_back(constants::kTwoPi * static_cast<double>(b) / (static_cast<double>(m) * cfg.dt));
    est.s.push_back(mean);
    est.std_error.push_back(std::sqrt(var / count));
  }
  return est;
}

SpectrumEstimate spectrum_from_trajectories(const LinearSystem& sys, const SdeRunConfig& cfg,
                                            std::size_t segment_length) {
  // The phase block is autonomous, so simulating it alone gives the same dpsi.
  const int psi = first_index(Mode::phase);
  const Eigen::MatrixXd a = sys.drift.block<2, 2>(psi, psi);
  const Eigen::MatrixXd d = sys.diffusion.block<2, 2>(psi, psi);
  return spectrum_from_trajectories(a, d, cfg, 0, segment_length);
}

double estimate_peak_frequency(const SpectrumEstimate& est) {
  if (est.s.size() < 3) throw ValidationError("estimate_peak_frequency: too few bins");
  const auto it = std::max_element(est.s.begin() + 1, est.s.end() - 1);
  const std::size_t k = static_cast<std::size_t>(it - est.s.begin());
  const double y0 = est.s[k - 1], y1 = est.s[k], y2 = est.s[k + 1];
  const double denom = y0 - 2.0 * y1 + y2;
  const double shift = denom != 0.0 ? 0.5 * (y0 - y2) / denom : 0.0;
  const double dw = est.omega[1] - est.omega[0];
  return est.omega[k] + std::clamp(shift, -0.5, 0.5) * dw;
}

}  // namespace hybridom
