#pragma once

#include <cstdint>

namespace hybridom {

namespace constants {
inline constexpr double kHbar = 1.054571817e-34;      // J s
inline constexpr double kBoltzmann = 1.380649e-23;    // J / K
inline constexpr double kSpeedOfLight = 299792458.0;  // m / s
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
}  // namespace constants

// Classical laser phase noise: the phase rate is white noise filtered through
// a damped oscillator at omega_n with bandwidth gamma_tilde.
struct PhaseNoiseParams {
  double linewidth = 0.0;    // Gamma_l [rad/s]; zero switches the drive off
  double omega_n = 1.0;      // central frequency [rad/s]
  double gamma_tilde = 0.0;  // bandwidth [rad/s]

  void validate() const;
};

// Raw physical inputs. Every frequency is an angular frequency in rad/s.
//
// Note on naming: omega_0 (derived from pump_wavelength) is the bare cavity
// frequency. "omega_c" is reserved for the Bogoliubov mode frequency, which is
// the convention used throughout this library.
struct SystemParams {
  std::int64_t n_atoms = 0;
  double cavity_length = 0.0;    // [m]
  double pump_wavelength = 0.0;  // [m]
  double kappa = 0.0;            // cavity amplitude decay [rad/s]
  double g0 = 0.0;               // vacuum Rabi frequency [rad/s]
  double delta_a = 0.0;          // atom-pump detuning [rad/s], nonzero
  double omega_r = 0.0;          // recoil frequency [rad/s]
  double omega_sw = 0.0;         // s-wave collision frequency [rad/s]
  double gamma_c = 0.0;          // Bogoliubov mode damping [rad/s]
  double mirror_mass = 0.0;      // [kg]
  double omega_m = 0.0;          // mirror frequency [rad/s]
  double gamma_m = 0.0;          // mirror damping [rad/s]
  double eta = 0.0;              // pump rate [rad/s]
  double delta_c = 0.0;          // Stark-shifted cavity-pump detuning [rad/s]
  double temperature = 0.0;      // [K]
  double n_ph = 0.0;             // thermal photon number of the input field
  PhaseNoiseParams phase_noise;

  // Throws ValidationError naming the first offending field.
  void validate() const;

  // Rb-87 BEC in a 187 um cavity with a 1e-12 kg end mirror, pumped at
  // eta = 100 kappa with a 2pi x 1 kHz laser at T = 0.1 uK.
  static SystemParams paper_defaults();
};

struct DerivedModel {
  double u0 = 0.0;             // g0^2 / Delta_a
  double zeta = 0.0;           // sqrt(N) U0 / 2
  double stark_shift = 0.0;    // N U0 / 2, cavity frequency shift from the BEC
  double omega_bog = 0.0;      // Omega_c = 4 omega_R + omega_sw
  double omega_bog_plus = 0.0;
  double omega_bog_minus = 0.0;
  double chi = 1.0;            // (Omega_c+ / Omega_c-)^(1/4)
  double omega_c = 0.0;        // Bogoliubov oscillator frequency
  double xi_c = 0.0;           // atom-field coupling zeta / chi
  double omega_0 = 0.0;        // bare cavity frequency 2 pi c / lambda
  double xi_m = 0.0;           // mirror-field coupling
  double n_m = 0.0;            // thermal occupations
  double n_c = 0.0;
  double gamma_m_prime = 0.0;  // gamma_m (2 n_m + 1)
  double gamma_c_prime = 0.0;  // gamma_c (2 n_c + 1)

  // Kerr-type coefficient of the steady state: xi_m^2/omega_m + xi_c^2/omega_c.
  double nonlinear_shift(const SystemParams& params) const;
};

// Bose-Einstein occupation; exactly zero at T = 0.
double bose_occupation(double omega, double temperature);

DerivedModel derive(const SystemParams& params);

}  // namespace hybridom
