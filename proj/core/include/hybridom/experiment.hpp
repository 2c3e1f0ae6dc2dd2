#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hybridom/params_io.hpp"

namespace hybridom {

enum class ExperimentKind {
  photon_sweep,          // steady-state branches vs delta_c
  entanglement_sweep,    // E_N vs delta_c
  entanglement_vs_pump,  // E_N vs eta at fixed delta_c
  collision_sweep,       // E_N vs delta_c plus effective frequencies
  effective_sweep,       // adiabatic model vs Delta_d
  spectrum,              // phase-noise spectrum, analytic and sampled
  oracle_check,          // SDE ensemble against the Lyapunov solution
};

std::string_view to_string(ExperimentKind k);
ExperimentKind parse_kind(std::string_view name);

// Swept variable in normalized units: delta_c/kappa, eta/kappa, Delta_d/kappa,
// or omega/omega_N for spectra.
struct Grid {
  double start = 0.0;
  double stop = 0.0;
  std::size_t n_points = 0;

  void validate() const;
  std::vector<double> values() const;
};

// Parses "start:stop:n".
Grid parse_grid(std::string_view text);

struct Variant {
  std::string label;
  std::vector<std::string> overrides;  // KEY=VAL, applied after the base overrides
};

struct ExperimentSpec {
  std::string name;  // subcommand that produced the spec
  ExperimentKind kind = ExperimentKind::entanglement_sweep;
  ParamDocument params = paper_defaults_document();
  std::vector<std::string> overrides;
  Grid grid;
  std::vector<Variant> variants = {{"default", {}}};
  std::uint64_t seed = 1;
  unsigned jobs = 1;
  // Stochastic experiments only.
  std::size_t sde_trajectories = 200;
  std::size_t sde_steps = 0;  // 0 picks a kind-specific default

  void validate() const;
};

// Figure reproductions with their axes and variants: fig2 .. fig7, spectrum,
// oracle-check. Throws ValidationError for unknown names.
ExperimentSpec preset(std::string_view name);

struct RunResult {
  int exit_code = 0;  // 0, or 3 when oracle_check disagrees
  std::vector<std::filesystem::path> csv_files;
  std::filesystem::path manifest;
  std::string input_hash;
};

// Writes one CSV per variant and manifest.json into out_dir. Per-point
// failures go to the status column; only invalid specs throw.
RunResult run(const ExperimentSpec& spec, const std::filesystem::path& out_dir);

// FNV-1a 64 over the canonical spec: kind, resolved parameters of every
// variant, grid, seed and stochastic settings.
std::string input_hash(const ExperimentSpec& spec);

}  // namespace hybridom
