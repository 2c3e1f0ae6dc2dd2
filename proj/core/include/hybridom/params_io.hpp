#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hybridom/model.hpp"

namespace hybridom {

// Flat `key = value` parameter files, one SystemParams field per key.
//
//   # comment
//   kappa = 1.3 MHz          cycles/s, multiplied by 2 pi
//   omega_m = 1e5 rad/s      angular, taken as is
//   omega_R = 23.7e3         bare number: needs omega_R_is_angular
//   omega_R_is_angular = true
//   eta = 100 kappa          multiple of another frequency field
//
// Frequency keys: kappa g0 Delta_a omega_R omega_sw gamma_c omega_m gamma_m eta
// delta_c_detuning Gamma_l omega_N gamma_tilde, plus the optional coupling
// overrides xi_m and xi_c. Other keys: N_atoms cavity_length pump_wavelength
// mirror_mass temperature n_ph (SI units; n_ph defaults to 0).
struct ParamEntry {
  std::string key;
  std::string value;
  int line = 0;  // 0 for entries that came from overrides
};

struct ParamDocument {
  std::string source;
  std::vector<ParamEntry> entries;

  // Replaces an existing key or appends a new one.
  void set(std::string_view key, std::string_view value);
  const ParamEntry* find(std::string_view key) const;
};

// Couplings that replace the derived xi_m / xi_c when present.
struct ModelOverrides {
  std::optional<double> xi_m;
  std::optional<double> xi_c;

  void apply(DerivedModel& model) const;
};

struct ParsedParams {
  SystemParams params;
  ModelOverrides overrides;
};

ParamDocument parse_document(std::string_view text, std::string source = "<text>");
ParamDocument load_document(const std::filesystem::path& path);

// Resolves units and references. Throws ValidationError listing every
// unknown key, missing key and missing unit flag found.
ParsedParams resolve(const ParamDocument& doc);

// `paper_defaults` selects the built-in preset; anything else is a file path.
ParsedParams parse_params(const std::filesystem::path& file);

// Applies KEY=VAL strings on top of a document.
void apply_overrides(ParamDocument& doc, const std::vector<std::string>& overrides);

// Canonical form: every key in fixed order, frequencies in rad/s with
// explicit *_is_angular = true flags, %.17g numbers.
std::string serialize_params(const ParsedParams& p);

std::string_view paper_defaults_text();
ParamDocument paper_defaults_document();

// Parses one frequency literal ("1kHz", "2.5 kappa", ...) against a resolved
// parameter set; used for CLI list flags such as --gamma-l.
double parse_frequency(std::string_view text, const SystemParams& context);

}  // namespace hybridom
