#include "hybridom/params_io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "hybridom/error.hpp"

namespace hybridom {

namespace {

constexpr std::array<std::string_view, 15> kFrequencyKeys = {
    "kappa", "g0",  "Delta_a",          "omega_R", "omega_sw", "gamma_c", "omega_m", "gamma_m",
    "eta",   "delta_c_detuning", "Gamma_l", "omega_N", "gamma_tilde", "xi_m", "xi_c"};
constexpr std::array<std::string_view, 6> kPlainKeys = {
    "N_atoms", "cavity_length", "pump_wavelength", "mirror_mass", "temperature", "n_ph"};
constexpr std::array<std::string_view, 3> kOptionalKeys = {"n_ph", "xi_m", "xi_c"};
constexpr std::string_view kFlagSuffix = "_is_angular";

constexpr std::string_view kPaperDefaults = R"(# Rb-87 BEC in an optomechanical cavity with a moving end mirror.
# Recoil and mirror frequencies are read as angular frequencies, which puts
# the Bogoliubov mode at omega_c ~ omega_m.
N_atoms = 100000
cavity_length = 187e-6
pump_wavelength = 780e-9
kappa = 1.3 MHz
g0 = 14.1 MHz
Delta_a = 7.5e11
Delta_a_is_angular = true
omega_R = 23.7e3
omega_R_is_angular = true
omega_sw = 0.2 omega_R
gamma_c = 0.001 kappa
mirror_mass = 1e-12
omega_m = 1e5
omega_m_is_angular = true
gamma_m = 100 Hz
eta = 100 kappa
delta_c_detuning = -15 kappa
temperature = 0.1e-6
n_ph = 0
Gamma_l = 1 kHz
omega_N = 140 kHz
gamma_tilde = 0.5 omega_N
)";

bool contains(auto const& list, std::string_view key) {
  return std::find(list.begin(), list.end(), key) != list.end();
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Leading number and the trimmed remainder.
std::optional<std::pair<double, std::string_view>> split_number(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{}) return std::nullopt;
  std::string_view rest = trim(text.substr(static_cast<std::size_t>(ptr - text.data())));
  if (!rest.empty() && rest.front() == '*') rest = trim(rest.substr(1));
  return std::make_pair(value, rest);
}

std::optional<double> cycle_unit(std::string_view unit) {
  if (unit == "Hz") return 1.0;
  if (unit == "kHz") return 1e3;
  if (unit == "MHz") return 1e6;
  if (unit == "GHz") return 1e9;
  return std::nullopt;
}

std::optional<bool> parse_bool(std::string_view s) {
  s = trim(s);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  return std::nullopt;
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

class Resolver {
 public:
  explicit Resolver(const ParamDocument& doc) : doc_(doc) {
    for (const auto& e : doc.entries) by_key_[e.key] = &e;
  }

  std::optional<double> frequency(std::string_view key) {
    const std::string k(key);
    if (auto it = done_.find(k); it != done_.end()) return it->second;
    const ParamEntry* e = lookup(key);
    if (!e) return std::nullopt;
    if (active_.count(k)) {
      fail(*e, "circular reference");
      return std::nullopt;
    }
    active_.insert(k);
    const auto value = evaluate(*e);
    active_.erase(k);
    if (value) done_[k] = *value;
    return value;
  }

  std::optional<double> plain(std::string_view key) {
    const ParamEntry* e = lookup(key);
    if (!e) return std::nullopt;
    const auto parsed = split_number(e->value);
    if (!parsed || !parsed->second.empty()) {
      fail(*e, "expected a plain number in SI units, got '" + e->value + "'");
      return std::nullopt;
    }
    return parsed->first;
  }

  void fail(const ParamEntry& e, const std::string& msg) {
    std::ostringstream os;
    os << doc_.source;
    if (e.line > 0) os << ':' << e.line;
    os << ": " << e.key << ": " << msg;
    errors_.push_back(os.str());
  }
  void fail(const std::string& msg) { errors_.push_back(doc_.source + ": " + msg); }

  const std::vector<std::string>& errors() const { return errors_; }
  const ParamEntry* lookup(std::string_view key) const {
    const auto it = by_key_.find(std::string(key));
    return it == by_key_.end() ? nullptr : it->second;
  }

 private:
  std::optional<double> evaluate(const ParamEntry& e) {
    const auto parsed = split_number(e.value);
    if (!parsed) {
      fail(e, "cannot parse '" + e.value + "' as a frequency");
      return std::nullopt;
    }
    const auto [number, unit] = *parsed;
    if (unit.empty()) {
      const ParamEntry* flag = lookup(e.key + std::string(kFlagSuffix));
      if (!flag) {
        fail(e, "bare number needs " + e.key + std::string(kFlagSuffix) +
                    " (true: rad/s, false: Hz, multiplied by 2 pi)");
        return std::nullopt;
      }
      const auto angular = parse_bool(flag->value);
      if (!angular) {
        fail(*flag, "expected true or false, got '" + flag->value + "'");
        return std::nullopt;
      }
      return *angular ? number : constants::kTwoPi * number;
    }
    if (unit == "rad/s") return number;
    if (const auto scale = cycle_unit(unit)) return constants::kTwoPi * *scale * number;
    if (contains(kFrequencyKeys, unit)) {
      const auto ref = frequency(unit);
      if (!ref) {
        if (!lookup(unit)) fail(e, "references missing key '" + std::string(unit) + "'");
        return std::nullopt;
      }
      return number * *ref;
    }
    fail(e, "unknown unit or reference '" + std::string(unit) + "'");
    return std::nullopt;
  }

  const ParamDocument& doc_;
  std::map<std::string, const ParamEntry*> by_key_;
  std::map<std::string, double> done_;
  std::set<std::string> active_;
  std::vector<std::string> errors_;
};

}  // namespace

void ParamDocument::set(std::string_view key, std::string_view value) {
  for (auto& e : entries) {
    if (e.key == key) {
      e.value = std::string(value);
      return;
    }
  }
  entries.push_back({std::string(key), std::string(value), 0});
}

const ParamEntry* ParamDocument::find(std::string_view key) const {
  for (const auto& e : entries) {
    if (e.key == key) return &e;
  }
  return nullptr;
}

void ModelOverrides::apply(DerivedModel& model) const {
  if (xi_m) model.xi_m = *xi_m;
  if (xi_c) model.xi_c = *xi_c;
}

ParamDocument parse_document(std::string_view text, std::string source) {
  ParamDocument doc;
  doc.source = std::move(source);
  std::vector<std::string> errors;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    const auto eq = line.find('=');
    const std::string_view key = eq == std::string_view::npos ? line : trim(line.substr(0, eq));
    if (eq == std::string_view::npos || key.empty()) {
      errors.push_back(doc.source + ":" + std::to_string(line_no) + ": expected 'key = value'");
    } else if (const ParamEntry* prev = doc.find(key)) {
      errors.push_back(doc.source + ":" + std::to_string(line_no) + ": " + std::string(key) +
                       ": duplicate key (first set on line " + std::to_string(prev->line) + ")");
    } else {
      doc.entries.push_back({std::string(key), std::string(trim(line.substr(eq + 1))), line_no});
    }
    if (end == text.size()) break;
  }
  if (!errors.empty()) {
    std::string msg;
    for (const auto& e : errors) msg += e + "\n";
    msg.pop_back();
    throw ValidationError(msg);
  }
  return doc;
}

ParamDocument load_document(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open parameter file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_document(ss.str(), path.string());
}

ParsedParams resolve(const ParamDocument& doc) {
  Resolver r(doc);

  for (const auto& e : doc.entries) {
    const bool flag = e.key.size() > kFlagSuffix.size() && e.key.ends_with(kFlagSuffix) &&
                      contains(kFrequencyKeys, std::string_view(e.key).substr(0, e.key.size() - kFlagSuffix.size()));
    if (!flag && !contains(kFrequencyKeys, e.key) && !contains(kPlainKeys, e.key)) {
      r.fail(e, "unknown key");
    }
  }
  std::vector<std::string> missing;
  for (auto key : kFrequencyKeys) {
    if (!contains(kOptionalKeys, key) && !r.lookup(key)) missing.emplace_back(key);
  }
  for (auto key : kPlainKeys) {
    if (!contains(kOptionalKeys, key) && !r.lookup(key)) missing.emplace_back(key);
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    r.fail("missing required keys: " + list);
  }

  ParsedParams out;
  SystemParams& p = out.params;
  auto freq = [&](std::string_view key, double& dst) {
    if (auto v = r.frequency(key)) dst = *v;
  };
  auto plain = [&](std::string_view key, double& dst) {
    if (auto v = r.plain(key)) dst = *v;
  };
  if (auto n = r.plain("N_atoms")) {
    if (*n != std::floor(*n) || *n < 1.0 || *n > 9.0e18) {
      r.fail(*r.lookup("N_atoms"), "must be a positive integer");
    } else {
      p.n_atoms = static_cast<std::int64_t>(*n);
    }
  }
  plain("cavity_length", p.cavity_length);
  plain("pump_wavelength", p.pump_wavelength);
  plain("mirror_mass", p.mirror_mass);
  plain("temperature", p.temperature);
  plain("n_ph", p.n_ph);
  freq("kappa", p.kappa);
  freq("g0", p.g0);
  freq("Delta_a", p.delta_a);
  freq("omega_R", p.omega_r);
  freq("omega_sw", p.omega_sw);
  freq("gamma_c", p.gamma_c);
  freq("omega_m", p.omega_m);
  freq("gamma_m", p.gamma_m);
  freq("eta", p.eta);
  freq("delta_c_detuning", p.delta_c);
  freq("Gamma_l", p.phase_noise.linewidth);
  freq("omega_N", p.phase_noise.omega_n);
  freq("gamma_tilde", p.phase_noise.gamma_tilde);
  if (r.lookup("xi_m")) out.overrides.xi_m = r.frequency("xi_m");
  if (r.lookup("xi_c")) out.overrides.xi_c = r.frequency("xi_c");

  if (!r.errors().empty()) {
    std::string msg;
    for (const auto& e : r.errors()) msg += e + "\n";
    msg.pop_back();
    throw ValidationError(msg);
  }
  try {
    p.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(doc.source + ": " + e.what());
  }
  return out;
}

std::string_view paper_defaults_text() { return kPaperDefaults; }

ParamDocument paper_defaults_document() { return parse_document(kPaperDefaults, "paper_defaults"); }

ParsedParams parse_params(const std::filesystem::path& file) {
  if (file == "paper_defaults") return resolve(paper_defaults_document());
  return resolve(load_document(file));
}

void apply_overrides(ParamDocument& doc, const std::vector<std::string>& overrides) {
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    const std::string_view key = eq == std::string::npos ? std::string_view{} : trim(std::string_view(o).substr(0, eq));
    if (key.empty()) throw ValidationError("override '" + o + "': expected KEY=VAL");
    doc.set(key, trim(std::string_view(o).substr(eq + 1)));
  }
}

std::string serialize_params(const ParsedParams& pp) {
  const SystemParams& p = pp.params;
  std::ostringstream os;
  auto plain = [&os](std::string_view key, double v) { os << key << " = " << format_double(v) << '\n'; };
  auto freq = [&os](std::string_view key, double v) {
    os << key << " = " << format_double(v) << '\n' << key << kFlagSuffix << " = true\n";
  };
  os << "N_atoms = " << p.n_atoms << '\n';
  plain("cavity_length", p.cavity_length);
  plain("pump_wavelength", p.pump_wavelength);
  freq("kappa", p.kappa);
  freq("g0", p.g0);
  freq("Delta_a", p.delta_a);
  freq("omega_R", p.omega_r);
  freq("omega_sw", p.omega_sw);
  freq("gamma_c", p.gamma_c);
  plain("mirror_mass", p.mirror_mass);
  freq("omega_m", p.omega_m);
  freq("gamma_m", p.gamma_m);
  freq("eta", p.eta);
  freq("delta_c_detuning", p.delta_c);
  plain("temperature", p.temperature);
  plain("n_ph", p.n_ph);
  freq("Gamma_l", p.phase_noise.linewidth);
  freq("omega_N", p.phase_noise.omega_n);
  freq("gamma_tilde", p.phase_noise.gamma_tilde);
  if (pp.overrides.xi_m) freq("xi_m", *pp.overrides.xi_m);
  if (pp.overrides.xi_c) freq("xi_c", *pp.overrides.xi_c);
  return os.str();
}

double parse_frequency(std::string_view text, const SystemParams& context) {
  const auto parsed = split_number(text);
  if (!parsed) throw ValidationError("cannot parse frequency '" + std::string(text) + "'");
  const auto [number, unit] = *parsed;
  if (unit.empty()) {
    throw ValidationError("frequency '" + std::string(text) + "' needs a unit (Hz, kHz, MHz, GHz, rad/s) or a reference");
  }
  if (unit == "rad/s") return number;
  if (const auto scale = cycle_unit(unit)) return constants::kTwoPi * *scale * number;
  if (contains(kFrequencyKeys, unit)) {
    ParsedParams pp;
    pp.params = context;
    const ParamDocument doc = parse_document(serialize_params(pp), "context");
    Resolver r(doc);
    if (const auto ref = r.frequency(unit)) return number * *ref;
  }
  throw ValidationError("unknown unit or reference in '" + std::string(text) + "'");
}

}  // namespace hybridom
