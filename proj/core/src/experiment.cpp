#include "hybridom/experiment.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "hybridom/adiabatic.hpp"
#include "hybridom/error.hpp"
#include "hybridom/gaussian.hpp"
#include "hybridom/linear_system.hpp"
#include "hybridom/phase_noise.hpp"
#include "hybridom/steady_state.hpp"

namespace hybridom {

namespace {

using json = nlohmann::ordered_json;

constexpr std::array<std::pair<ExperimentKind, std::string_view>, 7> kKindNames = {{
    {ExperimentKind::photon_sweep, "photon_sweep"},
    {ExperimentKind::entanglement_sweep, "entanglement_sweep"},
    {ExperimentKind::entanglement_vs_pump, "entanglement_vs_pump"},
    {ExperimentKind::collision_sweep, "collision_sweep"},
    {ExperimentKind::effective_sweep, "effective_sweep"},
    {ExperimentKind::spectrum, "spectrum"},
    {ExperimentKind::oracle_check, "oracle_check"},
}};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string num(const std::optional<double>& x) { return x ? num(*x) : std::string(); }

std::string field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header) : out_(path) {
    if (!out_) throw ValidationError("cannot write " + path.string());
    row(header);
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << field(cells[i]);
    out_ << "\r\n";
  }

 private:
  std::ofstream out_;
};

struct VariantSetup {
  ParsedParams parsed;
  DerivedModel model;
};

VariantSetup setup(const ExperimentSpec& spec, const Variant& v) {
  ParamDocument doc = spec.params;
  apply_overrides(doc, spec.overrides);
  apply_overrides(doc, v.overrides);
  VariantSetup s;
  s.parsed = resolve(doc);
  s.model = derive(s.parsed.params);
  s.parsed.overrides.apply(s.model);
  return s;
}

json derived_json(const DerivedModel& m, const SystemParams& p) {
  return json{{"U0", m.u0},           {"zeta", m.zeta},       {"stark_shift", m.stark_shift},
              {"Omega_c", m.omega_bog}, {"chi", m.chi},        {"omega_c", m.omega_c},
              {"xi_c", m.xi_c},       {"omega_0", m.omega_0}, {"xi_m", m.xi_m},
              {"n_m", m.n_m},         {"n_c", m.n_c},         {"gamma_m_prime", m.gamma_m_prime},
              {"gamma_c_prime", m.gamma_c_prime},
              {"kappa", p.kappa},     {"omega_m", p.omega_m}, {"Gamma_l", p.phase_noise.linewidth}};
}

std::string sanitize(std::string_view label) {
  std::string out;
  for (char c : label) {
    const bool keep = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    out += keep ? c : '_';
  }
  return out.empty() ? "variant" : out;
}

// Steady state for the parameters' own delta_c, on the branch reached by
// continuation from large negative detuning.
SteadyState working_point(const DerivedModel& model, const SystemParams& params) {
  const double lo = std::min(params.delta_c, -150.0 * params.kappa);
  std::vector<double> grid;
  constexpr int n = 301;
  for (int i = 0; i < n; ++i) grid.push_back(lo + (params.delta_c - lo) * i / (n - 1));
  grid.back() = params.delta_c;
  return select_branch_by_continuation(model, params, grid).back();
}

struct VariantOutput {
  std::vector<std::string> statuses;
  json checks = json::object();
  int exit_code = 0;
};

std::string branch_cell(const std::optional<SteadyState>& ss) {
  return ss ? std::string(to_string(ss->branch)) : std::string();
}

VariantOutput write_entanglement(const ExperimentSpec& spec, const VariantSetup& s,
                                 const std::filesystem::path& path) {
  const SystemParams& p = s.parsed.params;
  const bool vs_pump = spec.kind == ExperimentKind::entanglement_vs_pump;
  const bool collision = spec.kind == ExperimentKind::collision_sweep;
  std::vector<double> grid = spec.grid.values();
  for (double& x : grid) x *= p.kappa;
  const auto points = vs_pump ? entanglement_vs_pump(s.model, p, grid, spec.jobs)
                              : entanglement_sweep(s.model, p, grid, spec.jobs);

  std::vector<std::string> header;
  if (vs_pump) {
    header = {"eta", "eta_over_kappa"};
  } else {
    header = {"delta_c", "delta_c_over_kappa"};
  }
  for (const char* h : {"Delta_d", "Delta_d_over_kappa", "photon_number", "branch_id", "stable_flag",
                        "EN_mirror_atom", "EN_atom_field", "EN_mirror_field", "min_symplectic"}) {
    header.emplace_back(h);
  }
  if (vs_pump) header.insert(header.end(), {"r_m", "r_c"});
  if (collision) {
    header.insert(header.end(), {"G_mc_over_omega_m", "omega_m_eff_over_omega_m", "omega_c_eff_over_omega_m"});
  }
  header.emplace_back("status");

  CsvWriter csv(path, header);
  VariantOutput out;
  for (const auto& pt : points) {
    std::vector<std::string> row = {num(pt.x), num(pt.x / p.kappa)};
    const auto& ss = pt.steady_state;
    row.push_back(ss ? num(ss->delta_d) : "");
    row.push_back(ss ? num(ss->delta_d / p.kappa) : "");
    row.push_back(ss ? num(ss->photon_number) : "");
    row.push_back(branch_cell(ss));
    row.push_back(pt.status == PointStatus::unstable ? "0" : (pt.status == PointStatus::ok ? "1" : ""));
    row.push_back(num(pt.en(Bipartition::mirror_atom)));
    row.push_back(num(pt.en(Bipartition::atom_field)));
    row.push_back(num(pt.en(Bipartition::mirror_field)));
    row.push_back(num(pt.min_symplectic));
    if (vs_pump || collision) {
      std::optional<EffectiveModel> eff;
      if (ss) {
        SystemParams q = p;
        if (vs_pump) q.eta = pt.x;
        eff = effective_model(s.model, q, *ss);
      }
      if (vs_pump) {
        row.push_back(eff ? num(eff->r_m) : "");
        row.push_back(eff ? num(eff->r_c) : "");
      } else {
        auto scaled = [&](const std::optional<double>& v) {
          return v ? num(*v / p.omega_m) : std::string();
        };
        row.push_back(eff ? scaled(eff->g_mc) : "");
        row.push_back(eff ? scaled(eff->omega_m_eff) : "");
        row.push_back(eff ? scaled(eff->omega_c_eff) : "");
      }
    }
    row.emplace_back(to_string(pt.status));
    out.statuses.push_back(row.back());
    csv.row(row);
  }
  return out;
}

VariantOutput write_photon(const ExperimentSpec& spec, const VariantSetup& s,
                           const std::filesystem::path& path) {
  const SystemParams& p = s.parsed.params;
  std::vector<double> grid = spec.grid.values();
  for (double& x : grid) x *= p.kappa;
  const auto curves = sweep_photon_number(s.model, p, grid);

  struct Row {
    std::size_t index;
    std::size_t curve;
    const SteadyState* ss;
  };
  std::vector<Row> rows;
  for (std::size_t c = 0; c < curves.size(); ++c) {
    for (std::size_t k = 0; k < curves[c].states.size(); ++k) {
      rows.push_back({curves[c].start_index + k, c, &curves[c].states[k]});
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return a.index != b.index ? a.index < b.index : a.ss->photon_number < b.ss->photon_number;
  });

  CsvWriter csv(path, {"delta_c", "delta_c_over_kappa", "curve_id", "branch_id", "photon_number", "Delta_d",
                       "Delta_d_over_kappa", "Delta_d_over_omega_m", "stable_flag", "status"});
  VariantOutput out;
  std::size_t covered = 0;
  for (const Row& r : rows) {
    const double dc = grid[r.index];
    SystemParams q = p;
    q.delta_c = dc;
    std::string stable, status = "ok";
    try {
      const StabilityReport rep = check_stability(build_linear_system(s.model, q, *r.ss));
      stable = rep.stable ? "1" : "0";
      if (!rep.stable) status = "unstable";
    } catch (const NumericalError&) {
      status = "undefined";
    }
    if (r.ss->fold_point) status = "fold_point";
    csv.row({num(dc), num(dc / p.kappa), std::to_string(r.curve), std::string(to_string(r.ss->branch)),
             num(r.ss->photon_number), num(r.ss->delta_d), num(r.ss->delta_d / p.kappa),
             num(r.ss->delta_d / p.omega_m), stable, status});
    out.statuses.push_back(status);
    ++covered;
  }
  out.checks["rows"] = covered;
  out.checks["curves"] = curves.size();
  return out;
}

VariantOutput write_effective(const ExperimentSpec& spec, const VariantSetup& s,
                              const std::filesystem::path& path) {
  const SystemParams& p = s.parsed.params;
  std::vector<double> grid = spec.grid.values();
  for (double& x : grid) x *= p.kappa;
  const auto effs = effective_sweep(s.model, p, grid);

  CsvWriter csv(path, {"Delta_d", "Delta_d_over_kappa", "photon_number", "nu_m", "nu_c", "nu_m_over_kappa",
                       "nu_c_over_kappa", "omega_m_eff", "omega_c_eff", "omega_m_eff_over_omega_m",
                       "omega_c_eff_over_omega_m", "G_mc", "G_mc_over_omega_m", "r_m", "r_c",
                       "defined_flags", "status"});
  VariantOutput out;
  for (const auto& e : effs) {
    auto scaled = [&](const std::optional<double>& v) { return v ? num(*v / p.omega_m) : std::string(); };
    const int flags = (e.omega_m_eff ? 1 : 0) | (e.omega_c_eff ? 2 : 0);
    const std::string status = flags == 3 && !e.degenerate ? "ok" : "undefined";
    csv.row({num(e.delta_d), num(e.delta_d / p.kappa), num(e.photon_number), num(e.nu_m), num(e.nu_c),
             num(e.nu_m / p.kappa), num(e.nu_c / p.kappa), num(e.omega_m_eff), num(e.omega_c_eff),
             scaled(e.omega_m_eff), scaled(e.omega_c_eff), num(e.g_mc), scaled(e.g_mc), num(e.r_m), num(e.r_c),
             std::to_string(flags), status});
    out.statuses.push_back(status);
  }
  return out;
}

constexpr std::size_t kSpectrumSegment = 16384;

VariantOutput write_spectrum(const ExperimentSpec& spec, const VariantSetup& s,
                             const std::filesystem::path& path) {
  const PhaseNoiseParams& pn = s.parsed.params.phase_noise;
  if (!(pn.linewidth > 0.0)) throw ValidationError("spectrum: Gamma_l must be > 0");
  std::vector<double> grid = spec.grid.values();
  for (double& x : grid) x *= pn.omega_n;

  Eigen::MatrixXd a(2, 2), d = Eigen::MatrixXd::Zero(2, 2);
  a << 0.0, pn.omega_n, -pn.omega_n, -pn.gamma_tilde;
  d(1, 1) = 2.0 * pn.linewidth * pn.omega_n * pn.omega_n;
  SdeRunConfig cfg;
  cfg.dt = 0.01 / pn.omega_n;
  cfg.n_steps = spec.sde_steps ? spec.sde_steps : kSpectrumSegment * 8;
  cfg.n_trajectories = spec.sde_trajectories;
  cfg.seed = spec.seed;
  cfg.jobs = spec.jobs;
  const SpectrumEstimate est = spectrum_from_trajectories(a, d, cfg, 0, kSpectrumSegment);

  auto interp = [&](const std::vector<double>& ys, double w) -> std::optional<double> {
    const double dw = est.omega[1];
    const double k = std::abs(w) / dw;
    const auto i = static_cast<std::size_t>(k);
    if (i + 1 >= ys.size()) return std::nullopt;
    const double f = k - static_cast<double>(i);
    return (1.0 - f) * ys[i] + f * ys[i + 1];
  };

  CsvWriter csv(path, {"omega", "omega_over_omega_N", "S_analytic", "S_empirical", "stderr", "status"});
  VariantOutput out;
  for (double w : grid) {
    const auto emp = interp(est.s, w);
    const std::string status = emp ? "ok" : "undefined";
    csv.row({num(w), num(w / pn.omega_n), num(noise_spectrum(pn, w)), num(emp), num(interp(est.std_error, w)),
             status});
    out.statuses.push_back(status);
  }
  const double peak = spectral_peak_frequency(pn);
  out.checks["analytic_peak_omega"] = peak;
  out.checks["empirical_peak_omega"] = estimate_peak_frequency(est);
  out.checks["segments"] = est.segments;
  out.checks["dt"] = cfg.dt;
  return out;
}

VariantOutput write_oracle(const ExperimentSpec& spec, const VariantSetup& s,
                           const std::filesystem::path& path) {
  const SystemParams& p = s.parsed.params;
  const SteadyState ss = working_point(s.model, p);
  const LinearSystem sys = build_linear_system(s.model, p, ss);
  const CovarianceMatrix cm = solve_lyapunov(sys);

  SdeRunConfig cfg;
  cfg.scheme = SdeScheme::exact;
  cfg.dt = 0.1 / std::max(p.omega_m, s.model.omega_c);
  cfg.n_steps = spec.sde_steps ? spec.sde_steps : 100000;
  cfg.n_trajectories = spec.sde_trajectories;
  cfg.seed = spec.seed;
  cfg.jobs = spec.jobs;
  const SdeResult sde = simulate_sde(sys, cfg);

  CsvWriter csv(path, {"i", "j", "V_lyapunov", "V_sde", "stderr", "z", "pass", "status"});
  VariantOutput out;
  int failures = 0;
  double worst = 0.0;
  for (int i = 0; i < 8; ++i) {
    for (int j = i; j < 8; ++j) {
      const double se = sde.std_error(i, j);
      const double diff = sde.v_est(i, j) - cm.v(i, j);
      const double z = se > 0.0 ? diff / se : (diff == 0.0 ? 0.0 : INFINITY);
      const bool pass = std::abs(z) <= 3.0;
      failures += pass ? 0 : 1;
      worst = std::max(worst, std::abs(z));
      csv.row({std::to_string(i), std::to_string(j), num(cm.v(i, j)), num(sde.v_est(i, j)), num(se), num(z),
               pass ? "1" : "0", "ok"});
      out.statuses.emplace_back("ok");
    }
  }
  out.checks["delta_c_over_kappa"] = p.delta_c / p.kappa;
  out.checks["Delta_d_over_kappa"] = ss.delta_d / p.kappa;
  out.checks["lyapunov_residual"] = cm.residual;
  out.checks["dt"] = cfg.dt;
  out.checks["n_steps"] = cfg.n_steps;
  out.checks["trajectories"] = cfg.n_trajectories;
  out.checks["components_outside_3_stderr"] = failures;
  out.checks["max_abs_z"] = worst;
  out.exit_code = failures == 0 ? 0 : 3;
  return out;
}

std::string grid_axis(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::entanglement_vs_pump:
      return "eta_over_kappa";
    case ExperimentKind::effective_sweep:
      return "Delta_d_over_kappa";
    case ExperimentKind::spectrum:
      return "omega_over_omega_N";
    case ExperimentKind::oracle_check:
      return "unused";
    default:
      return "delta_c_over_kappa";
  }
}

std::vector<Variant> linewidth_variants() {
  return {{"gamma_l_1kHz", {"Gamma_l=1 kHz"}},
          {"gamma_l_10kHz", {"Gamma_l=10 kHz"}},
          {"gamma_l_100kHz", {"Gamma_l=100 kHz"}}};
}

}  // namespace

std::string_view to_string(ExperimentKind k) {
  for (const auto& [kind, name] : kKindNames) {
    if (kind == k) return name;
  }
  return "unknown";
}

ExperimentKind parse_kind(std::string_view name) {
  for (const auto& [kind, n] : kKindNames) {
    if (n == name) return kind;
  }
  throw ValidationError("unknown experiment kind '" + std::string(name) + "'");
}

void Grid::validate() const {
  if (n_points < 2) throw ValidationError("grid: n_points must be >= 2");
  if (!std::isfinite(start) || !std::isfinite(stop)) throw ValidationError("grid: bounds must be finite");
  if (!(start < stop)) throw ValidationError("grid: start must be below stop");
}

std::vector<double> Grid::values() const {
  validate();
  std::vector<double> v(n_points);
  const double step = (stop - start) / static_cast<double>(n_points - 1);
  for (std::size_t i = 0; i < n_points; ++i) v[i] = start + step * static_cast<double>(i);
  v.back() = stop;
  return v;
}

Grid parse_grid(std::string_view text) {
  const std::string s(text);
  Grid g;
  char tail = 0;
  long long n = 0;
  if (std::sscanf(s.c_str(), "%lf:%lf:%lld%c", &g.start, &g.stop, &n, &tail) != 3 || n < 0) {
    throw ValidationError("grid '" + s + "': expected start:stop:n");
  }
  g.n_points = static_cast<std::size_t>(n);
  g.validate();
  return g;
}

void ExperimentSpec::validate() const {
  if (kind != ExperimentKind::oracle_check) grid.validate();
  if (variants.empty()) throw ValidationError("experiment: variants must be non-empty");
  std::map<std::string, int> seen;
  for (const auto& v : variants) {
    if (v.label.empty()) throw ValidationError("experiment: variant label must be non-empty");
    if (seen[sanitize(v.label)]++) throw ValidationError("experiment: duplicate variant label '" + v.label + "'");
  }
  if (jobs == 0) throw ValidationError("experiment: jobs must be >= 1");
  if (sde_trajectories < 2) throw ValidationError("experiment: need at least 2 SDE trajectories");
}

ExperimentSpec preset(std::string_view name) {
  ExperimentSpec s;
  s.name = std::string(name);
  if (name == "fig2") {
    s.kind = ExperimentKind::effective_sweep;
    s.overrides = {"eta=30 kappa", "xi_c=0.2 kappa", "xi_m=0.05 kappa"};
    s.grid = {-150.0, 50.0, 801};
  } else if (name == "fig3") {
    s.kind = ExperimentKind::effective_sweep;
    s.overrides = {"xi_c=0.2 kappa", "xi_m=0.05 kappa"};
    s.grid = {-10.0, 10.0, 401};
    s.variants = {{"eta_30kappa", {"eta=30 kappa"}}, {"eta_60kappa", {"eta=60 kappa"}}};
  } else if (name == "fig4") {
    s.kind = ExperimentKind::photon_sweep;
    s.grid = {-150.0, 150.0, 601};
  } else if (name == "fig5") {
    s.kind = ExperimentKind::entanglement_sweep;
    s.grid = {-150.0, 150.0, 601};
    s.variants = linewidth_variants();
  } else if (name == "fig6") {
    s.kind = ExperimentKind::entanglement_vs_pump;
    s.overrides = {"delta_c_detuning=-40 kappa"};
    s.grid = {1.0, 200.0, 399};
    s.variants = linewidth_variants();
  } else if (name == "fig7") {
    s.kind = ExperimentKind::collision_sweep;
    s.overrides = {"Gamma_l=10 kHz"};
    s.grid = {-150.0, 150.0, 601};
    s.variants = {{"omega_sw_0", {"omega_sw=0 omega_R"}},
                  {"omega_sw_0.5omega_R", {"omega_sw=0.5 omega_R"}},
                  {"omega_sw_1omega_R", {"omega_sw=1 omega_R"}}};
  } else if (name == "spectrum") {
    s.kind = ExperimentKind::spectrum;
    s.grid = {0.0, 3.0, 301};
  } else if (name == "oracle-check" || name == "oracle_check") {
    s.kind = ExperimentKind::oracle_check;
    s.grid = {0.0, 1.0, 2};
  } else {
    throw ValidationError("unknown experiment '" + std::string(name) + "'");
  }
  return s;
}

std::string input_hash(const ExperimentSpec& spec) {
  std::ostringstream canon;
  canon << to_string(spec.kind) << '\n';
  if (spec.kind != ExperimentKind::oracle_check) {
    canon << "grid " << num(spec.grid.start) << ' ' << num(spec.grid.stop) << ' ' << spec.grid.n_points << '\n';
  }
  if (spec.kind == ExperimentKind::spectrum || spec.kind == ExperimentKind::oracle_check) {
    canon << "seed " << spec.seed << " trajectories " << spec.sde_trajectories << " steps " << spec.sde_steps
          << '\n';
  }
  for (const auto& v : spec.variants) {
    canon << "[" << v.label << "]\n" << serialize_params(setup(spec, v).parsed);
  }
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canon.str()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RunResult run(const ExperimentSpec& spec, const std::filesystem::path& out_dir) {
  spec.validate();
  const auto t0 = std::chrono::steady_clock::now();

  std::vector<VariantSetup> setups;
  for (const auto& v : spec.variants) setups.push_back(setup(spec, v));

  std::filesystem::create_directories(out_dir);
  RunResult result;
  result.input_hash = input_hash(spec);

  json manifest;
  manifest["experiment"] = spec.name.empty() ? std::string(to_string(spec.kind)) : spec.name;
  manifest["kind"] = to_string(spec.kind);
  if (spec.kind != ExperimentKind::oracle_check) {
    manifest["grid"] = {{"axis", grid_axis(spec.kind)},
                        {"start", spec.grid.start},
                        {"stop", spec.grid.stop},
                        {"n_points", spec.grid.n_points}};
  }
  manifest["params_source"] = spec.params.source;
  manifest["overrides"] = spec.overrides;
  manifest["seed"] = spec.seed;
  manifest["jobs"] = spec.jobs;
  if (spec.kind == ExperimentKind::spectrum || spec.kind == ExperimentKind::oracle_check) {
    manifest["sde"] = {{"trajectories", spec.sde_trajectories}, {"steps", spec.sde_steps}};
  }
  manifest["input_hash"] = result.input_hash;

  json variants = json::array();
  for (std::size_t i = 0; i < spec.variants.size(); ++i) {
    const Variant& v = spec.variants[i];
    const VariantSetup& s = setups[i];
    const std::string stem = spec.variants.size() == 1 && v.label == "default"
                                 ? std::string(manifest["experiment"].get<std::string>())
                                 : manifest["experiment"].get<std::string>() + "_" + sanitize(v.label);
    const std::filesystem::path csv = out_dir / (stem + ".csv");

    VariantOutput out;
    switch (spec.kind) {
      case ExperimentKind::photon_sweep:
        out = write_photon(spec, s, csv);
        break;
      case ExperimentKind::entanglement_sweep:
      case ExperimentKind::entanglement_vs_pump:
      case ExperimentKind::collision_sweep:
        out = write_entanglement(spec, s, csv);
        break;
      case ExperimentKind::effective_sweep:
        out = write_effective(spec, s, csv);
        break;
      case ExperimentKind::spectrum:
        out = write_spectrum(spec, s, csv);
        break;
      case ExperimentKind::oracle_check:
        out = write_oracle(spec, s, csv);
        break;
    }
    result.exit_code = std::max(result.exit_code, out.exit_code);
    result.csv_files.push_back(csv);

    std::map<std::string, int> counts;
    for (const auto& st : out.statuses) ++counts[st];
    json entry;
    entry["label"] = v.label;
    entry["overrides"] = v.overrides;
    entry["csv"] = csv.filename().string();
    entry["params"] = serialize_params(s.parsed);
    entry["derived"] = derived_json(s.model, s.parsed.params);
    entry["status_counts"] = counts;
    entry["statuses"] = out.statuses;
    if (!out.checks.empty()) entry["checks"] = out.checks;
    variants.push_back(std::move(entry));
  }
  manifest["variants"] = std::move(variants);
  manifest["exit_code"] = result.exit_code;
  manifest["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  result.manifest = out_dir / "manifest.json";
  std::ofstream m(result.manifest);
  if (!m) throw ValidationError("cannot write " + result.manifest.string());
  m << manifest.dump(2) << '\n';
  return result;
}

}  // namespace hybridom
