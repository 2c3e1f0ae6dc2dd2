#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hybridom/error.hpp"
#include "hybridom/experiment.hpp"
#include "hybridom/params_io.hpp"

namespace {

struct Options {
  std::string params = "paper_defaults";
  std::string out;
  std::string grid;
  std::vector<std::string> overrides;
  std::uint64_t seed = 1;
  unsigned jobs = 1;
  std::size_t trajectories = 200;
  std::size_t steps = 0;
  std::vector<std::string> gamma_l;
  std::vector<double> omega_sw;
  std::string variable = "delta_c";
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--params", o.params, "Parameter file, or paper_defaults");
  cmd->add_option("--out", o.out, "Output directory (default: out/<subcommand>)");
  cmd->add_option("--grid", o.grid, "Swept variable as start:stop:n in normalized units");
  cmd->add_option("--override", o.overrides, "KEY=VAL applied on top of the parameter file")
      ->allow_extra_args(false);
  cmd->add_option("--seed", o.seed, "Seed for stochastic experiments");
  cmd->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
}

void add_stochastic(CLI::App* cmd, Options& o) {
  cmd->add_option("--trajectories", o.trajectories, "SDE trajectories")->check(CLI::Range(2, 1000000));
  cmd->add_option("--steps", o.steps, "SDE steps per trajectory (0: default)");
}

hybridom::ExperimentSpec build_spec(const std::string& name, const Options& o) {
  using namespace hybridom;
  ExperimentSpec spec;
  if (name == "sweep") {
    if (o.variable == "delta_c") {
      spec = preset("fig5");
      spec.kind = ExperimentKind::entanglement_sweep;
    } else if (o.variable == "eta") {
      spec = preset("fig6");
      spec.overrides.clear();
    } else if (o.variable == "Delta_d") {
      spec = preset("fig2");
      spec.overrides.clear();
    } else if (o.variable == "photon") {
      spec = preset("fig4");
    } else {
      throw ValidationError("--variable must be delta_c, eta, Delta_d or photon");
    }
    spec.name = "sweep_" + o.variable;
    spec.variants = {{"default", {}}};
  } else {
    spec = preset(name);
  }
  if (o.params != "paper_defaults") spec.params = load_document(o.params);
  spec.overrides.insert(spec.overrides.end(), o.overrides.begin(), o.overrides.end());
  if (!o.grid.empty()) spec.grid = parse_grid(o.grid);
  spec.seed = o.seed;
  spec.jobs = o.jobs;
  spec.sde_trajectories = o.trajectories;
  spec.sde_steps = o.steps;
  if (!o.gamma_l.empty()) {
    spec.variants.clear();
    for (const auto& g : o.gamma_l) spec.variants.push_back({"gamma_l_" + g, {"Gamma_l=" + g}});
  }
  if (!o.omega_sw.empty()) {
    spec.variants.clear();
    for (double f : o.omega_sw) {
      std::ostringstream v;
      v << f;
      spec.variants.push_back({"omega_sw_" + v.str() + "omega_R", {"omega_sw=" + v.str() + " omega_R"}});
    }
  }
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entanglement and phase-noise simulations of a BEC optomechanical cavity"};
  app.require_subcommand(1);
  Options o;

  const std::vector<std::pair<std::string, std::string>> figures = {
      {"fig2", "Effective frequencies and coupling vs Delta_d (eta = 30 kappa)"},
      {"fig3", "Phase-noise couplings r_m, r_c vs Delta_d for eta = 30, 60 kappa"},
      {"fig4", "Intracavity photon number vs delta_c, all branches"},
      {"fig5", "Bipartite E_N vs delta_c for three laser linewidths"},
      {"fig6", "Mirror-atom E_N vs eta at delta_c = -40 kappa"},
      {"fig7", "E_N and effective frequencies vs delta_c for three omega_sw"},
      {"spectrum", "Phase-noise spectrum: analytic and sampled"},
      {"oracle-check", "SDE ensemble against the Lyapunov covariance"},
      {"sweep", "Custom sweep over delta_c, eta, Delta_d or photon number"},
  };
  for (const auto& [name, help] : figures) {
    CLI::App* cmd = app.add_subcommand(name, help);
    add_common(cmd, o);
    if (name == "fig5" || name == "fig6") {
      cmd->add_option("--gamma-l", o.gamma_l, "Laser linewidths, e.g. 1kHz,10kHz")->delimiter(',');
    }
    if (name == "fig7") {
      cmd->add_option("--omega-sw", o.omega_sw, "omega_sw values in units of omega_R, e.g. 0,0.5,1")
          ->delimiter(',');
    }
    if (name == "spectrum" || name == "oracle-check") add_stochastic(cmd, o);
    if (name == "sweep") {
      cmd->add_option("--variable", o.variable, "delta_c | eta | Delta_d | photon")
          ->check(CLI::IsMember({"delta_c", "eta", "Delta_d", "photon"}));
    }
  }
  CLI::App* params_cmd = app.add_subcommand("params", "Print the resolved parameter set in canonical form");
  params_cmd->add_option("--params", o.params, "Parameter file, or paper_defaults");
  params_cmd->add_option("--override", o.overrides, "KEY=VAL applied on top of the parameter file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    CLI::App* cmd = app.get_subcommands().front();
    const std::string name = cmd->get_name();
    if (name == "params") {
      hybridom::ParamDocument doc = o.params == "paper_defaults" ? hybridom::paper_defaults_document()
                                                                 : hybridom::load_document(o.params);
      hybridom::apply_overrides(doc, o.overrides);
      std::cout << hybridom::serialize_params(hybridom::resolve(doc));
      return 0;
    }
    const hybridom::ExperimentSpec spec = build_spec(name, o);
    const std::string out = o.out.empty() ? "out/" + spec.name : o.out;
    const hybridom::RunResult r = hybridom::run(spec, out);
    for (const auto& f : r.csv_files) std::cout << f.string() << '\n';
    std::cout << r.manifest.string() << '\n' << "input hash " << r.input_hash << '\n';
    if (r.exit_code != 0) std::cerr << "error: check failed, see " << r.manifest.string() << '\n';
    return r.exit_code;
  } catch (const hybridom::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
