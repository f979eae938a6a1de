#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <thread>

#include "hypmac/error.hpp"
#include "hypmac/io.hpp"

using namespace hypmac;
namespace fs = std::filesystem;

namespace {

struct Options {
  std::string config;
  std::string out_dir = "out";
  int threads = 0;
};

template <class Writer, class... Args>
std::string render(Writer writer, const Args&... args) {
  std::ostringstream os;
  writer(os, args...);
  return os.str();
}

void announce(const fs::path& p) { std::cout << "wrote " << p.string() << '\n'; }

void emit(const Options& o, const std::string& file, const std::string& content) {
  announce(write_output(o.out_dir, file, content));
}

std::vector<double> initial_velocity(const RunConfig& c) {
  if (is_hyperbolic(c.model) && !c.u1.is_zero()) return c.u1.sample(c.n);
  return {};
}

int run_constants(const Options& o, const RunConfig& c) {
  const auto r = constants_report(c);
  std::cout << to_text(r);
  emit(o, c.name + "_constants.json", to_json(r).dump(2) + '\n');
  return 0;
}

int run_profile(const Options& o, const RunConfig& c) {
  require_keys(c, {"epsilon"});
  const auto profile = build_profile(c.initial_layers(), *c.epsilon, c.build_potential(), c.n,
                                     ProfileOptions{AlphaMode::Exact, c.gap_factor});
  const auto summary = to_json(profile, c);
  std::cout << "barrier " << format_number(profile.barrier()) << ", mass " << format_number(profile.mass())
            << ", renormalized energy " << format_number(summary["renormalized_energy"].get<double>()) << '\n';
  emit(o, c.name + "_profile.csv", render(write_profile_csv, profile));
  emit(o, c.name + "_profile.json", summary.dump(2) + '\n');
  return 0;
}

int run_simulate(const Options& o, const RunConfig& c) {
  require_keys(c, {"epsilon", "t_end"});
  const PdeParams params = c.pde_params();
  const auto datum = make_initial_datum(c.initial_layers(), *c.epsilon, params.potential, c.n,
                                        c.initial_profile, c.gap_factor);
  SimulationOptions sim;
  sim.t_end = *c.t_end;
  sim.cadence = c.cadence_or_default();
  auto result = run_simulation(datum.u, initial_velocity(c), params, sim);
  result.warnings.insert(result.warnings.begin(), datum.warnings.begin(), datum.warnings.end());
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
  std::cout << "dt " << format_number(result.dt) << ", " << result.steps << " steps";
  if (result.collided) std::cout << ", collision at t = " << format_number(result.collision_time);
  std::cout << '\n';
  emit(o, c.name + "_diagnostics.csv", render(write_diagnostics_csv, result));
  emit(o, c.name + "_final.csv", render(write_state_csv, result.final_state));
  emit(o, c.name + "_simulation.json", to_json(result, c).dump(2) + '\n');
  return 0;
}

int run_layers(const Options& o, const RunConfig& c) {
  require_keys(c, {"epsilon", "t_end"});
  const LayerSystem system(c.ode_params());
  IntegrationOptions io;
  io.t_end = *c.t_end;
  io.cadence = c.cadence_or_default();
  io.tol = c.tol;
  io.project_initial_velocity = c.project_hdot0;
  const auto traj = integrate_layers({c.initial_layers(), c.hdot0, 0.0}, system, io);
  std::cout << traj.rows.size() << " rows, " << traj.steps << " steps";
  if (traj.collided) std::cout << ", collision at t = " << format_number(traj.collision_time);
  std::cout << '\n';
  emit(o, c.name + "_trajectory.csv", render(write_trajectory_csv, traj, system));
  emit(o, c.name + "_layers.json", to_json(traj, c).dump(2) + '\n');
  return 0;
}

int run_compare(const Options& o, const RunConfig& c) {
  const auto r = compare_pde_ode(c);
  std::cout << to_text(r);
  emit(o, c.name + "_comparison.csv", render(write_comparison_csv, r));
  emit(o, c.name + "_comparison.json", to_json(r).dump(2) + '\n');
  return 0;
}

int run_sweep_metastability(const Options& o, const RunConfig& c) {
  const auto r = metastability_sweep(c, o.threads);
  std::cout << to_text(r);
  emit(o, c.name + "_metastability.csv", render(write_metastability_csv, r));
  emit(o, c.name + "_metastability.json", to_json(r).dump(2) + '\n');
  return 0;
}

int run_sweep_asymptotics(const Options& o, const RunConfig& c) {
  require_keys(c, {"r_list"});
  const auto r = asymptotics_sweep(c.r_list, c.build_potential(), c.r0, o.threads);
  std::cout << to_text(r);
  emit(o, c.name + "_asymptotics.csv", render(write_asymptotics_csv, r));
  emit(o, c.name + "_asymptotics.json", to_json(r, c).dump(2) + '\n');
  return 0;
}

int run_sweep_tau(const Options& o, const RunConfig& c) {
  const auto r = tau_limit_study(c, o.threads);
  std::cout << to_text(r);
  emit(o, c.name + "_tau.csv", render(write_tau_csv, r));
  emit(o, c.name + "_tau.json", to_json(r).dump(2) + '\n');
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Layer dynamics for hyperbolic and mass-conserving Allen-Cahn equations"};
  app.require_subcommand(1);
  Options o;
  o.threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

  using Handler = int (*)(const Options&, const RunConfig&);
  const std::vector<std::tuple<std::string, std::string, Handler>> commands{
      {"constants", "c_F, A and K per well, gamma and sigma", run_constants},
      {"profile", "build u^h and write it on the grid", run_profile},
      {"simulate", "integrate the PDE", run_simulate},
      {"layers", "integrate the layer ODE", run_layers},
      {"compare", "PDE against layer ODE from the same layers", run_compare},
      {"sweep-metastability", "slope of ln(speed) against 1/eps", run_sweep_metastability},
      {"sweep-asymptotics", "exact against asymptotic alpha and beta", run_sweep_asymptotics},
      {"sweep-tau", "HYP_MAC to MAC distance as tau halves", run_sweep_tau},
  };
  std::vector<std::pair<CLI::App*, Handler>> subs;
  for (const auto& [name, help, handler] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("-c,--config", o.config, "JSON run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("-o,--out-dir", o.out_dir, "output directory")->capture_default_str();
    sub->add_option("-j,--threads", o.threads, "workers for sweeps")->check(CLI::PositiveNumber);
    subs.emplace_back(sub, handler);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const RunConfig config = load_config(o.config);
    for (const auto& [sub, handler] : subs) {
      if (sub->parsed()) return handler(o, config);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
