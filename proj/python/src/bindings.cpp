#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "hypmac/error.hpp"
#include "hypmac/io.hpp"

namespace py = pybind11;
using namespace hypmac;

namespace {

// Everything crosses the boundary as JSON text; the Python side decodes it.
std::string dump(const nlohmann::json& j) { return j.dump(); }

RunConfig config_from(const std::string& text) { return parse_config_text(text); }

nlohmann::json simulate(const RunConfig& c) {
  require_keys(c, {"epsilon", "t_end"});
  const PdeParams params = c.pde_params();
  const auto datum =
      make_initial_datum(c.initial_layers(), *c.epsilon, params.potential, c.n, c.initial_profile, c.gap_factor);
  std::vector<double> u1;
  if (is_hyperbolic(c.model) && !c.u1.is_zero()) u1 = c.u1.sample(c.n);
  SimulationOptions sim;
  sim.t_end = *c.t_end;
  sim.cadence = c.cadence_or_default();
  const auto r = run_simulation(datum.u, u1, params, sim);
  auto out = to_json(r, c);
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"t", row.t},
                    {"mass", row.mass},
                    {"energy", row.energy},
                    {"cum_dissipation", row.cum_dissipation},
                    {"layers", row.layers},
                    {"max_speed", std::isfinite(row.max_speed) ? nlohmann::json(row.max_speed) : nullptr}});
  }
  out["rows"] = rows;
  out["x"] = grid_nodes(c.n);
  out["u"] = r.final_state.u;
  out["v"] = r.final_state.v;
  return out;
}

nlohmann::json layers(const RunConfig& c) {
  require_keys(c, {"epsilon", "t_end"});
  const LayerSystem system(c.ode_params());
  IntegrationOptions io;
  io.t_end = *c.t_end;
  io.cadence = c.cadence_or_default();
  io.tol = c.tol;
  io.project_initial_velocity = c.project_hdot0;
  const auto traj = integrate_layers({c.initial_layers(), c.hdot0, 0.0}, system, io);
  auto out = to_json(traj, c);
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : traj.rows) {
    rows.push_back({{"t", row.t}, {"h", row.h}, {"hdot", row_velocity(row, system)}});
  }
  out["rows"] = rows;
  return out;
}

nlohmann::json profile(const RunConfig& c) {
  require_keys(c, {"epsilon"});
  const auto p = build_profile(c.initial_layers(), *c.epsilon, c.build_potential(), c.n,
                               ProfileOptions{AlphaMode::Exact, c.gap_factor});
  auto out = to_json(p, c);
  out["x"] = p.nodes();
  out["u"] = p.samples();
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "C++ core of hypmac; results are JSON strings";

  // Translators run newest first, so ConfigError is matched before its base.
  const auto& error = py::register_exception<Error>(m, "Error");
  py::register_exception<ConfigError>(m, "ConfigError", error.ptr());

  m.def("normalize_config", [](const std::string& t) { return dump(emit_config(config_from(t))); },
        "Validated config with defaults spelled out.");
  m.def("constants", [](const std::string& t) { return dump(to_json(constants_report(config_from(t)))); });
  m.def("profile", [](const std::string& t) { return dump(profile(config_from(t))); });
  m.def("simulate", [](const std::string& t) { return dump(simulate(config_from(t))); },
        py::call_guard<py::gil_scoped_release>());
  m.def("layers", [](const std::string& t) { return dump(layers(config_from(t))); },
        py::call_guard<py::gil_scoped_release>());
  m.def("compare", [](const std::string& t) { return dump(to_json(compare_pde_ode(config_from(t)))); },
        py::call_guard<py::gil_scoped_release>());
  m.def(
      "sweep_metastability",
      [](const std::string& t, int threads) { return dump(to_json(metastability_sweep(config_from(t), threads))); },
      py::arg("config"), py::arg("threads") = 1, py::call_guard<py::gil_scoped_release>());
  m.def(
      "sweep_asymptotics",
      [](const std::string& t, int threads) {
        const auto c = config_from(t);
        require_keys(c, {"r_list"});
        return dump(to_json(asymptotics_sweep(c.r_list, c.build_potential(), c.r0, threads), c));
      },
      py::arg("config"), py::arg("threads") = 1, py::call_guard<py::gil_scoped_release>());
  m.def(
      "sweep_tau", [](const std::string& t, int threads) { return dump(to_json(tau_limit_study(config_from(t), threads))); },
      py::arg("config"), py::arg("threads") = 1, py::call_guard<py::gil_scoped_release>());
}
