#include "hypmac/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hypmac/error.hpp"

namespace hypmac {

using nlohmann::json;

namespace {

// JSON has no NaN; absent values become null.
json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json optional_time(const std::optional<double>& t) { return t ? json(*t) : json(nullptr); }

class Table {
 public:
  explicit Table(std::vector<std::string> header) : rows_{std::move(header)} {}
  void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

  std::string str() const {
    std::vector<std::size_t> width(rows_.front().size(), 0);
    for (const auto& r : rows_) {
      for (std::size_t k = 0; k < r.size(); ++k) width[k] = std::max(width[k], r[k].size());
    }
    std::string out;
    for (const auto& r : rows_) {
      for (std::size_t k = 0; k < r.size(); ++k) {
        out += std::string(width[k] - r[k].size() + (k ? 2 : 0), ' ') + r[k];
      }
      out += '\n';
    }
    return out;
  }

 private:
  std::vector<std::vector<std::string>> rows_;
};

std::string yes_no(bool b) { return b ? "yes" : "no"; }

void csv_row(std::ostream& os, std::initializer_list<double> values) {
  bool first = true;
  for (const double v : values) {
    os << (first ? "" : ",") << format_number(v);
    first = false;
  }
}

}  // namespace

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.8g", x);
  return buf;
}

void write_diagnostics_csv(std::ostream& os, const SimulationResult& result) {
  std::size_t layers = 0;
  for (const auto& r : result.rows) layers = std::max(layers, r.layers.size());
  os << "t,mass,energy,cum_dissipation";
  for (std::size_t j = 1; j <= layers; ++j) os << ",layer_" << j;
  os << ",max_speed\n";
  for (const auto& r : result.rows) {
    csv_row(os, {r.t, r.mass, r.energy, r.cum_dissipation});
    for (std::size_t j = 0; j < layers; ++j) os << ',' << (j < r.layers.size() ? format_number(r.layers[j]) : "");
    os << ',' << (std::isfinite(r.max_speed) ? format_number(r.max_speed) : "") << '\n';
  }
}

void write_state_csv(std::ostream& os, const PdeState& state) {
  os << "x,u,v\n";
  const auto x = grid_nodes(state.cells());
  for (std::size_t i = 0; i < x.size(); ++i) {
    csv_row(os, {x[i], state.u[i], state.v.empty() ? 0.0 : state.v[i]});
    os << '\n';
  }
}

void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory, const LayerSystem& system) {
  if (trajectory.rows.empty()) return;
  const std::size_t m = trajectory.rows.front().h.size();
  os << 't';
  for (std::size_t j = 1; j <= m; ++j) os << ",h_" << j;
  for (std::size_t j = 1; j <= m; ++j) os << ",hdot_" << j;
  os << ",L_plus,L_minus,Psi\n";
  for (const auto& row : trajectory.rows) {
    os << format_number(row.t);
    for (const double h : row.h) os << ',' << format_number(h);
    for (const double v : row_velocity(row, system)) os << ',' << format_number(v);
    const LayerVector h(row.h);
    const auto l = lengths_Lpm(h);
    double psi = std::numeric_limits<double>::quiet_NaN();
    try {
      psi = barrier_psi(system.alphas(h));
    } catch (const Error&) {
    }
    os << ',' << format_number(l.plus) << ',' << format_number(l.minus) << ','
       << (std::isfinite(psi) ? format_number(psi) : "") << '\n';
  }
}

void write_profile_csv(std::ostream& os, const MetastableProfile& profile) {
  os << "x,u,du\n";
  const auto x = profile.nodes();
  for (std::size_t i = 0; i < x.size(); ++i) {
    csv_row(os, {x[i], profile.samples()[i], profile.derivative(x[i])});
    os << '\n';
  }
}

void write_metastability_csv(std::ostream& os, const MetastabilityReport& report) {
  os << "epsilon,inv_epsilon,speed,log_speed,run_end,collided,initial\n";
  for (const auto& p : report.points) {
    csv_row(os, {p.epsilon, 1.0 / p.epsilon, p.speed, std::log(p.speed), p.run_end});
    os << ',' << (p.collided ? 1 : 0) << ',' << to_string(p.initial) << '\n';
  }
}

void write_asymptotics_csv(std::ostream& os, const AsymptoticsReport& report) {
  os << "r,sign,alpha_exact,alpha_asymptotic,alpha_error,beta_exact,beta_asymptotic,beta_error\n";
  for (const auto& r : report.rows) {
    os << format_number(r.r) << ',' << r.sign << ',';
    csv_row(os, {r.alpha_exact, r.alpha_asymptotic, r.alpha_error, r.beta_exact, r.beta_asymptotic,
                 r.beta_error});
    os << '\n';
  }
}

void write_tau_csv(std::ostream& os, const TauLimitReport& report) {
  os << "tau,distance,ratio\n";
  for (const auto& r : report.rows) {
    os << format_number(r.tau) << ',' << format_number(r.distance) << ','
       << (std::isfinite(r.ratio) ? format_number(r.ratio) : "") << '\n';
  }
}

void write_comparison_csv(std::ostream& os, const ComparisonReport& report) {
  const std::size_t m = report.layer_errors.size();
  os << 't';
  for (std::size_t j = 1; j <= m; ++j) os << ",pde_" << j;
  for (std::size_t j = 1; j <= m; ++j) os << ",ode_" << j;
  os << '\n';
  std::size_t k = 0;
  for (const auto& row : report.pde.rows) {
    if (row.t > report.window_end + 1e-12 || row.layers.size() != m) continue;
    while (k < report.ode.rows.size() && report.ode.rows[k].t < row.t - 1e-9) ++k;
    if (k == report.ode.rows.size()) break;
    if (std::abs(report.ode.rows[k].t - row.t) > 1e-9 * std::max(1.0, row.t)) continue;
    os << format_number(row.t);
    for (const double h : row.layers) os << ',' << format_number(h);
    for (const double h : report.ode.rows[k].h) os << ',' << format_number(h);
    os << '\n';
  }
}

ConstantsReport constants_report(const RunConfig& config) {
  ConstantsReport r;
  const Potential p = config.build_potential();
  const Damping g = config.damping.build(p);
  r.c_f = transition_energy(p);
  r.waves = wave_constants(p);
  r.gamma = damping_average(p, g);
  r.sigma = g.lower_bound();
  return r;
}

json to_json(const ConstantsReport& r) {
  return {{"c_F", r.c_f},         {"A_plus", r.waves.a_plus}, {"A_minus", r.waves.a_minus},
          {"K_plus", r.waves.k_plus}, {"K_minus", r.waves.k_minus}, {"gamma", r.gamma},
          {"sigma", r.sigma}};
}

json to_json(const MetastableProfile& p, const RunConfig& config) {
  json gaps = json::array();
  for (const auto& g : p.gaps()) {
    gaps.push_back({{"length", g.length}, {"sign", g.sign}, {"alpha", g.alpha}, {"beta", g.beta}});
  }
  const std::vector<double> zero(p.samples().size(), 0.0);
  const Potential pot = config.build_potential();
  return {{"config", emit_config(config)},
          {"layers", p.layers().positions()},
          {"gaps", gaps},
          {"barrier", p.barrier()},
          {"mass", p.mass()},
          {"renormalized_energy", renormalized_energy(p.samples(), zero, p.epsilon(), 0.0, pot)},
          {"tracked_layers", track_layers(p.samples())}};
}

json to_json(const SimulationResult& r, const RunConfig& config) {
  json out{{"config", emit_config(config)},
           {"dt", r.dt},
           {"steps", r.steps},
           {"collided", r.collided},
           {"collision_time", r.collided ? json(r.collision_time) : json(nullptr)},
           {"max_energy_increase", r.max_energy_increase},
           {"warnings", r.warnings}};
  if (!r.rows.empty()) {
    const auto& first = r.rows.front();
    const auto& last = r.rows.back();
    out["mass_drift"] = last.mass - first.mass;
    out["final_time"] = last.t;
    out["final_layers"] = last.layers;
    out["final_energy"] = last.energy;
  }
  return out;
}

json to_json(const Trajectory& r, const RunConfig& config) {
  json out{{"config", emit_config(config)},
           {"collided", r.collided},
           {"collision_time", r.collided ? json(r.collision_time) : json(nullptr)},
           {"steps", r.steps}};
  if (!r.rows.empty()) {
    out["final_time"] = r.rows.back().t;
    out["final_layers"] = r.rows.back().h;
  }
  return out;
}

json to_json(const ComparisonReport& r) {
  return {{"config", emit_config(r.config)},
          {"pde_epsilon", r.pde_epsilon},
          {"ode_epsilon", r.ode_epsilon},
          {"layer_errors", r.layer_errors},
          {"max_error", r.max_error()},
          {"samples", r.samples},
          {"window_end", r.window_end},
          {"pde_collision", optional_time(r.pde_collision)},
          {"ode_collision", optional_time(r.ode_collision)},
          {"window_mismatch", r.window_mismatch},
          {"ode_initial_velocity", r.ode_initial_velocity},
          {"pde_dt", r.pde.dt},
          {"warnings", r.warnings}};
}

json to_json(const MetastabilityReport& r) {
  json points = json::array();
  for (const auto& p : r.points) {
    points.push_back({{"epsilon", p.epsilon},
                      {"speed", p.speed},
                      {"run_end", p.run_end},
                      {"collided", p.collided},
                      {"initial", to_string(p.initial)},
                      {"warnings", p.warnings}});
  }
  return {{"config", emit_config(r.config)},
          {"min_gap", r.min_gap},
          {"A", r.a},
          {"points", points},
          {"slope", r.fit.slope},
          {"intercept", r.fit.intercept},
          {"predicted", r.fit.predicted},
          {"deviation", r.fit.deviation},
          {"prefactor_corrected_slope", r.fit.prefactor_corrected_slope}};
}

json to_json(const AsymptoticsReport& r, const RunConfig& config) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"r", row.r},
                    {"sign", row.sign},
                    {"alpha_exact", row.alpha_exact},
                    {"alpha_asymptotic", row.alpha_asymptotic},
                    {"alpha_error", row.alpha_error},
                    {"beta_exact", row.beta_exact},
                    {"beta_asymptotic", row.beta_asymptotic},
                    {"beta_error", row.beta_error}});
  }
  return {{"config", emit_config(config)},
          {"rows", rows},
          {"alpha_error_decreasing", r.alpha_error_decreasing},
          {"beta_error_decreasing", r.beta_error_decreasing}};
}

json to_json(const TauLimitReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"tau", row.tau}, {"distance", row.distance}, {"ratio", number_or_null(row.ratio)}});
  }
  return {{"config", emit_config(r.config)}, {"rows", rows}, {"halving", r.halving}, {"monotone", r.monotone}};
}

std::string to_text(const ConstantsReport& r) {
  Table t({"constant", "value"});
  t.add({"c_F", format_number(r.c_f)});
  t.add({"A+", format_number(r.waves.a_plus)});
  t.add({"A-", format_number(r.waves.a_minus)});
  t.add({"K+", format_number(r.waves.k_plus)});
  t.add({"K-", format_number(r.waves.k_minus)});
  t.add({"gamma", format_number(r.gamma)});
  t.add({"sigma", format_number(r.sigma)});
  return t.str();
}

std::string to_text(const ComparisonReport& r) {
  Table t({"layer", "sup error"});
  for (std::size_t j = 0; j < r.layer_errors.size(); ++j) {
    t.add({std::to_string(j + 1), format_number(r.layer_errors[j])});
  }
  std::ostringstream os;
  os << t.str() << "samples " << r.samples << ", window [0, " << format_number(r.window_end) << "]\n";
  if (r.pde_collision) os << "PDE collision at t = " << format_number(*r.pde_collision) << '\n';
  if (r.ode_collision) os << "ODE collision at t = " << format_number(*r.ode_collision) << '\n';
  if (r.window_mismatch) os << "WindowMismatch: the methods collide at very different times\n";
  for (const auto& w : r.warnings) os << "warning: " << w << '\n';
  return os.str();
}

std::string to_text(const MetastabilityReport& r) {
  Table t({"eps", "speed", "run end", "collided", "initial"});
  for (const auto& p : r.points) {
    t.add({format_number(p.epsilon), format_number(p.speed), format_number(p.run_end), yes_no(p.collided),
           std::string(to_string(p.initial))});
  }
  std::ostringstream os;
  os << t.str() << "slope " << format_number(r.fit.slope) << ", predicted " << format_number(r.fit.predicted)
     << ", deviation " << format_number(r.fit.deviation) << '\n'
     << "slope of ln(speed/eps) " << format_number(r.fit.prefactor_corrected_slope) << '\n';
  for (const auto& p : r.points) {
    for (const auto& w : p.warnings) os << "warning: " << w << '\n';
  }
  return os.str();
}

std::string to_text(const AsymptoticsReport& r) {
  Table t({"r", "sign", "alpha exact", "alpha asym", "rel err", "beta exact", "beta asym", "rel err"});
  for (const auto& row : r.rows) {
    t.add({format_number(row.r), row.sign > 0 ? "+" : "-", format_number(row.alpha_exact),
           format_number(row.alpha_asymptotic), format_number(row.alpha_error), format_number(row.beta_exact),
           format_number(row.beta_asymptotic), format_number(row.beta_error)});
  }
  return t.str() + "alpha error decreasing: " + yes_no(r.alpha_error_decreasing) +
         ", beta error decreasing: " + yes_no(r.beta_error_decreasing) + '\n';
}

std::string to_text(const TauLimitReport& r) {
  Table t({"tau", "distance", "ratio"});
  for (const auto& row : r.rows) {
    t.add({format_number(row.tau), format_number(row.distance),
           std::isfinite(row.ratio) ? format_number(row.ratio) : "-"});
  }
  return t.str() + "halving: " + yes_no(r.halving) + ", monotone: " + yes_no(r.monotone) + '\n';
}

std::filesystem::path write_output(const std::filesystem::path& dir, const std::string& name,
                                   const std::string& content) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
  const auto path = dir / name;
  std::ofstream os(path);
  os << content;
  if (!os) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  return path;
}

}  // namespace hypmac
