#include "hypmac/pde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hypmac/error.hpp"
#include "hypmac/profile.hpp"

namespace hypmac {

std::string_view to_string(Model m) {
  switch (m) {
    case Model::AC: return "ac";
    case Model::MAC: return "mac";
    case Model::HypAC: return "hyp-ac";
    case Model::HypMAC: return "hyp-mac";
    case Model::ChN3: return "ch-n3";
  }
  return "?";
}

std::optional<Model> parse_model(std::string_view name) {
  for (const Model m : {Model::AC, Model::MAC, Model::HypAC, Model::HypMAC, Model::ChN3}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

PdeParams validate_pde_params(PdeParams params) {
  if (params.model == Model::ChN3) {
    throw Error(ErrorCode::InvalidParameter, "ch-n3 is a layer model only; no PDE is attached");
  }
  if (!(params.epsilon > 0.0) || !std::isfinite(params.epsilon)) {
    throw Error(ErrorCode::InvalidParameter, "epsilon must be positive");
  }
  if (is_hyperbolic(params.model) && !(params.tau > 0.0)) {
    throw Error(ErrorCode::InvalidParameter, "hyperbolic models need tau > 0");
  }
  params.potential = validate_potential(std::move(params.potential));
  params.damping = validate_damping(std::move(params.damping), params.potential);
  return params;
}

std::vector<double> grid_nodes(int n) {
  std::vector<double> x(n + 1);
  for (int i = 0; i <= n; ++i) x[i] = static_cast<double>(i) / n;
  x.back() = 1.0;
  return x;
}

namespace {

void require_grid(const PdeState& s, const PdeParams& p) {
  if (s.cells() < kMinCells) {
    throw Error(ErrorCode::InvalidParameter, "grid needs at least " + std::to_string(kMinCells) + " cells");
  }
  if (is_hyperbolic(p.model) && s.v.size() != s.u.size()) {
    throw Error(ErrorCode::InvalidParameter, "hyperbolic state needs v on every node");
  }
}

// Writes du, dv for the state (u, v); `work` is scratch of the grid size.
void rhs_into(std::span<const double> u, std::span<const double> v, const PdeParams& p,
              std::span<double> du, std::span<double> dv, std::span<double> work) {
  const std::size_t n = u.size() - 1;
  const double inv_dx2 = static_cast<double>(n) * static_cast<double>(n);
  const double e2 = p.epsilon * p.epsilon;
  const bool hyperbolic = is_hyperbolic(p.model);
  const bool nonlocal = is_mass_conserving(p.model);

  // work <- eps^2 u_xx + f(u)
  work[0] = e2 * 2.0 * (u[1] - u[0]) * inv_dx2 + p.potential.reaction(u[0]);
  for (std::size_t i = 1; i < n; ++i) {
    work[i] = e2 * (u[i + 1] - 2.0 * u[i] + u[i - 1]) * inv_dx2 + p.potential.reaction(u[i]);
  }
  work[n] = e2 * 2.0 * (u[n - 1] - u[n]) * inv_dx2 + p.potential.reaction(u[n]);

  if (nonlocal) {
    double f_sum = 0.5 * (p.potential.reaction(u[0]) + p.potential.reaction(u[n]));
    for (std::size_t i = 1; i < n; ++i) f_sum += p.potential.reaction(u[i]);
    const double f_mean = f_sum / static_cast<double>(n);
    for (auto& w : work) w -= f_mean;
  }

  if (!hyperbolic) {
    std::copy(work.begin(), work.end(), du.begin());
    return;
  }

  std::copy(v.begin(), v.end(), du.begin());
  double correction = 0.0;
  if (nonlocal) {
    // <(1 - g(u)) v>
    double sum = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
      const double term = (1.0 - p.damping(u[i])) * v[i];
      sum += (i == 0 || i == n) ? 0.5 * term : term;
    }
    correction = sum / static_cast<double>(n);
  }
  const double inv_tau = 1.0 / p.tau;
  for (std::size_t i = 0; i <= n; ++i) {
    dv[i] = inv_tau * (work[i] - p.damping(u[i]) * v[i] - correction);
  }
}

double dissipation_rate(std::span<const double> ut) {
  std::vector<double> sq(ut.size());
  for (std::size_t i = 0; i < ut.size(); ++i) sq[i] = ut[i] * ut[i];
  return trapezoid_mass(sq);
}

// Preallocated RK4 driver shared by step() and run_simulation().
class Rk4 {
 public:
  Rk4(const PdeParams& p, std::size_t size) : p_(p), hyperbolic_(is_hyperbolic(p.model)) {
    const std::size_t vsize = hyperbolic_ ? size : 0;
    for (int s = 0; s < 4; ++s) {
      ku_[s].assign(size, 0.0);
      kv_[s].assign(vsize, 0.0);
    }
    su_.assign(size, 0.0);
    sv_.assign(vsize, 0.0);
    work_.assign(size, 0.0);
  }

  void advance(std::vector<double>& u, std::vector<double>& v, double dt) {
    static constexpr double kStage[4] = {0.0, 0.5, 0.5, 1.0};
    const std::size_t size = u.size();
    for (int s = 0; s < 4; ++s) {
      std::span<const double> us = u, vs = v;
      if (s > 0) {
        for (std::size_t i = 0; i < size; ++i) su_[i] = u[i] + kStage[s] * dt * ku_[s - 1][i];
        if (hyperbolic_) {
          for (std::size_t i = 0; i < size; ++i) sv_[i] = v[i] + kStage[s] * dt * kv_[s - 1][i];
        }
        us = su_;
        vs = sv_;
      }
      rhs_into(us, vs, p_, ku_[s], kv_[s], work_);
    }
    const double w = dt / 6.0;
    for (std::size_t i = 0; i < size; ++i) {
      u[i] += w * (ku_[0][i] + 2.0 * ku_[1][i] + 2.0 * ku_[2][i] + ku_[3][i]);
    }
    if (hyperbolic_) {
      for (std::size_t i = 0; i < size; ++i) {
        v[i] += w * (kv_[0][i] + 2.0 * kv_[1][i] + 2.0 * kv_[2][i] + kv_[3][i]);
      }
    }
    check_finite(u, "u");
    if (hyperbolic_) check_finite(v, "v");
  }

  /// u_t of the current state (v itself for the hyperbolic models).
  std::span<const double> velocity(const std::vector<double>& u, const std::vector<double>& v) {
    if (hyperbolic_) return v;
    rhs_into(u, v, p_, su_, sv_, work_);
    return su_;
  }

 private:
  static void check_finite(const std::vector<double>& w, const char* name) {
    for (const double x : w) {
      if (!(std::abs(x) <= kBlowUpSentinel)) {
        throw Error(ErrorCode::UnstableStep,
                    std::string("field ") + name + " left the range |.| <= 1e6; reduce dt");
      }
    }
  }

  const PdeParams& p_;
  bool hyperbolic_;
  std::vector<double> ku_[4], kv_[4];
  std::vector<double> su_, sv_, work_;
};

double max_damping(const Damping& g) {
  double top = 0.0;
  for (int i = 0; i <= 3000; ++i) top = std::max(top, g(-1.5 + 1e-3 * i));
  return top;
}

}  // namespace

PdeRates semidiscrete_rhs(const PdeState& state, const PdeParams& params) {
  require_grid(state, params);
  PdeRates r;
  r.du.assign(state.u.size(), 0.0);
  r.dv.assign(is_hyperbolic(params.model) ? state.u.size() : 0, 0.0);
  std::vector<double> work(state.u.size());
  rhs_into(state.u, state.v, params, r.du, r.dv, work);
  return r;
}

double stable_time_step(const PdeParams& params, int n) {
  const double dx = 1.0 / n;
  const double eps = params.epsilon;
  const double slope = max_abs_reaction_slope(params.potential);
  if (!is_hyperbolic(params.model)) {
    return 0.4 * dx * dx / (eps * eps) / (1.0 + dx * dx * slope / (eps * eps));
  }
  const double tau = params.tau;
  double dt = dx * std::sqrt(tau) / eps;
  dt = std::min(dt, tau / max_damping(params.damping));
  if (slope > 0.0) dt = std::min(dt, std::sqrt(tau / slope));
  return 0.5 * dt;
}

PdeState step(const PdeState& state, const PdeParams& params, double dt) {
  require_grid(state, params);
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidParameter, "dt must be positive");
  PdeState out = state;
  Rk4 rk(params, state.u.size());
  rk.advance(out.u, out.v, dt);
  out.t += dt;
  return out;
}

std::vector<double> track_layers(std::span<const double> u) {
  std::vector<double> out;
  if (u.size() < 2) return out;
  const double dx = 1.0 / static_cast<double>(u.size() - 1);
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] == 0.0) {
      // A zero node counts once, and only where the sign actually changes across it.
      std::size_t j = i;
      while (j + 1 < u.size() && u[j + 1] == 0.0) ++j;
      if (i > 0 && j + 1 < u.size() && (u[i - 1] > 0.0) != (u[j + 1] > 0.0)) {
        out.push_back(static_cast<double>(i) * dx);
      }
      i = j;
      continue;
    }
    if (i + 1 < u.size() && u[i + 1] != 0.0 && (u[i] > 0.0) != (u[i + 1] > 0.0)) {
      const double theta = u[i] / (u[i] - u[i + 1]);
      out.push_back((static_cast<double>(i) + theta) * dx);
    }
  }
  return out;
}

double mass_of(std::span<const double> u) { return trapezoid_mass(u); }

double energy_of(const PdeState& state, const PdeParams& params) {
  const std::span<const double> v =
      is_hyperbolic(params.model) ? std::span<const double>(state.v) : std::span<const double>();
  return params.epsilon * renormalized_energy(state.u, v, params.epsilon, params.tau, params.potential,
                                              GradientStencil::Compact);
}

namespace {

bool collided(const std::vector<double>& layers, std::size_t expected, double threshold) {
  if (layers.size() != expected) return true;
  if (layers.empty()) return false;
  if (2.0 * layers.front() < threshold || 2.0 * (1.0 - layers.back()) < threshold) return true;
  for (std::size_t j = 1; j < layers.size(); ++j) {
    if (layers[j] - layers[j - 1] < threshold) return true;
  }
  return false;
}

}  // namespace

SimulationResult run_simulation(std::span<const double> u0, std::span<const double> u1,
                                const PdeParams& params, const SimulationOptions& options) {
  const bool hyperbolic = is_hyperbolic(params.model);
  PdeState state;
  state.u.assign(u0.begin(), u0.end());
  if (hyperbolic) {
    if (u1.empty()) {
      state.v.assign(u0.size(), 0.0);
    } else if (u1.size() != u0.size()) {
      throw Error(ErrorCode::InvalidParameter, "u0 and u1 must share the grid");
    } else {
      state.v.assign(u1.begin(), u1.end());
    }
  }
  require_grid(state, params);
  if (!(options.t_end > 0.0) || !(options.cadence > 0.0)) {
    throw Error(ErrorCode::InvalidParameter, "t_end and cadence must be positive");
  }

  SimulationResult result;
  const int n = state.cells();
  const double dx = 1.0 / n;
  const double limit = stable_time_step(params, n);
  if (options.dt > limit * (1.0 + 1e-12)) {
    throw Error(ErrorCode::InvalidParameter,
                "dt " + std::to_string(options.dt) + " exceeds the stability limit " + std::to_string(limit));
  }
  const double dt_max = options.dt > 0.0 ? options.dt : limit;
  if (hyperbolic && is_mass_conserving(params.model) && std::abs(mass_of(state.v)) > 1e-14) {
    result.warnings.push_back("initial velocity has nonzero mean; mass relaxes instead of being conserved");
  }

  const double threshold = options.collision_cells * dx;
  const auto initial_layers = track_layers(state.u);
  const std::size_t layer_count = initial_layers.size();

  Rk4 rk(params, state.u.size());
  double cumulative = 0.0;
  double energy = energy_of(state, params);
  double rate = dissipation_rate(rk.velocity(state.u, state.v));

  auto record = [&](const std::vector<double>& layers) {
    DiagnosticRow row;
    row.t = state.t;
    row.mass = mass_of(state.u);
    row.energy = energy;
    row.cum_dissipation = cumulative;
    row.layers = layers;
    row.max_speed = std::numeric_limits<double>::quiet_NaN();
    if (!result.rows.empty()) {
      const auto& prev = result.rows.back();
      if (prev.layers.size() == layers.size() && state.t > prev.t) {
        double top = 0.0;
        for (std::size_t j = 0; j < layers.size(); ++j) {
          top = std::max(top, std::abs(layers[j] - prev.layers[j]));
        }
        row.max_speed = top / (state.t - prev.t);
      }
    }
    result.rows.push_back(std::move(row));
  };
  record(initial_layers);

  const long intervals = std::max(1L, static_cast<long>(std::ceil(options.t_end / options.cadence - 1e-9)));
  for (long k = 1; k <= intervals && !result.collided; ++k) {
    const double t_target = std::min(options.t_end, k * options.cadence);
    const double span = t_target - state.t;
    const long substeps = std::max(1L, static_cast<long>(std::ceil(span / dt_max - 1e-9)));
    const double dt = span / substeps;
    result.dt = std::max(result.dt, dt);
    std::vector<double> layers;
    for (long s = 0; s < substeps; ++s) {
      rk.advance(state.u, state.v, dt);
      state.t = (s + 1 == substeps) ? t_target : state.t + dt;
      ++result.steps;
      const double next_energy = energy_of(state, params);
      result.max_energy_increase = std::max(result.max_energy_increase, next_energy - energy);
      energy = next_energy;
      const double next_rate = dissipation_rate(rk.velocity(state.u, state.v));
      cumulative += 0.5 * dt * (rate + next_rate);
      rate = next_rate;
      layers = track_layers(state.u);
      if (collided(layers, layer_count, threshold)) {
        result.collided = true;
        result.collision_time = state.t;
        break;
      }
    }
    record(layers);
  }
  result.final_state = std::move(state);
  return result;
}

}  // namespace hypmac
