#include "hypmac/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <string>

#include "hypmac/error.hpp"

namespace hypmac {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Runs fn(0..count-1) on up to `threads` workers; results keep the index order.
template <class Fn>
auto parallel_map(std::size_t count, int threads, Fn fn) {
  using R = decltype(fn(std::size_t{0}));
  std::vector<R> out;
  out.reserve(count);
  const std::size_t width = static_cast<std::size_t>(std::max(1, threads));
  if (width == 1) {
    for (std::size_t i = 0; i < count; ++i) out.push_back(fn(i));
    return out;
  }
  for (std::size_t start = 0; start < count; start += width) {
    std::vector<std::future<R>> batch;
    for (std::size_t i = start; i < std::min(count, start + width); ++i) {
      batch.push_back(std::async(std::launch::async, fn, i));
    }
    for (auto& f : batch) out.push_back(f.get());
  }
  return out;
}

bool same_time(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(a)); }

double run_end(const SimulationResult& r, double t_end) { return r.collided ? r.collision_time : t_end; }
double run_end(const Trajectory& r, double t_end) { return r.collided ? r.collision_time : t_end; }

double sup_distance(const Trajectory& a, const Trajectory& b) {
  double d = 0.0;
  std::size_t j = 0;
  for (const auto& row : a.rows) {
    while (j < b.rows.size() && b.rows[j].t < row.t && !same_time(b.rows[j].t, row.t)) ++j;
    if (j == b.rows.size()) break;
    if (!same_time(b.rows[j].t, row.t)) continue;
    for (std::size_t k = 0; k < row.h.size(); ++k) d = std::max(d, std::abs(row.h[k] - b.rows[j].h[k]));
  }
  return d;
}

std::vector<double> gap_lengths(const LayerVector& h) { return h.gaps(); }

}  // namespace

std::vector<double> tanh_profile(const LayerVector& h, double eps, int n) {
  std::vector<double> u(n + 1);
  const double w = std::numbers::sqrt2 * eps;
  const double sign = (h.n() % 2 == 0) ? 1.0 : -1.0;
  for (int i = 0; i <= n; ++i) {
    const double x = static_cast<double>(i) / n;
    double p = sign;
    for (std::size_t j = 0; j < h.size(); ++j) p *= std::tanh((x - h[j]) / w);
    u[i] = p;
  }
  return u;
}

InitialDatum make_initial_datum(const LayerVector& h, double eps, const Potential& potential, int n,
                                InitialProfile policy, double gap_factor) {
  InitialDatum out;
  if (policy == InitialProfile::Tanh) {
    out.u = tanh_profile(h, eps, n);
    out.used = InitialProfile::Tanh;
    return out;
  }
  try {
    out.u = build_profile(h, eps, potential, n, ProfileOptions{AlphaMode::Exact, gap_factor}).samples();
    out.used = InitialProfile::Metastable;
  } catch (const Error& e) {
    if (policy == InitialProfile::Metastable || e.code() != ErrorCode::NoSolution) throw;
    out.u = tanh_profile(h, eps, n);
    out.used = InitialProfile::Tanh;
    out.warnings.push_back("eps = " + std::to_string(eps) +
                           ": a gap is too short for a standing wave; started from tanh fronts");
  }
  return out;
}

double ComparisonReport::max_error() const {
  double m = 0.0;
  for (const double e : layer_errors) m = std::max(m, e);
  return m;
}

ComparisonReport compare_pde_ode(const RunConfig& config) {
  require_keys(config, {"epsilon", "layers", "t_end"});
  if (config.model == Model::ChN3) {
    throw ConfigError(ErrorCode::ConsistencyError, "model", "ch-n3 has no PDE to compare against");
  }
  ComparisonReport rep;
  rep.config = config;
  rep.pde_epsilon = *config.epsilon;
  rep.ode_epsilon = config.ode_epsilon.value_or(rep.pde_epsilon);
  const double t_end = *config.t_end;
  const double cadence = config.cadence_or_default();
  const LayerVector h = config.initial_layers();

  const PdeParams pde_params = config.pde_params();
  auto datum = make_initial_datum(h, rep.pde_epsilon, pde_params.potential, config.n, config.initial_profile,
                                  config.gap_factor);
  rep.warnings = datum.warnings;
  std::vector<double> u1;
  if (is_hyperbolic(config.model) && !config.u1.is_zero()) u1 = config.u1.sample(config.n);
  SimulationOptions sim;
  sim.t_end = t_end;
  sim.cadence = cadence;
  rep.pde = run_simulation(datum.u, u1, pde_params, sim);
  for (const auto& w : rep.pde.warnings) rep.warnings.push_back(w);

  OdeParams op = config.ode_params();
  op.epsilon = rep.ode_epsilon;
  const LayerSystem system(op);
  LayerState start{h, {}, 0.0};
  if (is_hyperbolic(config.model)) {
    if (!config.hdot0.empty()) {
      start.hdot = config.hdot0;
    } else if (rep.pde.rows.size() >= 2 && rep.pde.rows[1].layers.size() == h.size()) {
      const auto& r0 = rep.pde.rows[0];
      const auto& r1 = rep.pde.rows[1];
      start.hdot.resize(h.size());
      for (std::size_t j = 0; j < h.size(); ++j) start.hdot[j] = (r1.layers[j] - r0.layers[j]) / (r1.t - r0.t);
    }
  }
  IntegrationOptions io;
  io.t_end = t_end;
  io.cadence = cadence;
  io.tol = config.tol;
  io.project_initial_velocity = config.project_hdot0;
  rep.ode = integrate_layers(start, system, io);
  if (is_hyperbolic(config.model)) rep.ode_initial_velocity = rep.ode.rows.front().hdot;

  if (rep.pde.collided) rep.pde_collision = rep.pde.collision_time;
  if (rep.ode.collided) rep.ode_collision = rep.ode.collision_time;
  const double end_pde = run_end(rep.pde, t_end), end_ode = run_end(rep.ode, t_end);
  rep.window_end = std::min(end_pde, end_ode);
  rep.window_mismatch = std::abs(end_pde - end_ode) > 0.1 * t_end;

  rep.layer_errors.assign(h.size(), 0.0);
  std::size_t j = 0;
  for (const auto& row : rep.pde.rows) {
    if (row.t > rep.window_end && !same_time(row.t, rep.window_end)) break;
    if (row.layers.size() != h.size()) continue;
    while (j < rep.ode.rows.size() && rep.ode.rows[j].t < row.t && !same_time(rep.ode.rows[j].t, row.t)) ++j;
    if (j == rep.ode.rows.size()) break;
    if (!same_time(rep.ode.rows[j].t, row.t)) continue;
    for (std::size_t k = 0; k < h.size(); ++k) {
      rep.layer_errors[k] = std::max(rep.layer_errors[k], std::abs(row.layers[k] - rep.ode.rows[j].h[k]));
    }
    ++rep.samples;
  }
  if (rep.samples == 0) throw Error(ErrorCode::WindowMismatch, "no common sample times between PDE and ODE");
  return rep;
}

SlopeFit fit_slope(std::span<const double> epsilons, std::span<const double> speeds, double predicted) {
  if (epsilons.size() != speeds.size()) throw Error(ErrorCode::InvalidParameter, "one speed per epsilon");
  if (epsilons.size() < 3) {
    throw Error(ErrorCode::InsufficientSamples, "a slope fit needs at least three epsilon values");
  }
  SlopeFit fit;
  fit.predicted = predicted;
  std::vector<double> corrected;
  for (std::size_t k = 0; k < epsilons.size(); ++k) {
    if (!(speeds[k] > 0.0) || !std::isfinite(speeds[k])) {
      throw Error(ErrorCode::InsufficientSamples,
                  "no usable layer speed at eps = " + std::to_string(epsilons[k]));
    }
    fit.inv_eps.push_back(1.0 / epsilons[k]);
    fit.log_speed.push_back(std::log(speeds[k]));
    corrected.push_back(fit.log_speed.back() - std::log(epsilons[k]));
  }
  auto least_squares = [&](const std::vector<double>& y, double& slope, double& intercept) {
    const double m = static_cast<double>(y.size());
    double sx = 0, sy = 0;
    for (std::size_t k = 0; k < y.size(); ++k) {
      sx += fit.inv_eps[k];
      sy += y[k];
    }
    const double mx = sx / m, my = sy / m;
    double sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < y.size(); ++k) {
      sxx += (fit.inv_eps[k] - mx) * (fit.inv_eps[k] - mx);
      sxy += (fit.inv_eps[k] - mx) * (y[k] - my);
    }
    if (!(sxx > 0.0)) throw Error(ErrorCode::InsufficientSamples, "epsilon values must differ");
    slope = sxy / sxx;
    intercept = my - slope * mx;
  };
  least_squares(fit.log_speed, fit.slope, fit.intercept);
  double unused = 0.0;
  least_squares(corrected, fit.prefactor_corrected_slope, unused);
  fit.deviation = (fit.slope - predicted) / std::abs(predicted);
  return fit;
}

MetastabilityReport metastability_sweep(const RunConfig& config, int threads) {
  require_keys(config, {"layers", "t_end", "epsilons"});
  if (config.epsilons.size() < 3) {
    throw Error(ErrorCode::InsufficientSamples, "a metastability sweep needs at least three epsilon values");
  }
  MetastabilityReport rep;
  rep.config = config;
  const LayerVector h(config.layers);
  const Potential potential = config.build_potential();
  const auto gaps = gap_lengths(h);
  const auto smallest = std::min_element(gaps.begin(), gaps.end());
  rep.min_gap = *smallest;
  rep.a = wave_constants(potential).a(gap_sign(static_cast<int>(smallest - gaps.begin()) + 1));
  const double t_end = *config.t_end;
  const double cadence = config.cadence_or_default();

  rep.points = parallel_map(config.epsilons.size(), threads, [&](std::size_t k) {
    SweepPoint pt;
    pt.epsilon = config.epsilons[k];
    double speed = 0.0;
    if (config.sweep_method == SweepMethod::Ode) {
      OdeParams op = config.ode_params();
      op.epsilon = pt.epsilon;
      const LayerSystem system(op);
      IntegrationOptions io;
      io.t_end = t_end;
      io.cadence = cadence;
      io.tol = config.tol;
      const auto traj = integrate_layers({h, {}, 0.0}, system, io);
      pt.collided = traj.collided;
      pt.run_end = run_end(traj, t_end);
      // Resample the first quarter densely so the result does not depend on the cadence.
      io.t_end = 0.25 * pt.run_end;
      io.cadence = io.t_end / 400.0;
      for (const auto& row : integrate_layers({h, {}, 0.0}, system, io).rows) {
        for (const double v : row_velocity(row, system)) speed = std::max(speed, std::abs(v));
      }
    } else {
      RunConfig local = config;
      local.epsilon = pt.epsilon;
      const PdeParams pp = local.pde_params();
      auto datum = make_initial_datum(h, pt.epsilon, pp.potential, config.n, config.initial_profile,
                                      config.gap_factor);
      pt.initial = datum.used;
      pt.warnings = datum.warnings;
      std::vector<double> u1;
      if (is_hyperbolic(config.model) && !config.u1.is_zero()) u1 = config.u1.sample(config.n);
      SimulationOptions sim;
      sim.t_end = t_end;
      sim.cadence = cadence;
      const auto r = run_simulation(datum.u, u1, pp, sim);
      pt.collided = r.collided;
      pt.run_end = run_end(r, t_end);
      for (const auto& row : r.rows) {
        if (row.t > 0.25 * pt.run_end) break;
        if (std::isfinite(row.max_speed)) speed = std::max(speed, row.max_speed);
      }
    }
    pt.speed = speed;
    return pt;
  });

  std::vector<double> eps, speeds;
  for (const auto& pt : rep.points) {
    eps.push_back(pt.epsilon);
    speeds.push_back(pt.speed);
  }
  rep.fit = fit_slope(eps, speeds, -rep.a * rep.min_gap);
  return rep;
}

AsymptoticsReport asymptotics_sweep(std::span<const double> r_list, const Potential& potential, double r0,
                                    int threads) {
  if (r_list.empty()) throw Error(ErrorCode::InsufficientSamples, "empty r list");
  for (const double r : r_list) {
    if (!(r > 0.0) || !(r < r0)) {
      throw Error(ErrorCode::InvalidParameter, "r = " + std::to_string(r) + " is outside (0, r0)");
    }
  }
  const Potential p = validate_potential(potential);
  std::vector<int> signs{1};
  if (!p.is_even()) signs.push_back(-1);
  struct Job {
    double r;
    int s;
  };
  std::vector<Job> jobs;
  for (const int s : signs) {
    for (const double r : r_list) jobs.push_back({r, s});
  }
  AsymptoticsReport rep;
  rep.rows = parallel_map(jobs.size(), threads, [&](std::size_t k) {
    const auto [r, s] = jobs[k];
    // Only eps / l matters; use l = 1.
    const auto exact = alpha_beta(1.0, r, s, p, AlphaMode::Exact, r0);
    const auto asym = alpha_beta(1.0, r, s, p, AlphaMode::Asymptotic, r0);
    AsymptoticsRow row;
    row.r = r;
    row.sign = s;
    row.alpha_exact = exact.alpha;
    row.alpha_asymptotic = asym.alpha;
    row.alpha_error = std::abs(exact.alpha / asym.alpha - 1.0);
    row.beta_exact = exact.beta;
    row.beta_asymptotic = asym.beta;
    row.beta_error = std::abs(exact.beta / asym.beta - 1.0);
    return row;
  });

  rep.alpha_error_decreasing = rep.beta_error_decreasing = true;
  for (const int s : signs) {
    std::vector<AsymptoticsRow> branch;
    for (const auto& row : rep.rows) {
      if (row.sign == s) branch.push_back(row);
    }
    std::sort(branch.begin(), branch.end(), [](const auto& a, const auto& b) { return a.r > b.r; });
    for (std::size_t k = 1; k < branch.size(); ++k) {
      rep.alpha_error_decreasing = rep.alpha_error_decreasing && branch[k].alpha_error < branch[k - 1].alpha_error;
      rep.beta_error_decreasing = rep.beta_error_decreasing && branch[k].beta_error < branch[k - 1].beta_error;
    }
  }
  return rep;
}

TauLimitReport tau_limit_study(const RunConfig& config, int threads) {
  require_keys(config, {"epsilon", "layers", "t_end", "taus"});
  if (config.damping.kind != Damping::Kind::One) {
    throw ConfigError(ErrorCode::ConsistencyError, "damping", "the tau study needs g = 1");
  }
  TauLimitReport rep;
  rep.config = config;
  const LayerVector h = config.initial_layers();
  IntegrationOptions io;
  io.t_end = *config.t_end;
  io.cadence = config.cadence_or_default();
  io.tol = config.tol;

  OdeParams base = config.ode_params();
  base.model = Model::MAC;
  base.tau = 0.0;
  const LayerSystem mac(base);
  const auto reference = integrate_layers({h, {}, 0.0}, mac, io);

  const auto distances = parallel_map(config.taus.size(), threads, [&](std::size_t k) {
    const double tau = config.taus[k];
    if (tau == 0.0) return sup_distance(integrate_layers({h, {}, 0.0}, mac, io), reference);
    OdeParams hp = base;
    hp.model = Model::HypMAC;
    hp.tau = tau;
    const LayerSystem hyp(hp);
    return sup_distance(integrate_layers({h, {}, 0.0}, hyp, io), reference);
  });

  rep.halving = true;
  rep.monotone = true;
  for (std::size_t k = 0; k < config.taus.size(); ++k) {
    TauRow row;
    row.tau = config.taus[k];
    row.distance = distances[k];
    row.ratio = (k > 0 && distances[k - 1] > 0.0) ? distances[k] / distances[k - 1] : kNaN;
    if (k > 0 && row.tau > 0.0) {
      rep.halving = rep.halving && row.ratio >= 0.35 && row.ratio <= 0.65;
    }
    if (k > 0) rep.monotone = rep.monotone && distances[k] < distances[k - 1];
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace hypmac
