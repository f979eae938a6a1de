#include "hypmac/layer_ode.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <cmath>
#include <string>

#include "hypmac/error.hpp"

namespace hypmac {

namespace odeint = boost::numeric::odeint;

namespace {

std::vector<double> raw_gaps(std::span<const double> h) {
  std::vector<double> l(h.size() + 1);
  l.front() = 2.0 * h.front();
  for (std::size_t j = 1; j < h.size(); ++j) l[j] = h[j] - h[j - 1];
  l.back() = 2.0 * (1.0 - h.back());
  return l;
}

double min_gap(std::span<const double> h) {
  const auto l = raw_gaps(h);
  return *std::min_element(l.begin(), l.end());
}

}  // namespace

LayerSystem::LayerSystem(OdeParams params) : params_(std::move(params)) {
  if (!(params_.epsilon > 0.0) || !std::isfinite(params_.epsilon)) {
    throw Error(ErrorCode::InvalidParameter, "epsilon must be positive");
  }
  if (is_hyperbolic(params_.model) && !(params_.tau > 0.0)) {
    throw Error(ErrorCode::InvalidParameter, "hyperbolic models need tau > 0");
  }
  if (!(params_.gap_factor > 0.0)) throw Error(ErrorCode::InvalidParameter, "gap_factor must be positive");
  params_.potential = validate_potential(std::move(params_.potential));
  params_.damping = validate_damping(std::move(params_.damping), params_.potential);
  c_f_ = transition_energy(params_.potential);
  constants_ = wave_constants(params_.potential);
  if (is_hyperbolic(params_.model)) gamma_ = damping_average(params_.potential, params_.damping);
}

std::vector<double> LayerSystem::alphas(const LayerVector& h) const {
  if (params_.alpha_mode == AlphaMode::Exact) {
    return gap_alphas(h, params_.epsilon, params_.potential, AlphaMode::Exact);
  }
  return gap_alphas_asymptotic(h, params_.epsilon, constants_);
}

std::vector<double> LayerSystem::forcing(const LayerVector& h) const {
  if (params_.model == Model::ChN3 && h.size() != 3) {
    throw Error(ErrorCode::InvalidParameter, "ch-n3 needs exactly three layers");
  }
  if (!h.admissible(collision_threshold())) {
    throw Error(ErrorCode::InadmissibleLayers,
                "a gap is at or below " + std::to_string(collision_threshold()));
  }
  return forcing_unchecked(h.positions());
}

std::vector<double> LayerSystem::forcing_unchecked(std::span<const double> h) const {
  std::vector<double> alphas;
  if (params_.alpha_mode == AlphaMode::Exact) {
    alphas = gap_alphas(LayerVector(std::vector<double>(h.begin(), h.end())), params_.epsilon,
                        params_.potential, AlphaMode::Exact);
  } else {
    const auto l = raw_gaps(h);
    alphas.resize(l.size());
    for (std::size_t j = 1; j <= l.size(); ++j) {
      const int s = gap_sign(static_cast<int>(j));
      alphas[j - 1] = asymptotic_alpha(params_.epsilon / l[j - 1], constants_.a(s), constants_.k(s));
    }
  }
  if (params_.model == Model::ChN3) return ch_n3_velocity(h, alphas);
  auto v = is_mass_conserving(params_.model) ? mac_bracket(alphas) : ac_bracket(alphas);
  const double scale = params_.epsilon / c_f_;
  for (auto& x : v) x *= scale;
  return v;
}

std::vector<double> alphas_for_gaps(const LayerVector& h, double eps, const Potential& potential,
                                    AlphaMode mode) {
  return gap_alphas(h, eps, potential, mode);
}

double sigma_term(std::span<const double> alphas) {
  const std::size_t layers = alphas.size() - 1;  // N + 1
  double sum = 0.0;
  for (std::size_t i = 1; i <= layers; ++i) {
    const double sign = (i % 2 == 0) ? 1.0 : -1.0;
    sum += sign * (alphas[i] - alphas[i - 1]);
  }
  return sum / static_cast<double>(layers);
}

std::vector<double> ac_bracket(std::span<const double> alphas) {
  std::vector<double> out(alphas.size() - 1);
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = alphas[j + 1] - alphas[j];
  return out;
}

std::vector<double> mac_bracket(std::span<const double> alphas) {
  // d - c (c . d) / (N + 1) with c_j = (-1)^j, the same as d_j + (-1)^{j+1} Sigma. Summing
  // row by row keeps the rigid N = 1 motion bitwise identical for both layers.
  const auto d = ac_bracket(alphas);
  const std::size_t m = d.size();
  const double inv = 1.0 / static_cast<double>(m);
  std::vector<double> out(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    double acc = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      const double weight = ((j + k) % 2 == 0 ? -inv : inv) + (j == k ? 1.0 : 0.0);
      acc += weight * d[k];
    }
    out[j] = acc;
  }
  return out;
}

std::vector<double> ch_n3_velocity(std::span<const double> h, std::span<const double> alphas) {
  if (h.size() != 3 || alphas.size() != 4) {
    throw Error(ErrorCode::InvalidParameter, "ch-n3 needs exactly three layers");
  }
  const double left = (alphas[2] - alphas[0]) / (4.0 * (h[1] - h[0]));
  const double right = (alphas[3] - alphas[1]) / (4.0 * (h[2] - h[1]));
  return {left, left + right, right};
}

LayerRates layer_rhs(const LayerState& state, const LayerSystem& system) {
  LayerRates r;
  const auto force = system.forcing(state.h);
  if (!is_hyperbolic(system.model())) {
    r.dh = force;
    return r;
  }
  if (state.hdot.size() != state.h.size()) {
    throw Error(ErrorCode::InvalidParameter, "hyperbolic layer state needs one velocity per layer");
  }
  r.dh = state.hdot;
  r.ddh.resize(force.size());
  for (std::size_t j = 0; j < force.size(); ++j) {
    r.ddh[j] = (force[j] - system.gamma() * state.hdot[j]) / system.tau();
  }
  return r;
}

LengthsPm lengths_Lpm(const LayerVector& h) {
  const auto l = h.gaps();  // l_1 .. l_{N+2}
  LengthsPm out;
  for (std::size_t j = 1; j <= l.size(); ++j) {
    const bool end = (j == 1 || j == l.size());
    const double len = end ? 0.5 * l[j - 1] : l[j - 1];
    (gap_sign(static_cast<int>(j)) > 0 ? out.plus : out.minus) += len;
  }
  return out;
}

std::vector<double> lplus_coefficients(std::size_t layers) {
  std::vector<double> c(layers);
  for (std::size_t j = 1; j <= layers; ++j) c[j - 1] = (j % 2 == 0) ? 1.0 : -1.0;
  return c;
}

Eigen::MatrixXd leading_S(int n, double eps, double c_f) {
  if (n < 1) throw Error(ErrorCode::InvalidParameter, "N must be at least 1");
  Eigen::MatrixXd s(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) s(i, j) = (i == j) ? 2.0 : ((i + j) % 2 == 0 ? 1.0 : -1.0);
  }
  return (c_f / eps) * s;
}

Eigen::MatrixXd leading_S_inv(int n, double eps, double c_f) {
  if (n < 1) throw Error(ErrorCode::InvalidParameter, "N must be at least 1");
  Eigen::MatrixXd s(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) s(i, j) = (i == j) ? n : ((i + j) % 2 == 0 ? -1.0 : 1.0);
  }
  return (eps / ((n + 1) * c_f)) * s;
}

std::vector<double> default_initial_velocity(const LayerVector& h, const LayerSystem& system) {
  auto v = system.forcing(h);
  for (auto& x : v) x /= system.gamma();
  return v;
}

std::vector<double> project_velocity(std::span<const double> hdot) {
  const auto c = lplus_coefficients(hdot.size());
  double dot = 0.0;
  for (std::size_t j = 0; j < c.size(); ++j) dot += c[j] * hdot[j];
  const double coef = dot / static_cast<double>(c.size());  // c . c = N + 1
  std::vector<double> out(hdot.begin(), hdot.end());
  for (std::size_t j = 0; j < c.size(); ++j) out[j] -= coef * c[j];
  return out;
}

std::vector<double> row_velocity(const TrajectoryRow& row, const LayerSystem& system) {
  if (is_hyperbolic(system.model())) return row.hdot;
  return system.forcing_unchecked(row.h);
}

Trajectory integrate_layers(const LayerState& initial, const LayerSystem& system,
                            const IntegrationOptions& options) {
  if (!(options.t_end > initial.t) || !(options.cadence > 0.0)) {
    throw Error(ErrorCode::InvalidParameter, "need t_end > t0 and a positive cadence");
  }
  if (!(options.tol > 0.0)) throw Error(ErrorCode::InvalidParameter, "tol must be positive");
  const bool hyperbolic = is_hyperbolic(system.model());
  const std::size_t m = initial.h.size();
  system.forcing(initial.h);  // admissibility and ch-n3 layer count

  using State = std::vector<double>;
  State x(initial.h.positions());
  if (hyperbolic) {
    auto v = initial.hdot.empty() ? default_initial_velocity(initial.h, system) : initial.hdot;
    if (v.size() != m) throw Error(ErrorCode::InvalidParameter, "one initial velocity per layer");
    if (options.project_initial_velocity) v = project_velocity(v);
    x.insert(x.end(), v.begin(), v.end());
  }

  const double inv_tau = hyperbolic ? 1.0 / system.tau() : 0.0;
  auto rhs = [&](const State& y, State& dy, double) {
    const std::span<const double> h(y.data(), m);
    const auto force = system.forcing_unchecked(h);
    if (!hyperbolic) {
      std::copy(force.begin(), force.end(), dy.begin());
      return;
    }
    for (std::size_t j = 0; j < m; ++j) {
      dy[j] = y[m + j];
      dy[m + j] = inv_tau * (force[j] - system.gamma() * y[m + j]);
    }
  };

  Trajectory out;
  auto push = [&](double t, const State& y) {
    TrajectoryRow row;
    row.t = t;
    row.h.assign(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(m));
    if (hyperbolic) row.hdot.assign(y.begin() + static_cast<std::ptrdiff_t>(m), y.end());
    out.rows.push_back(std::move(row));
  };
  auto ordered = [&](const State& y) {
    const std::span<const double> h(y.data(), m);
    for (std::size_t j = 0; j + 1 < m; ++j) {
      if (!(h[j + 1] > h[j])) return false;
    }
    return h.front() > 0.0 && h.back() < 1.0;
  };
  const double threshold = system.collision_threshold();
  auto collided = [&](const State& y) {
    return !ordered(y) || min_gap(std::span<const double>(y.data(), m)) <= threshold;
  };

  auto stepper = odeint::make_dense_output(options.tol, options.tol, odeint::runge_kutta_dopri5<State>());
  stepper.initialize(x, initial.t, std::min(options.cadence, options.t_end - initial.t) * 1e-3);
  push(initial.t, x);

  const long intervals = static_cast<long>(std::ceil((options.t_end - initial.t) / options.cadence - 1e-9));
  long next = 1;
  State probe(x.size());
  while (next <= intervals) {
    const auto [t0, t1] = stepper.do_step(rhs);
    ++out.steps;
    if (!std::isfinite(t1) || t1 <= t0) throw Error(ErrorCode::StepFailure, "step size underflow");
    if (out.steps > 50'000'000) throw Error(ErrorCode::StepFailure, "step budget exhausted");

    // Record cadence points inside this step, stopping at a collision.
    auto sample_until = [&](double t_stop) {
      while (next <= intervals) {
        const double t = std::min(options.t_end, initial.t + next * options.cadence);
        if (t > t_stop) break;
        stepper.calc_state(t, probe);
        push(t, probe);
        ++next;
      }
    };
    if (collided(stepper.current_state())) {
      // Bisect the dense output for the first crossing of the threshold.
      double lo = t0, hi = t1;
      for (int k = 0; k < 60; ++k) {
        const double mid = 0.5 * (lo + hi);
        stepper.calc_state(mid, probe);
        (collided(probe) ? hi : lo) = mid;
      }
      if (lo >= options.t_end) {
        sample_until(options.t_end);
        return out;
      }
      sample_until(lo);
      out.collided = true;
      out.collision_time = lo;
      stepper.calc_state(lo, probe);
      if (out.rows.back().t < lo) push(lo, probe);
      return out;
    }
    sample_until(t1);
  }
  return out;
}

}  // namespace hypmac
