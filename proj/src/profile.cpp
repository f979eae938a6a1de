#include "hypmac/profile.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "hypmac/error.hpp"
#include "hypmac/quadrature.hpp"

namespace hypmac {

namespace {

// The integrand is even and smooth in theta; below this fraction of theta_max it is frozen.
constexpr double kThetaFloor = 1e-6;
// Deviation used to approximate the vanishing-plateau limit.
constexpr double kNearZeroPlateau = 1e-10;
// Relative distance kept from a deviation cap below 1.
constexpr double kCapMargin = 1e-3;

double orbit_integrand(const Potential& p, int s, double beta, double theta) {
  theta = std::max(theta, kThetaFloor * std::min(1.0, std::acosh(1.0 / beta)));
  const double a = beta * std::cosh(theta);
  const double sh = std::sinh(0.5 * theta);
  const double gap = p.well_difference(s, a, beta, 2.0 * beta * sh * sh);
  if (!(gap > 0.0)) {
    throw Error(ErrorCode::NoSolution,
                "F does not exceed F(phi(0)) along the orbit (beta = " + std::to_string(beta) + ")");
  }
  return beta * std::sinh(theta) / std::sqrt(2.0 * gap);
}

struct OrbitQuadrature {
  double theta_max = 0.0;
  int panels = 0;
  double half_length = 0.0;
};

OrbitQuadrature integrate_orbit(const Potential& p, double eps, int s, double beta) {
  if (!(beta > 0.0 && beta < 1.0)) {
    throw Error(ErrorCode::InvalidParameter,
                "plateau deviation must lie in (0, 1), got " + std::to_string(beta));
  }
  OrbitQuadrature out;
  out.theta_max = std::acosh(1.0 / beta);
  const int start = std::max(2, static_cast<int>(std::ceil(out.theta_max)));
  auto w = [&](double theta) { return orbit_integrand(p, s, beta, theta); };
  const auto r = quad::composite_gauss(w, 0.0, out.theta_max, 0.0, 1e-13, start, 1 << 12,
                                       ErrorCode::SingularQuadrature);
  out.panels = r.panels;
  out.half_length = eps * r.value;
  return out;
}

// Largest plateau deviation for which F(phi) > F(phi(0)) on the whole orbit. It is 1 when F
// decreases monotonically from 0 into the well, and smaller when F(0) is not the barrier top.
double deviation_cap(const Potential& p, int s) {
  constexpr int kSamples = 4000;
  auto phi = [s](double d) { return s * d / kSamples; };
  double running_min = p.value(0.0);
  double level = running_min;
  int last_bad = -1;
  for (int k = 1; k < kSamples; ++k) {
    const double f = p.value(phi(k));
    if (!(f < running_min)) last_bad = k;
    running_min = std::min(running_min, f);
    if (k == last_bad) level = running_min;
  }
  if (last_bad < 0) return 1.0 - kNearZeroPlateau;
  // F - level is >= 0 at the last bad sample and < 0 one sample further into the well.
  double lo = last_bad, hi = last_bad + 1;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (p.value(phi(mid)) - level >= 0.0 ? lo : hi) = mid;
  }
  // The orbit integrand has an inverse square root peak at the cap; stay clear of it.
  return (1.0 - hi / kSamples) * (1.0 - kCapMargin);
}

int require_sign(int s) {
  if (s != 1 && s != -1) throw Error(ErrorCode::InvalidParameter, "branch sign must be +1 or -1");
  return s;
}

}  // namespace

double half_period_from_deviation(double beta, const Potential& potential, double eps, int s) {
  require_sign(s);
  return integrate_orbit(potential, eps, s, beta).half_length;
}

double half_period(double plateau, const Potential& potential, double eps, int s) {
  require_sign(s);
  return half_period_from_deviation(1.0 - s * plateau, potential, eps, s);
}

double minimal_half_period(const Potential& potential, double eps, int s) {
  return half_period_from_deviation(deviation_cap(potential, require_sign(s)), potential,
                                    eps, s);
}

StandingWave solve_standing_wave(double length, double eps, int s, const Potential& potential) {
  require_sign(s);
  if (!(eps > 0.0) || !(length > 0.0)) {
    throw Error(ErrorCode::InvalidParameter, "need eps > 0 and l > 0");
  }
  const double target = 0.5 * length;
  const double shortest = minimal_half_period(potential, eps, s);
  if (!(target > shortest)) {
    throw Error(ErrorCode::NoSolution, "half-length " + std::to_string(target) +
                                           " does not exceed the minimal half-period " +
                                           std::to_string(shortest));
  }

  // Root in t = ln(beta); the half-length decreases as beta grows.
  auto residual = [&](double t) {
    return half_period_from_deviation(std::exp(t), potential, eps, s) - target;
  };
  const double t_hi = std::log(deviation_cap(potential, s));
  const double f_hi = residual(t_hi);
  const double a = std::sqrt(std::max(potential.second(s), 1e-300));
  double t_lo = std::min(-a * length / (2.0 * eps), t_hi - 1.0);
  double f_lo = residual(t_lo);
  while (f_lo <= 0.0) {
    t_lo -= 2.0;
    if (t_lo < std::log(1e-300)) {
      throw Error(ErrorCode::BracketFailure, "no plateau bracket for l = " + std::to_string(length));
    }
    f_lo = residual(t_lo);
  }
  if (f_hi > 0.0) throw Error(ErrorCode::BracketFailure, "upper bracket has the wrong sign");

  std::uintmax_t iterations = 200;
  const auto tol = boost::math::tools::eps_tolerance<double>(50);
  const auto [lo, hi] =
      boost::math::tools::toms748_solve(residual, t_lo, t_hi, f_lo, f_hi, tol, iterations);
  const double t = 0.5 * (lo + hi);

  StandingWave wave;
  wave.length_ = length;
  wave.epsilon_ = eps;
  wave.sign_ = s;
  wave.deviation_ = std::exp(t);
  wave.potential_ = std::make_shared<const Potential>(potential);

  const auto orbit = integrate_orbit(potential, eps, s, wave.deviation_);
  wave.theta_max_ = orbit.theta_max;
  wave.panel_edges_.resize(orbit.panels + 1);
  wave.cumulative_.resize(orbit.panels + 1);
  const double h = orbit.theta_max / orbit.panels;
  double acc = 0.0;
  auto w = [&wave](double theta) { return wave.integrand(theta); };
  for (int k = 0; k <= orbit.panels; ++k) {
    wave.panel_edges_[k] = k * h;
    if (k > 0) acc += eps * quad::gauss_panel(w, (k - 1) * h, k * h);
    wave.cumulative_[k] = acc;
  }
  wave.panel_edges_.back() = orbit.theta_max;
  wave.scale_ = target / acc;
  return wave;
}

double StandingWave::alpha() const { return potential_->well_value(sign_, deviation_); }

double StandingWave::integrand(double theta) const {
  return orbit_integrand(*potential_, sign_, deviation_, theta);
}

double StandingWave::position(double theta) const {
  const auto it = std::upper_bound(panel_edges_.begin(), panel_edges_.end(), theta);
  const std::size_t k = std::min<std::size_t>(
      std::max<std::ptrdiff_t>(it - panel_edges_.begin() - 1, 0), panel_edges_.size() - 2);
  auto w = [this](double t) { return integrand(t); };
  return scale_ * (cumulative_[k] + epsilon_ * quad::gauss_panel(w, panel_edges_[k], theta));
}

double StandingWave::theta_at(double distance) const {
  const double x = distance / scale_;
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), x);
  const std::size_t k = std::min<std::size_t>(
      std::max<std::ptrdiff_t>(it - cumulative_.begin() - 1, 0), cumulative_.size() - 2);
  double lo = panel_edges_[k];
  double hi = panel_edges_[k + 1];
  const double span = cumulative_[k + 1] - cumulative_[k];
  double theta = lo + (hi - lo) * std::clamp((x - cumulative_[k]) / span, 0.0, 1.0);
  for (int iter = 0; iter < 60; ++iter) {
    const double g = position(theta) - distance;
    if (g > 0.0) hi = theta; else lo = theta;
    double next = theta - g / (scale_ * epsilon_ * integrand(theta));
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - theta);
    theta = next;
    if (step <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, theta)) break;
  }
  return theta;
}

double StandingWave::continued_value(double overshoot) const {
  // Past the zero the orbit enters the opposite sign: y(psi) = eps * int_0^psi 1/sqrt(2(F(-s q) - alpha)).
  const Potential& p = *potential_;
  const double a = alpha();
  auto speed = [&](double psi) {
    const double gap = p.value(-sign_ * psi) - a;
    if (!(gap > 0.0)) {
      throw Error(ErrorCode::NoSolution, "continuation beyond the turning point of the orbit");
    }
    return std::sqrt(2.0 * gap);
  };
  auto distance = [&](double psi) {
    auto inv = [&](double q) { return 1.0 / speed(q); };
    return epsilon_ * (quad::gauss_panel(inv, 0.0, 0.5 * psi) + quad::gauss_panel(inv, 0.5 * psi, psi));
  };
  double psi = overshoot * speed(0.0) / epsilon_;
  for (int iter = 0; iter < 60; ++iter) {
    const double g = distance(psi) - overshoot;
    const double step = g * speed(psi) / epsilon_;
    psi -= step;
    if (psi < 0.0) psi = 0.0;
    if (std::abs(step) <= 1e-15 * std::max(1.0, psi)) break;
  }
  return -sign_ * psi;
}

double StandingWave::value(double x) const {
  const double d = std::abs(x);
  const double half = 0.5 * length_;
  if (d > half) return continued_value(d - half);
  const double theta = theta_at(d);
  return sign_ * (1.0 - deviation_ * std::cosh(theta));
}

double StandingWave::slope(double x) const {
  const double d = std::abs(x);
  const double direction = x >= 0.0 ? 1.0 : -1.0;
  const double half = 0.5 * length_;
  if (d > half) {
    const double psi = std::abs(continued_value(d - half));
    const double gap = potential_->value(-sign_ * psi) - alpha();
    return direction * (-sign_) * std::sqrt(2.0 * gap) / epsilon_;
  }
  const double theta = std::max(theta_at(d), kThetaFloor);
  const double sh = std::sinh(0.5 * theta);
  const double gap = potential_->well_difference(sign_, deviation_ * std::cosh(theta), deviation_,
                                                 2.0 * deviation_ * sh * sh);
  return -direction * sign_ * std::sqrt(2.0 * gap) / (scale_ * epsilon_);
}

double asymptotic_alpha(double r, double a, double k) {
  return 0.5 * k * k * a * a * std::exp(-a / r);
}

double asymptotic_beta(double r, double a, double k) { return k * std::exp(-a / (2.0 * r)); }

AlphaBeta alpha_beta(double length, double eps, int s, const Potential& potential, AlphaMode mode,
                     double r0) {
  require_sign(s);
  AlphaBeta out;
  out.r = eps / length;
  if (mode == AlphaMode::Exact) {
    const auto wave = solve_standing_wave(length, eps, s, potential);
    out.alpha = wave.alpha();
    out.beta = wave.deviation();
    out.exact = true;
    return out;
  }
  if (!(out.r < r0)) {
    throw Error(ErrorCode::InvalidParameter, "asymptotic alpha/beta need r = eps/l < r0 = " +
                                                 std::to_string(r0) + ", got " +
                                                 std::to_string(out.r));
  }
  const auto c = wave_constants(potential);
  out.alpha = asymptotic_alpha(out.r, c.a(s), c.k(s));
  out.beta = asymptotic_beta(out.r, c.a(s), c.k(s));
  out.exact = false;
  return out;
}

LayerVector::LayerVector(std::vector<double> positions) : h_(std::move(positions)) {
  if (h_.empty()) throw Error(ErrorCode::InadmissibleLayers, "at least one layer is required");
  for (std::size_t i = 0; i < h_.size(); ++i) {
    const bool inside = h_[i] > 0.0 && h_[i] < 1.0;
    const bool ordered = i == 0 || h_[i] > h_[i - 1];
    if (!inside || !ordered) {
      throw Error(ErrorCode::InadmissibleLayers,
                  "layers must be strictly increasing inside (0, 1); h_" + std::to_string(i + 1) +
                      " = " + std::to_string(h_[i]));
    }
  }
}

std::vector<double> LayerVector::gaps() const {
  std::vector<double> l;
  l.reserve(h_.size() + 1);
  l.push_back(2.0 * h_.front());
  for (std::size_t i = 1; i < h_.size(); ++i) l.push_back(h_[i] - h_[i - 1]);
  l.push_back(2.0 * (1.0 - h_.back()));
  return l;
}

double LayerVector::min_gap() const {
  const auto l = gaps();
  return *std::min_element(l.begin(), l.end());
}

bool LayerVector::admissible(double threshold) const { return min_gap() > threshold; }

std::vector<double> gap_alphas(const LayerVector& h, double eps, const Potential& potential,
                               AlphaMode mode) {
  if (mode == AlphaMode::Asymptotic) {
    return gap_alphas_asymptotic(h, eps, wave_constants(potential));
  }
  const auto l = h.gaps();
  std::vector<double> alphas(l.size());
  for (std::size_t j = 1; j <= l.size(); ++j) {
    alphas[j - 1] = solve_standing_wave(l[j - 1], eps, gap_sign(static_cast<int>(j)), potential).alpha();
  }
  return alphas;
}

std::vector<double> gap_alphas_asymptotic(const LayerVector& h, double eps,
                                          const WaveConstants& constants) {
  const auto l = h.gaps();
  std::vector<double> alphas(l.size());
  for (std::size_t j = 1; j <= l.size(); ++j) {
    const int s = gap_sign(static_cast<int>(j));
    alphas[j - 1] = asymptotic_alpha(eps / l[j - 1], constants.a(s), constants.k(s));
  }
  return alphas;
}

double cutoff(double y) {
  if (y <= -1.0) return 0.0;
  if (y >= 1.0) return 1.0;
  const double t = 0.5 * (y + 1.0);
  return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

double cutoff_derivative(double y) {
  if (y <= -1.0 || y >= 1.0) return 0.0;
  const double t = 0.5 * (y + 1.0);
  return 15.0 * t * t * (1.0 - t) * (1.0 - t);
}

std::vector<double> MetastableProfile::nodes() const {
  const int n = cells();
  std::vector<double> x(n + 1);
  for (int i = 0; i <= n; ++i) x[i] = static_cast<double>(i) / n;
  return x;
}

double MetastableProfile::mass() const { return trapezoid_mass(samples_); }

std::size_t MetastableProfile::interval_of(double x) const {
  // I_j = [h_{j-1/2}, h_{j+1/2}] for j = 1..N+1; centers_[j-1] = h_{j-1/2}.
  std::size_t j = 1;
  while (j < layers_.size() && x > centers_[j]) ++j;
  return j;
}

double MetastableProfile::derivative(double x) const {
  const std::size_t j = interval_of(x);
  const double y = (x - layers_[j - 1]) / epsilon_;
  const double chi = cutoff(y);
  const double dchi = cutoff_derivative(y) / epsilon_;
  double du = 0.0;
  if (chi < 1.0) du += (1.0 - chi) * waves_[j - 1].slope(x - centers_[j - 1]);
  if (chi > 0.0) du += chi * waves_[j].slope(x - centers_[j]);
  if (dchi != 0.0) {
    du += dchi * (waves_[j].value(x - centers_[j]) - waves_[j - 1].value(x - centers_[j - 1]));
  }
  return du;
}

double MetastableProfile::value(double x) const {
  const std::size_t j = interval_of(x);
  const double hj = layers_[j - 1];
  const double chi = cutoff((x - hj) / epsilon_);
  double u = 0.0;
  if (chi < 1.0) u += (1.0 - chi) * waves_[j - 1].value(x - centers_[j - 1]);
  if (chi > 0.0) u += chi * waves_[j].value(x - centers_[j]);
  return u;
}

MetastableProfile build_profile(const LayerVector& h, double eps, const Potential& potential, int n,
                                const ProfileOptions& options) {
  if (n < 8) throw Error(ErrorCode::InvalidParameter, "profile grid needs n >= 8");
  if (!h.admissible(options.gap_factor * eps)) {
    throw Error(ErrorCode::InadmissibleLayers,
                "minimal gap " + std::to_string(h.min_gap()) + " does not exceed " +
                    std::to_string(options.gap_factor * eps));
  }
  MetastableProfile out;
  out.layers_ = h;
  out.epsilon_ = eps;
  const auto l = h.gaps();
  std::vector<double> ext;
  ext.push_back(h.ghost_left());
  for (double v : h.positions()) ext.push_back(v);
  ext.push_back(h.ghost_right());
  for (std::size_t j = 1; j <= l.size(); ++j) {
    out.centers_.push_back(0.5 * (ext[j - 1] + ext[j]));
    const int s = gap_sign(static_cast<int>(j));
    // Gaps of equal length and sign share a wave.
    const StandingWave* reuse = nullptr;
    for (std::size_t k = 0; k + 1 < j; ++k) {
      if (l[k] == l[j - 1] && out.waves_[k].sign() == s) reuse = &out.waves_[k];
    }
    out.waves_.push_back(reuse ? *reuse : solve_standing_wave(l[j - 1], eps, s, potential));
    const auto& wave = out.waves_.back();
    out.gaps_.push_back({l[j - 1], s, wave.alpha(), wave.deviation()});
  }
  out.centers_.front() = 0.0;
  out.centers_.back() = 1.0;

  out.samples_.resize(n + 1);
  for (int i = 0; i <= n; ++i) out.samples_[i] = out.value(static_cast<double>(i) / n);

  if (options.barrier_mode == AlphaMode::Exact) {
    std::vector<double> alphas;
    for (const auto& g : out.gaps_) alphas.push_back(g.alpha);
    out.barrier_ = barrier_psi(alphas);
  } else {
    out.barrier_ = barrier_psi(gap_alphas_asymptotic(h, eps, wave_constants(potential)));
  }
  return out;
}

double barrier_psi(std::span<const double> alphas) {
  double psi = 0.0;
  for (std::size_t j = 0; j + 1 < alphas.size(); ++j) {
    const double d = alphas[j + 1] - alphas[j];
    psi += d * d;
  }
  return psi;
}

double barrier_psi(const LayerVector& h, double eps, const Potential& potential, AlphaMode mode) {
  return barrier_psi(gap_alphas(h, eps, potential, mode));
}

double trapezoid_mass(std::span<const double> u) {
  if (u.size() < 2) throw Error(ErrorCode::InvalidParameter, "need at least two samples");
  const double dx = 1.0 / static_cast<double>(u.size() - 1);
  double sum = 0.5 * (u.front() + u.back());
  for (std::size_t i = 1; i + 1 < u.size(); ++i) sum += u[i];
  return sum * dx;
}

double profile_mass(const MetastableProfile& profile) { return profile.mass(); }

LayerVector solve_mass_constraint(std::span<const double> xi, double mass, double eps,
                                  const Potential& potential, int n, const ProfileOptions& options) {
  const double threshold = options.gap_factor * eps;
  const double slack = 1.0 + 1e-9;
  const double z_lo = xi.empty() ? 0.5 * threshold * slack : xi.back() + threshold * slack;
  const double z_hi = 1.0 - 0.5 * threshold * slack;
  if (!(z_lo < z_hi)) {
    throw Error(ErrorCode::InadmissibleLayers, "no admissible room for the last layer");
  }
  auto layers_for = [&](double z) {
    std::vector<double> h(xi.begin(), xi.end());
    h.push_back(z);
    return LayerVector(std::move(h));
  };
  auto residual = [&](double z) {
    return build_profile(layers_for(z), eps, potential, n, options).mass() - mass;
  };
  const double f_lo = residual(z_lo);
  const double f_hi = residual(z_hi);
  if (f_lo == 0.0) return layers_for(z_lo);
  if (f_hi == 0.0) return layers_for(z_hi);
  if ((f_lo > 0.0) == (f_hi > 0.0)) {
    throw Error(ErrorCode::NoRoot, "mass " + std::to_string(mass) +
                                       " is not reachable; admissible range gives [" +
                                       std::to_string(std::min(f_lo, f_hi) + mass) + ", " +
                                       std::to_string(std::max(f_lo, f_hi) + mass) + "]");
  }
  std::uintmax_t iterations = 100;
  auto tol = [&](double a, double b) { return std::abs(b - a) < 1e-13; };
  const auto [lo, hi] =
      boost::math::tools::toms748_solve(residual, z_lo, z_hi, f_lo, f_hi, tol, iterations);
  const double z = 0.5 * (lo + hi);
  auto result = layers_for(z);
  if (std::abs(residual(z)) > 1e-8) {
    throw Error(ErrorCode::NoRoot, "mass constraint did not converge");
  }
  return result;
}

double renormalized_energy(std::span<const double> u, std::span<const double> v, double eps,
                           double tau, const Potential& potential, GradientStencil stencil) {
  const std::size_t size = u.size();
  if (size < 5) throw Error(ErrorCode::InvalidParameter, "need at least five grid samples");
  if (!v.empty() && v.size() != size) {
    throw Error(ErrorCode::InvalidParameter, "u and v must share the grid");
  }
  const int n = static_cast<int>(size) - 1;
  const double dx = 1.0 / n;
  auto at = [&](int i) {
    // Even reflection about both endpoints.
    if (i < 0) i = -i;
    if (i > n) i = 2 * n - i;
    return u[i];
  };
  auto weight = [&](int i) { return (i == 0 || i == n) ? 0.5 * dx : dx; };

  double total = 0.0;
  for (int i = 0; i <= n; ++i) {
    double density = potential.value(u[i]) / eps;
    if (!v.empty()) density += tau / (2.0 * eps) * v[i] * v[i];
    if (stencil == GradientStencil::FourthOrder) {
      const double ux = (-at(i + 2) + 8.0 * at(i + 1) - 8.0 * at(i - 1) + at(i - 2)) / (12.0 * dx);
      density += 0.5 * eps * ux * ux;
    }
    total += weight(i) * density;
  }
  if (stencil == GradientStencil::Compact) {
    for (int i = 0; i < n; ++i) {
      const double ux = (u[i + 1] - u[i]) / dx;
      total += dx * 0.5 * eps * ux * ux;
    }
  }
  return total;
}

}  // namespace hypmac
