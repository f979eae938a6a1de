#include "hypmac/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hypmac/error.hpp"
#include "hypmac/quadrature.hpp"

namespace hypmac {

namespace {

double horner(const std::vector<double>& c, double x) {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
  return acc;
}

std::vector<double> derivative(const std::vector<double>& c) {
  std::vector<double> d;
  for (std::size_t k = 1; k < c.size(); ++k) d.push_back(static_cast<double>(k) * c[k]);
  if (d.empty()) d.push_back(0.0);
  return d;
}

// Coefficients of y -> P(x0 + y).
std::vector<double> taylor_shift(std::vector<double> c, double x0) {
  const std::size_t n = c.size();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t k = n - 1; k > i; --k) c[k - 1] += x0 * c[k];
  }
  return c;
}

int sample_count() {
  return static_cast<int>(std::lround(2.0 * kValidationHalfWidth / kValidationSpacing));
}

double sample_point(int k) { return -kValidationHalfWidth + k * kValidationSpacing; }

}  // namespace

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::WellDepthMismatch: return "WellDepthMismatch";
    case ErrorCode::NonCriticalWell: return "NonCriticalWell";
    case ErrorCode::DegenerateWell: return "DegenerateWell";
    case ErrorCode::NegativePotential: return "NegativePotential";
    case ErrorCode::InvalidDamping: return "InvalidDamping";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::SingularQuadrature: return "SingularQuadrature";
    case ErrorCode::NoSolution: return "NoSolution";
    case ErrorCode::BracketFailure: return "BracketFailure";
    case ErrorCode::InadmissibleLayers: return "InadmissibleLayers";
    case ErrorCode::NoRoot: return "NoRoot";
    case ErrorCode::UnstableStep: return "UnstableStep";
    case ErrorCode::StepFailure: return "StepFailure";
    case ErrorCode::WindowMismatch: return "WindowMismatch";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::ConsistencyError: return "ConsistencyError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Potential Potential::quartic() {
  auto p = polynomial({0.25, 0.0, -0.5, 0.0, 0.25});
  p.label_ = "quartic";
  return p;
}

Potential Potential::polynomial(std::vector<double> ascending) {
  if (ascending.empty()) throw Error(ErrorCode::InvalidParameter, "empty coefficient list");
  Potential p;
  p.coefficients_ = std::move(ascending);
  p.first_coefficients_ = derivative(p.coefficients_);
  p.second_coefficients_ = derivative(p.first_coefficients_);
  for (int idx = 0; idx < 2; ++idx) {
    const double s = idx == 0 ? 1.0 : -1.0;
    auto shifted = taylor_shift(p.coefficients_, s);
    double sign = 1.0;
    for (auto& c : shifted) {
      c *= sign;
      sign *= -s;
    }
    // Validation pins F(s) and F'(s) to zero within 1e-12; the wells are taken as exact.
    shifted[0] = 0.0;
    if (shifted.size() > 1) shifted[1] = 0.0;
    p.shifted_[idx] = std::move(shifted);
  }
  std::ostringstream os;
  os << "polynomial[";
  for (std::size_t k = 0; k < p.coefficients_.size(); ++k) os << (k ? "," : "") << p.coefficients_[k];
  os << "]";
  p.label_ = os.str();
  return p;
}

Potential Potential::custom(Fn value, Fn first, Fn second, std::string label) {
  Potential p;
  p.value_ = std::move(value);
  p.first_ = std::move(first);
  p.second_ = std::move(second);
  p.label_ = std::move(label);
  return p;
}

double Potential::value(double u) const {
  return is_polynomial() ? horner(coefficients_, u) : value_(u);
}

double Potential::first(double u) const {
  return is_polynomial() ? horner(first_coefficients_, u) : first_(u);
}

double Potential::second(double u) const {
  return is_polynomial() ? horner(second_coefficients_, u) : second_(u);
}

double Potential::well_value(int s, double delta) const {
  if (!is_polynomial()) return value_(s * (1.0 - delta));
  return horner(shifted(s), delta);
}

namespace {

// P(x) - P(y) = (x - y) * sum_k c_k * sum_{i<k} x^i y^{k-1-i}
double divided_difference(const std::vector<double>& c, double x, double y, double x_minus_y) {
  double partial = 1.0;  // sum_{i<k} x^i y^{k-1-i} for k = 1
  double y_pow = y;      // y^k
  double acc = 0.0;
  for (std::size_t k = 1; k < c.size(); ++k) {
    acc += c[k] * partial;
    partial = x * partial + y_pow;
    y_pow *= y;
  }
  return x_minus_y * acc;
}

}  // namespace

double Potential::well_difference(int s, double a, double b, double a_minus_b) const {
  if (!is_polynomial()) return value_(s * (1.0 - a)) - value_(s * (1.0 - b));
  // Expand about whichever of the well and the origin is closer to both points.
  if (std::min(a, b) > 0.5) {
    // 1 - b is exact here; 1 - a is rebuilt from the accurate difference.
    const double y = 1.0 - b;
    return divided_difference(coefficients_, s * (y - a_minus_b), s * y, -s * a_minus_b);
  }
  return divided_difference(shifted(s), a, b, a_minus_b);
}

double Potential::well_quotient(int s, double delta) const {
  if (!is_polynomial()) return value_(s * (1.0 - delta)) / (delta * delta);
  const auto& c = shifted(s);
  double acc = 0.0;
  for (std::size_t k = c.size(); k-- > 2;) acc = acc * delta + c[k];
  return acc;
}

double Potential::well_quotient_tail(int s, double delta) const {
  if (!is_polynomial()) return (well_quotient(s, delta) - 0.5 * second(s)) / delta;
  const auto& c = shifted(s);
  double acc = 0.0;
  for (std::size_t k = c.size(); k-- > 3;) acc = acc * delta + c[k];
  return acc;
}

bool Potential::is_even() const {
  if (is_polynomial()) {
    for (std::size_t k = 1; k < coefficients_.size(); k += 2) {
      if (coefficients_[k] != 0.0) return false;
    }
    return true;
  }
  for (int k = 0; k <= sample_count(); ++k) {
    const double u = sample_point(k);
    const double scale = std::max(1.0, std::abs(value(u)));
    if (std::abs(value(u) - value(-u)) > 1e-14 * scale) return false;
  }
  return true;
}

Potential validate_potential(Potential candidate) {
  constexpr double tol = 1e-12;
  for (const double s : {-1.0, 1.0}) {
    if (std::abs(candidate.value(s)) > tol) {
      throw Error(ErrorCode::WellDepthMismatch,
                  "F(" + std::to_string(s) + ") = " + std::to_string(candidate.value(s)));
    }
  }
  for (const double s : {-1.0, 1.0}) {
    if (std::abs(candidate.first(s)) > tol) {
      throw Error(ErrorCode::NonCriticalWell,
                  "F'(" + std::to_string(s) + ") = " + std::to_string(candidate.first(s)));
    }
  }
  for (const double s : {-1.0, 1.0}) {
    if (!(candidate.second(s) > 0.0)) {
      throw Error(ErrorCode::DegenerateWell,
                  "F''(" + std::to_string(s) + ") = " + std::to_string(candidate.second(s)));
    }
  }
  for (int k = 0; k <= sample_count(); ++k) {
    const double u = sample_point(k);
    if (std::abs(u - 1.0) <= 1e-6 || std::abs(u + 1.0) <= 1e-6) continue;
    if (!(candidate.value(u) > 0.0)) {
      throw Error(ErrorCode::NegativePotential, "F(" + std::to_string(u) + ") = " +
                                                    std::to_string(candidate.value(u)));
    }
  }
  return candidate;
}

Damping Damping::one() { return Damping{}; }

Damping Damping::constant(double c) {
  Damping d;
  d.kind_ = Kind::Constant;
  d.parameter_ = c;
  d.label_ = "constant";
  return d;
}

Damping Damping::relaxation(double tau, const Potential& potential) {
  Damping d;
  d.kind_ = Kind::Relaxation;
  d.parameter_ = tau;
  d.potential_ = std::make_shared<const Potential>(potential);
  d.label_ = "relaxation";
  return d;
}

Damping Damping::custom(Potential::Fn g, std::string label) {
  Damping d;
  d.kind_ = Kind::Custom;
  d.custom_ = std::move(g);
  d.label_ = std::move(label);
  return d;
}

double Damping::operator()(double u) const {
  switch (kind_) {
    case Kind::One: return 1.0;
    case Kind::Constant: return parameter_;
    case Kind::Relaxation: return 1.0 + parameter_ * potential_->second(u);
    case Kind::Custom: return custom_(u);
  }
  return 1.0;
}

double max_reaction_slope(const Potential& potential) {
  double m = -std::numeric_limits<double>::infinity();
  for (int k = 0; k <= sample_count(); ++k) m = std::max(m, potential.reaction_slope(sample_point(k)));
  return m;
}

double max_abs_reaction_slope(const Potential& potential) {
  double m = 0.0;
  for (int k = 0; k <= sample_count(); ++k) {
    m = std::max(m, std::abs(potential.reaction_slope(sample_point(k))));
  }
  return m;
}

Damping validate_damping(Damping candidate, const Potential& potential) {
  if (candidate.kind_ == Damping::Kind::Relaxation) {
    const double tau = candidate.parameter_;
    const double fmax = max_reaction_slope(potential);
    if (!(tau > 0.0) || (fmax > 0.0 && !(tau < 1.0 / fmax))) {
      throw Error(ErrorCode::InvalidDamping, "relaxation damping needs 0 < tau < 1/max f' = " +
                                                 std::to_string(1.0 / fmax) +
                                                 ", got tau = " + std::to_string(tau));
    }
  }
  double sigma = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= sample_count(); ++k) sigma = std::min(sigma, candidate(sample_point(k)));
  if (!(sigma > 0.0)) {
    throw Error(ErrorCode::InvalidDamping,
                "damping is not strictly positive: min g = " + std::to_string(sigma));
  }
  candidate.sigma_ = sigma;
  return candidate;
}

double transition_energy(const Potential& potential) {
  // On each half, u = s(1 - delta) and sqrt(2F) = delta * sqrt(2 F/delta^2), analytic in delta.
  double total = 0.0;
  for (const int s : {1, -1}) {
    auto integrand = [&](double delta) {
      return delta * std::sqrt(2.0 * potential.well_quotient(s, delta));
    };
    total += quad::composite_gauss(integrand, 0.0, 1.0, 1e-13).value;
  }
  return total;
}

WaveConstants wave_constants(const Potential& potential) {
  WaveConstants out;
  for (const int s : {1, -1}) {
    const double a = std::sqrt(potential.second(s));
    // A/sqrt(2F) - 1/delta = (A^2 - 2q)/(delta sqrt(2q) (A + sqrt(2q))) with q = F/delta^2
    // and A^2 - 2q = -2 delta * tail; the 1/delta cancels analytically.
    auto integrand = [&](double delta) {
      const double root = std::sqrt(2.0 * potential.well_quotient(s, delta));
      return -2.0 * potential.well_quotient_tail(s, delta) / (root * (a + root));
    };
    const double integral =
        quad::composite_gauss(integrand, 0.0, 1.0, 1e-12, 0.0, 2, 1 << 14,
                              ErrorCode::QuadratureFailure)
            .value;
    const double k = 2.0 * std::exp(integral);
    if (s > 0) {
      out.a_plus = a;
      out.k_plus = k;
    } else {
      out.a_minus = a;
      out.k_minus = k;
    }
  }
  return out;
}

double damping_average(const Potential& potential, const Damping& damping) {
  double weighted = 0.0;
  double plain = 0.0;
  for (const int s : {1, -1}) {
    auto root_f = [&](double delta) { return delta * std::sqrt(potential.well_quotient(s, delta)); };
    auto with_g = [&](double delta) { return root_f(delta) * damping(s * (1.0 - delta)); };
    weighted += quad::composite_gauss(with_g, 0.0, 1.0, 1e-13).value;
    plain += quad::composite_gauss(root_f, 0.0, 1.0, 1e-13).value;
  }
  return weighted / plain;
}

}  // namespace hypmac
