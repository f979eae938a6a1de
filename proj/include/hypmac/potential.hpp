#pragma once

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace hypmac {

/// Balanced double-well potential F with wells at u = -1 and u = +1.
///
/// Polynomial potentials are also stored as Taylor expansions about each well, so that
/// F(s(1 - delta)) and differences of it stay accurate when delta is exponentially small.
/// Custom closures fall back to direct evaluation.
class Potential {
 public:
  using Fn = std::function<double(double)>;

  /// F(u) = (u^2 - 1)^2 / 4.
  static Potential quartic();
  /// Ascending coefficients c_0 + c_1 u + c_2 u^2 + ...
  static Potential polynomial(std::vector<double> ascending);
  static Potential custom(Fn value, Fn first, Fn second, std::string label = "custom");

  double value(double u) const;
  double first(double u) const;
  double second(double u) const;
  /// f = -F'
  double reaction(double u) const { return -first(u); }
  /// f' = -F''
  double reaction_slope(double u) const { return -second(u); }

  /// F(s(1 - delta)) for s = +1 or -1.
  double well_value(int s, double delta) const;
  /// F(s(1 - a)) - F(s(1 - b)); `a_minus_b` must be supplied exactly by the caller.
  double well_difference(int s, double a, double b, double a_minus_b) const;
  /// F(s(1 - delta)) / delta^2, finite as delta -> 0.
  double well_quotient(int s, double delta) const;
  /// (well_quotient(delta) - F''(s)/2) / delta, finite as delta -> 0.
  double well_quotient_tail(int s, double delta) const;

  bool is_polynomial() const { return !coefficients_.empty(); }
  const std::vector<double>& coefficients() const { return coefficients_; }
  const std::string& label() const { return label_; }
  /// F(u) == F(-u) on the validation grid.
  bool is_even() const;

 private:
  Potential() = default;
  const std::vector<double>& shifted(int s) const { return s > 0 ? shifted_[0] : shifted_[1]; }

  std::vector<double> coefficients_;
  std::vector<double> first_coefficients_;
  std::vector<double> second_coefficients_;
  // Taylor coefficients of delta -> F(s(1 - delta)); [0] for s = +1, [1] for s = -1.
  std::array<std::vector<double>, 2> shifted_;
  Fn value_;
  Fn first_;
  Fn second_;
  std::string label_;
};

/// Checks the balanced double-well assumptions on the validation window [-1.5, 1.5].
/// Throws Error with WellDepthMismatch, NonCriticalWell, DegenerateWell or NegativePotential.
Potential validate_potential(Potential candidate);

/// Damping coefficient g(u) of the hyperbolic models.
class Damping {
 public:
  enum class Kind { One, Constant, Relaxation, Custom };

  static Damping one();
  static Damping constant(double c);
  /// g(u) = 1 - tau f'(u) = 1 + tau F''(u).
  static Damping relaxation(double tau, const Potential& potential);
  static Damping custom(Potential::Fn g, std::string label = "custom");

  double operator()(double u) const;

  Kind kind() const { return kind_; }
  /// The constant for Kind::Constant, the relaxation time for Kind::Relaxation.
  double parameter() const { return parameter_; }
  /// Lower bound sigma found during validation (0 before validation).
  double lower_bound() const { return sigma_; }
  const std::string& label() const { return label_; }

 private:
  friend Damping validate_damping(Damping, const Potential&);
  Damping() = default;

  Kind kind_ = Kind::One;
  double parameter_ = 1.0;
  double sigma_ = 0.0;
  std::shared_ptr<const Potential> potential_;
  Potential::Fn custom_;
  std::string label_ = "one";
};

/// Samples g on [-1.5, 1.5] and records its minimum as sigma; throws InvalidDamping
/// when g is not bounded below by a positive constant or the relaxation time is too large.
Damping validate_damping(Damping candidate, const Potential& potential);

/// Largest value of f' = -F'' on the validation window.
double max_reaction_slope(const Potential& potential);
/// Largest |f'| on the validation window.
double max_abs_reaction_slope(const Potential& potential);

/// c_F = integral over [-1, 1] of sqrt(2F).
double transition_energy(const Potential& potential);

struct WaveConstants {
  double a_plus = 0.0;   // sqrt(F''(+1))
  double a_minus = 0.0;  // sqrt(F''(-1))
  double k_plus = 0.0;
  double k_minus = 0.0;

  double a(int s) const { return s > 0 ? a_plus : a_minus; }
  double k(int s) const { return s > 0 ? k_plus : k_minus; }
};

WaveConstants wave_constants(const Potential& potential);

/// gamma_{F,g}: the sqrt(F)-weighted average of g over [-1, 1].
double damping_average(const Potential& potential, const Damping& damping);

/// Validation window and sampling used by both validators.
inline constexpr double kValidationHalfWidth = 1.5;
inline constexpr double kValidationSpacing = 1e-3;

}  // namespace hypmac
