#pragma once

#include <memory>
#include <span>
#include <vector>

#include "hypmac/potential.hpp"

namespace hypmac {

/// Default validity threshold on r = eps/l for the asymptotic alpha/beta formulas.
inline constexpr double kDefaultAsymptoticR0 = 0.1;
/// Default admissibility threshold: every gap must exceed kDefaultGapFactor * eps.
inline constexpr double kDefaultGapFactor = 4.0;

/// Sign-definite solution of eps^2 phi'' + f(phi) = 0 on [-l/2, l/2] vanishing at both ends.
///
/// The wave is parametrised by theta with phi = s (1 - beta cosh theta), which turns the
/// quadrature for x(theta) into an analytic integrand. Evaluation outside [-l/2, l/2]
/// follows the same orbit through the zero into the opposite sign.
class StandingWave {
 public:
  double length() const { return length_; }
  double epsilon() const { return epsilon_; }
  int sign() const { return sign_; }
  /// phi(0)
  double plateau() const { return sign_ * (1.0 - deviation_); }
  /// beta = 1 - s phi(0)
  double deviation() const { return deviation_; }
  /// alpha = F(phi(0))
  double alpha() const;

  double value(double x) const;
  double slope(double x) const;

 private:
  friend StandingWave solve_standing_wave(double, double, int, const Potential&);
  StandingWave() = default;

  double integrand(double theta) const;
  double position(double theta) const;
  double theta_at(double distance) const;
  double continued_value(double overshoot) const;

  double length_ = 0.0;
  double epsilon_ = 0.0;
  int sign_ = 1;
  double deviation_ = 1.0;
  double theta_max_ = 0.0;
  double scale_ = 1.0;
  std::vector<double> panel_edges_;
  std::vector<double> cumulative_;
  std::shared_ptr<const Potential> potential_;
};

/// Half-length l/2 of the standing wave on branch s whose extremum is `plateau`.
double half_period(double plateau, const Potential& potential, double eps, int s);
/// Same, parametrised by the deviation beta = 1 - s * plateau (precise when beta is tiny).
double half_period_from_deviation(double beta, const Potential& potential, double eps, int s);
/// Half-length in the limit of a vanishing plateau; pi eps / (2 sqrt(f'(0))) when f'(0) > 0.
double minimal_half_period(const Potential& potential, double eps, int s);

/// Throws NoSolution when l is too short for a wave to exist, BracketFailure if no bracket
/// for the plateau can be found.
StandingWave solve_standing_wave(double length, double eps, int s, const Potential& potential);

enum class AlphaMode { Exact, Asymptotic };

struct AlphaBeta {
  double r = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  bool exact = true;
};

/// alpha = F(phi(0)), beta = 1 - s phi(0) for the wave on an interval of length l.
/// Asymptotic mode needs eps/l < r0.
AlphaBeta alpha_beta(double length, double eps, int s, const Potential& potential, AlphaMode mode,
                     double r0 = kDefaultAsymptoticR0);

/// Leading-order formulas: alpha = K^2 A^2 exp(-A/r)/2, beta = K exp(-A/(2r)).
double asymptotic_alpha(double r, double a, double k);
double asymptotic_beta(double r, double a, double k);

/// Ordered transition points 0 < h_1 < ... < h_{N+1} < 1.
class LayerVector {
 public:
  LayerVector() = default;
  explicit LayerVector(std::vector<double> positions);

  std::size_t size() const { return h_.size(); }
  /// N (one less than the number of layers).
  int n() const { return static_cast<int>(h_.size()) - 1; }
  double operator[](std::size_t i) const { return h_[i]; }
  const std::vector<double>& positions() const { return h_; }

  /// Reflected ghosts h_0 = -h_1 and h_{N+2} = 2 - h_{N+1}.
  double ghost_left() const { return -h_.front(); }
  double ghost_right() const { return 2.0 - h_.back(); }
  /// l_j = h_j - h_{j-1} for j = 1..N+2, using the ghosts at both ends.
  std::vector<double> gaps() const;
  double min_gap() const;
  bool admissible(double threshold) const;

  bool operator==(const LayerVector&) const = default;

 private:
  std::vector<double> h_;
};

/// Sign carried by u^h on gap j (1-based): (-1)^j.
inline int gap_sign(int j) { return j % 2 == 0 ? 1 : -1; }

/// alpha^j for j = 1..N+2 on the gaps of h; gap j uses the branch of sign (-1)^j.
/// The asymptotic formula is applied without the r0 check: admissibility of h is the guard.
std::vector<double> gap_alphas(const LayerVector& h, double eps, const Potential& potential,
                               AlphaMode mode);
/// Asymptotic alpha^j from precomputed wave constants, with no r0 check.
std::vector<double> gap_alphas_asymptotic(const LayerVector& h, double eps,
                                          const WaveConstants& constants);

struct GapData {
  double length = 0.0;
  int sign = 1;
  double alpha = 0.0;
  double beta = 0.0;
};

struct ProfileOptions {
  AlphaMode barrier_mode = AlphaMode::Exact;
  double gap_factor = kDefaultGapFactor;
};

/// Metastable profile u^h sampled on n + 1 uniform nodes of [0, 1].
class MetastableProfile {
 public:
  const LayerVector& layers() const { return layers_; }
  double epsilon() const { return epsilon_; }
  int cells() const { return static_cast<int>(samples_.size()) - 1; }
  double spacing() const { return 1.0 / cells(); }
  const std::vector<double>& samples() const { return samples_; }
  std::vector<double> nodes() const;
  /// Exact alpha/beta per gap, j = 1..N+2.
  const std::vector<GapData>& gaps() const { return gaps_; }
  double barrier() const { return barrier_; }
  double mass() const;

  /// u^h at an arbitrary x in [0, 1].
  double value(double x) const;
  /// d u^h / dx from the wave slopes and the cutoff derivative.
  double derivative(double x) const;

 private:
  friend MetastableProfile build_profile(const LayerVector&, double, const Potential&, int,
                                         const ProfileOptions&);
  std::size_t interval_of(double x) const;

  LayerVector layers_;
  double epsilon_ = 0.0;
  std::vector<double> centers_;  // h_{j-1/2}, j = 1..N+2
  std::vector<StandingWave> waves_;
  std::vector<GapData> gaps_;
  std::vector<double> samples_;
  double barrier_ = 0.0;
};

/// C^2 quintic smoothstep: 0 for y <= -1, 1 for y >= 1.
double cutoff(double y);
double cutoff_derivative(double y);

MetastableProfile build_profile(const LayerVector& h, double eps, const Potential& potential,
                                int n, const ProfileOptions& options = {});

/// Psi(h) = sum_{j=1}^{N+1} (alpha^{j+1} - alpha^j)^2.
double barrier_psi(const LayerVector& h, double eps, const Potential& potential,
                   AlphaMode mode = AlphaMode::Exact);
double barrier_psi(std::span<const double> alphas);

/// Trapezoid integral of grid samples over [0, 1].
double trapezoid_mass(std::span<const double> u);
double profile_mass(const MetastableProfile& profile);

/// Finds h_{N+1} so that the profile with layers (xi, h_{N+1}) has mass M within 1e-8.
LayerVector solve_mass_constraint(std::span<const double> xi, double mass, double eps,
                                  const Potential& potential, int n,
                                  const ProfileOptions& options = {});

enum class GradientStencil {
  /// (u_{i+1} - u_i)/dx on cell midpoints; the energy consistent with the 3-point Laplacian.
  Compact,
  /// Fourth-order centred differences at the nodes.
  FourthOrder,
};

/// Integral of tau/(2 eps) v^2 + (eps/2) u_x^2 + F(u)/eps over [0, 1] with Neumann reflection.
double renormalized_energy(std::span<const double> u, std::span<const double> v, double eps,
                           double tau, const Potential& potential,
                           GradientStencil stencil = GradientStencil::FourthOrder);

}  // namespace hypmac
