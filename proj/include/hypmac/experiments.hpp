#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hypmac/config.hpp"
#include "hypmac/layer_ode.hpp"
#include "hypmac/pde.hpp"

namespace hypmac {

/// (-1)^N prod_j tanh((x - h_j) / (sqrt(2) eps)) on n + 1 nodes.
std::vector<double> tanh_profile(const LayerVector& h, double eps, int n);

struct InitialDatum {
  std::vector<double> u;
  InitialProfile used = InitialProfile::Metastable;
  std::vector<std::string> warnings;
};

/// u0 per the requested policy. Auto falls back to tanh gluing when a gap is too short
/// for a standing wave.
InitialDatum make_initial_datum(const LayerVector& h, double eps, const Potential& potential, int n,
                                InitialProfile policy, double gap_factor);

struct ComparisonReport {
  RunConfig config;
  double pde_epsilon = 0.0;
  double ode_epsilon = 0.0;
  /// Sup-norm position error per layer over the common window.
  std::vector<double> layer_errors;
  std::size_t samples = 0;
  double window_end = 0.0;
  std::optional<double> pde_collision;
  std::optional<double> ode_collision;
  bool window_mismatch = false;
  std::vector<double> ode_initial_velocity;
  std::vector<std::string> warnings;
  SimulationResult pde;
  Trajectory ode;

  double max_error() const;
};

/// Runs the PDE from u^h (u1 as configured) and the layer model from the same layers, and
/// compares tracked positions at the PDE diagnostic times.
ComparisonReport compare_pde_ode(const RunConfig& config);

struct SlopeFit {
  std::vector<double> inv_eps;
  std::vector<double> log_speed;
  double slope = 0.0;
  double intercept = 0.0;
  /// -A l^h with l^h the smallest gap.
  double predicted = 0.0;
  /// (slope - predicted) / |predicted|, signed.
  double deviation = 0.0;
  /// Slope of ln(speed / eps), which strips the eps prefactor of the layer velocities.
  double prefactor_corrected_slope = 0.0;
};

/// Least squares of ln(speed) against 1/eps. Throws InsufficientSamples below three points.
SlopeFit fit_slope(std::span<const double> epsilons, std::span<const double> speeds, double predicted);

struct SweepPoint {
  double epsilon = 0.0;
  double speed = 0.0;
  double run_end = 0.0;
  bool collided = false;
  InitialProfile initial = InitialProfile::Metastable;
  std::vector<std::string> warnings;
};

struct MetastabilityReport {
  RunConfig config;
  double min_gap = 0.0;
  double a = 0.0;
  std::vector<SweepPoint> points;
  SlopeFit fit;
};

/// Speed per eps is the largest layer speed over the first quarter of each run.
MetastabilityReport metastability_sweep(const RunConfig& config, int threads = 1);

struct AsymptoticsRow {
  double r = 0.0;
  int sign = 1;
  double alpha_exact = 0.0;
  double alpha_asymptotic = 0.0;
  double alpha_error = 0.0;
  double beta_exact = 0.0;
  double beta_asymptotic = 0.0;
  double beta_error = 0.0;
};

struct AsymptoticsReport {
  std::vector<AsymptoticsRow> rows;
  /// Relative errors strictly decrease as r decreases, per branch.
  bool alpha_error_decreasing = false;
  bool beta_error_decreasing = false;
};

/// Exact versus asymptotic alpha and beta at each r; both branches for an asymmetric F.
AsymptoticsReport asymptotics_sweep(std::span<const double> r_list, const Potential& potential,
                                    double r0 = kDefaultAsymptoticR0, int threads = 1);

struct TauRow {
  double tau = 0.0;
  double distance = 0.0;
  /// distance / previous distance; NaN on the first row.
  double ratio = 0.0;
};

struct TauLimitReport {
  RunConfig config;
  std::vector<TauRow> rows;
  bool halving = false;
  bool monotone = false;
};

/// Sup distance between HYP_MAC (g = 1, hdot0 = MAC velocity) and MAC trajectories per tau.
TauLimitReport tau_limit_study(const RunConfig& config, int threads = 1);

}  // namespace hypmac
