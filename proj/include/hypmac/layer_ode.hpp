#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

#include "hypmac/model.hpp"
#include "hypmac/potential.hpp"
#include "hypmac/profile.hpp"

namespace hypmac {

struct OdeParams {
  Model model = Model::MAC;
  double epsilon = 0.06;
  double tau = 0.0;
  Potential potential = Potential::quartic();
  Damping damping = Damping::one();
  AlphaMode alpha_mode = AlphaMode::Asymptotic;
  /// Collision when a gap (reflected ends included) drops to gap_factor * eps.
  double gap_factor = kDefaultGapFactor;
};

/// Validated parameters plus the potential-derived constants the right-hand sides need.
class LayerSystem {
 public:
  explicit LayerSystem(OdeParams params);

  const OdeParams& params() const { return params_; }
  Model model() const { return params_.model; }
  double epsilon() const { return params_.epsilon; }
  double tau() const { return params_.tau; }
  double c_f() const { return c_f_; }
  /// gamma_{F,g}; 1 for the first-order models.
  double gamma() const { return gamma_; }
  const WaveConstants& constants() const { return constants_; }
  double collision_threshold() const { return params_.gap_factor * params_.epsilon; }

  /// alpha^1..alpha^{N+2} in the configured mode.
  std::vector<double> alphas(const LayerVector& h) const;
  /// First-order velocity field: the AC, MAC or CH bracket with its prefactor. For the
  /// hyperbolic models this is the forcing on the right of tau h'' + gamma h'.
  std::vector<double> forcing(const LayerVector& h) const;
  /// Same without the admissibility check, for integrator stages.
  std::vector<double> forcing_unchecked(std::span<const double> h) const;

 private:
  OdeParams params_;
  double c_f_ = 0.0;
  double gamma_ = 1.0;
  WaveConstants constants_;
};

struct LayerState {
  LayerVector h;
  /// Present for the hyperbolic models only.
  std::vector<double> hdot;
  double t = 0.0;
};

struct LayerRates {
  std::vector<double> dh;
  /// h'' for the hyperbolic models, empty otherwise.
  std::vector<double> ddh;
};

/// alpha^j on the gaps l_1 = 2 h_1, ..., l_{N+2} = 2 (1 - h_{N+1}).
std::vector<double> alphas_for_gaps(const LayerVector& h, double eps, const Potential& potential,
                                    AlphaMode mode);

/// (1/(N+1)) sum_{i=1}^{N+1} (-1)^i (alpha^{i+1} - alpha^i).
double sigma_term(std::span<const double> alphas);

/// alpha^{j+1} - alpha^j for the AC models; plus (-1)^{j+1} Sigma for the MAC models.
std::vector<double> ac_bracket(std::span<const double> alphas);
std::vector<double> mac_bracket(std::span<const double> alphas);
/// Three-layer Cahn-Hilliard velocities, no prefactor.
std::vector<double> ch_n3_velocity(std::span<const double> h, std::span<const double> alphas);

/// Throws InadmissibleLayers when a gap is at or below the collision threshold.
LayerRates layer_rhs(const LayerState& state, const LayerSystem& system);

struct LengthsPm {
  double plus = 0.0;
  double minus = 0.0;
};
/// Total length of the positive (L+) and negative (L-) phases, reflected ends halved.
LengthsPm lengths_Lpm(const LayerVector& h);
/// Coefficients c with L+' = sum_j c_j h_j' = sum_j (-1)^j h_j'.
std::vector<double> lplus_coefficients(std::size_t layers);

/// (c_F/eps) * (2 on the diagonal, (-1)^{i+j} off it), N x N.
Eigen::MatrixXd leading_S(int n, double eps, double c_f);
/// eps/((N+1) c_F) * (N on the diagonal, (-1)^{i+j+1} off it).
Eigen::MatrixXd leading_S_inv(int n, double eps, double c_f);

/// Quasi-stationary start for the hyperbolic models: forcing / gamma.
std::vector<double> default_initial_velocity(const LayerVector& h, const LayerSystem& system);
/// Removes the L+' component of hdot.
std::vector<double> project_velocity(std::span<const double> hdot);

struct TrajectoryRow {
  double t = 0.0;
  std::vector<double> h;
  std::vector<double> hdot;
};

struct IntegrationOptions {
  double t_end = 10.0;
  double cadence = 0.5;
  double tol = 1e-9;
  /// Project hdot(0) so that L+'(0) = 0 (hyperbolic models).
  bool project_initial_velocity = false;
};

struct Trajectory {
  std::vector<TrajectoryRow> rows;
  bool collided = false;
  double collision_time = 0.0;
  long steps = 0;
};

/// Adaptive Dormand-Prince 5(4) with dense output. Hyperbolic states without hdot get
/// default_initial_velocity. A collision ends the run with a final row at the collision time.
Trajectory integrate_layers(const LayerState& initial, const LayerSystem& system,
                            const IntegrationOptions& options);

/// Velocity at a trajectory row: the first-order field, or the stored hdot.
std::vector<double> row_velocity(const TrajectoryRow& row, const LayerSystem& system);

}  // namespace hypmac
