#pragma once

#include <span>
#include <string>
#include <vector>

#include "hypmac/model.hpp"
#include "hypmac/potential.hpp"

namespace hypmac {

inline constexpr int kMinCells = 64;
inline constexpr double kBlowUpSentinel = 1e6;

struct PdeParams {
  Model model = Model::MAC;
  double epsilon = 0.06;
  double tau = 0.0;
  Potential potential = Potential::quartic();
  Damping damping = Damping::one();
};

/// Validates the potential, the damping and the model/tau combination. ChN3 has no PDE.
PdeParams validate_pde_params(PdeParams params);

/// Fields on the n + 1 uniform nodes of [0, 1]; v is empty for the parabolic models.
struct PdeState {
  std::vector<double> u;
  std::vector<double> v;
  double t = 0.0;

  int cells() const { return static_cast<int>(u.size()) - 1; }
};

struct PdeRates {
  std::vector<double> du;
  std::vector<double> dv;
};

std::vector<double> grid_nodes(int n);

/// Method-of-lines right-hand side with reflected ghosts and trapezoid averages.
PdeRates semidiscrete_rhs(const PdeState& state, const PdeParams& params);

/// Largest step allowed by the explicit stability policy on n cells.
double stable_time_step(const PdeParams& params, int n);

/// One classical RK4 step. Throws UnstableStep once a field leaves the sentinel range.
PdeState step(const PdeState& state, const PdeParams& params, double dt);

/// Sign changes of u by linear interpolation; exact zeros snap to their node.
std::vector<double> track_layers(std::span<const double> u);

double mass_of(std::span<const double> u);
/// Integral of tau/2 v^2 + eps^2/2 u_x^2 + F(u), u_x on cell midpoints.
double energy_of(const PdeState& state, const PdeParams& params);

struct DiagnosticRow {
  double t = 0.0;
  double mass = 0.0;
  double energy = 0.0;
  double cum_dissipation = 0.0;
  std::vector<double> layers;
  /// Largest layer displacement over the preceding interval divided by its length; NaN
  /// when the layer count changed or on the first row.
  double max_speed = 0.0;
};

struct SimulationOptions {
  double t_end = 10.0;
  double cadence = 0.5;
  /// 0 picks stable_time_step.
  double dt = 0.0;
  /// Minimum tracked layer separation, in cells; reflected boundary gaps count too.
  double collision_cells = 2.0;
};

struct SimulationResult {
  std::vector<DiagnosticRow> rows;
  PdeState final_state;
  double dt = 0.0;
  long steps = 0;
  bool collided = false;
  double collision_time = 0.0;
  /// Largest energy increase over a single time step.
  double max_energy_increase = 0.0;
  std::vector<std::string> warnings;
};

/// Integrates to t_end. u1 may be empty (zero velocity); it is ignored by parabolic models.
SimulationResult run_simulation(std::span<const double> u0, std::span<const double> u1,
                                const PdeParams& params, const SimulationOptions& options);

}  // namespace hypmac
