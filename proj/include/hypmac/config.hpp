#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hypmac/layer_ode.hpp"
#include "hypmac/model.hpp"
#include "hypmac/pde.hpp"
#include "hypmac/potential.hpp"
#include "hypmac/profile.hpp"

namespace hypmac {

struct PotentialSpec {
  /// Empty means the quartic (u^2 - 1)^2 / 4; otherwise ascending polynomial coefficients.
  std::vector<double> polynomial;

  Potential build() const;
  bool operator==(const PotentialSpec&) const = default;
};

struct DampingSpec {
  Damping::Kind kind = Damping::Kind::One;
  /// Constant value, or relaxation time for g = 1 + tau_g F''.
  double value = 1.0;

  Damping build(const Potential& potential) const;
  bool operator==(const DampingSpec&) const = default;
};

/// u1(x) = mean + amplitude cos(mode pi x).
struct VelocitySpec {
  double mean = 0.0;
  double amplitude = 0.0;
  int mode = 1;

  bool is_zero() const { return mean == 0.0 && amplitude == 0.0; }
  std::vector<double> sample(int n) const;
  bool operator==(const VelocitySpec&) const = default;
};

enum class InitialProfile {
  /// u^h where every gap admits a standing wave, tanh gluing otherwise.
  Auto,
  Metastable,
  Tanh,
};

enum class SweepMethod { Ode, Pde };

struct RunConfig {
  Model model = Model::MAC;
  PotentialSpec potential;
  DampingSpec damping;
  std::optional<double> epsilon;
  double tau = 0.0;
  std::vector<double> layers;
  std::vector<double> xi;
  std::optional<double> mass;
  /// Explicit layer velocities; empty means forcing / gamma.
  std::vector<double> hdot0;
  bool project_hdot0 = false;
  VelocitySpec u1;
  InitialProfile initial_profile = InitialProfile::Auto;
  int n = 512;
  std::optional<double> t_end;
  std::optional<double> cadence;
  double tol = 1e-9;
  double gap_factor = kDefaultGapFactor;
  AlphaMode alpha_mode = AlphaMode::Asymptotic;
  double r0 = kDefaultAsymptoticR0;
  std::vector<double> epsilons;
  std::vector<double> r_list;
  std::vector<double> taus;
  SweepMethod sweep_method = SweepMethod::Ode;
  /// Layer-model epsilon for compare; differs from epsilon only in negative controls.
  std::optional<double> ode_epsilon;
  /// Prefix of every output file.
  std::string name = "run";

  bool operator==(const RunConfig&) const = default;

  double cadence_or_default() const;
  Potential build_potential() const;
  PdeParams pde_params() const;
  OdeParams ode_params() const;
  /// The configured layers, or (xi, h_{N+1}) solved for the requested mass.
  LayerVector initial_layers() const;
};

/// Validates every key and applies defaults. Throws ConfigError(SchemaError) for unknown keys
/// and wrong types, ConfigError(ConsistencyError) for contradictions; both name the key.
RunConfig parse_config(const nlohmann::json& document);
RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);

/// Every field spelled out, so that parse_config(emit_config(c)) == c.
nlohmann::json emit_config(const RunConfig& config);

/// Throws ConfigError(ConsistencyError) naming the first absent key.
void require_keys(const RunConfig& config, std::initializer_list<std::string_view> keys);

std::string_view to_string(InitialProfile p);
std::string_view to_string(SweepMethod m);

}  // namespace hypmac
