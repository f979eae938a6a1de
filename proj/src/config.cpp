#include "hypmac/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "hypmac/error.hpp"

namespace hypmac {

using nlohmann::json;

namespace {

[[noreturn]] void schema(const std::string& key, const std::string& what) {
  throw ConfigError(ErrorCode::SchemaError, key, what);
}

[[noreturn]] void inconsistent(const std::string& key, const std::string& what) {
  throw ConfigError(ErrorCode::ConsistencyError, key, what);
}

double number(const json& v, const std::string& key) {
  if (!v.is_number()) schema(key, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) inconsistent(key, "must be finite");
  return x;
}

std::vector<double> numbers(const json& v, const std::string& key) {
  if (!v.is_array()) schema(key, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& item : v) out.push_back(number(item, key));
  return out;
}

std::string text(const json& v, const std::string& key) {
  if (!v.is_string()) schema(key, "expected a string");
  return v.get<std::string>();
}

bool boolean(const json& v, const std::string& key) {
  if (!v.is_boolean()) schema(key, "expected true or false");
  return v.get<bool>();
}

PotentialSpec parse_potential(const json& v) {
  PotentialSpec spec;
  if (v.is_string()) {
    if (v.get<std::string>() != "quartic") schema("potential", "unknown potential '" + v.get<std::string>() + "'");
    return spec;
  }
  if (!v.is_object() || v.size() != 1 || !v.contains("polynomial")) {
    schema("potential", "expected \"quartic\" or {\"polynomial\": [c0, c1, ...]}");
  }
  spec.polynomial = numbers(v.at("polynomial"), "potential");
  if (spec.polynomial.size() < 3) inconsistent("potential", "polynomial needs degree two or more");
  return spec;
}

DampingSpec parse_damping(const json& v) {
  DampingSpec spec;
  if (v.is_string()) {
    if (v.get<std::string>() != "one") schema("damping", "unknown damping '" + v.get<std::string>() + "'");
    return spec;
  }
  if (!v.is_object() || v.size() != 1) {
    schema("damping", "expected \"one\", {\"constant\": c} or {\"relaxation\": tau_g}");
  }
  if (v.contains("constant")) {
    spec.kind = Damping::Kind::Constant;
    spec.value = number(v.at("constant"), "damping");
  } else if (v.contains("relaxation")) {
    spec.kind = Damping::Kind::Relaxation;
    spec.value = number(v.at("relaxation"), "damping");
  } else {
    schema("damping", "unknown damping kind '" + v.begin().key() + "'");
  }
  return spec;
}

VelocitySpec parse_velocity(const json& v) {
  if (!v.is_object()) schema("u1", "expected {\"mean\": a, \"amplitude\": b, \"mode\": k}");
  VelocitySpec spec;
  for (const auto& [key, item] : v.items()) {
    if (key == "mean") {
      spec.mean = number(item, "u1");
    } else if (key == "amplitude") {
      spec.amplitude = number(item, "u1");
    } else if (key == "mode") {
      if (!item.is_number_integer()) schema("u1", "mode must be an integer");
      spec.mode = item.get<int>();
    } else {
      schema("u1", "unknown field '" + key + "'");
    }
  }
  return spec;
}

template <class Enum, std::size_t K>
Enum parse_enum(const json& v, const std::string& key, const std::pair<std::string_view, Enum> (&table)[K]) {
  const auto s = text(v, key);
  for (const auto& [name, value] : table) {
    if (name == s) return value;
  }
  schema(key, "unknown value '" + s + "'");
}

constexpr std::pair<std::string_view, InitialProfile> kProfiles[] = {
    {"auto", InitialProfile::Auto}, {"metastable", InitialProfile::Metastable}, {"tanh", InitialProfile::Tanh}};
constexpr std::pair<std::string_view, SweepMethod> kMethods[] = {{"ode", SweepMethod::Ode},
                                                                {"pde", SweepMethod::Pde}};
constexpr std::pair<std::string_view, AlphaMode> kAlphaModes[] = {{"exact", AlphaMode::Exact},
                                                                 {"asymptotic", AlphaMode::Asymptotic}};

template <class Enum, std::size_t K>
std::string_view name_of(Enum e, const std::pair<std::string_view, Enum> (&table)[K]) {
  for (const auto& [name, value] : table) {
    if (value == e) return name;
  }
  return "?";
}

void check_layers(const std::vector<double>& h, const std::string& key) {
  for (std::size_t j = 0; j < h.size(); ++j) {
    if (!(h[j] > 0.0 && h[j] < 1.0)) inconsistent(key, "positions must lie in (0, 1)");
    if (j > 0 && !(h[j] > h[j - 1])) inconsistent(key, "positions must be strictly increasing");
  }
}

void validate(const RunConfig& c) {
  if (c.epsilon && !(*c.epsilon > 0.0)) inconsistent("epsilon", "must be positive");
  if (c.tau < 0.0) inconsistent("tau", "must be nonnegative");
  if (is_hyperbolic(c.model) && !(c.tau > 0.0)) inconsistent("tau", "hyperbolic models need tau > 0");
  if (c.n < kMinCells) inconsistent("n", "grid needs at least " + std::to_string(kMinCells) + " cells");
  if (c.t_end && !(*c.t_end > 0.0)) inconsistent("t_end", "must be positive");
  if (c.cadence && !(*c.cadence > 0.0)) inconsistent("cadence", "must be positive");
  if (c.cadence && c.t_end && *c.cadence > *c.t_end) inconsistent("cadence", "exceeds t_end");
  if (!(c.tol > 0.0)) inconsistent("tol", "must be positive");
  if (!(c.gap_factor > 0.0)) inconsistent("gap_factor", "must be positive");
  if (!(c.r0 > 0.0)) inconsistent("r0", "must be positive");
  if (c.ode_epsilon && !(*c.ode_epsilon > 0.0)) inconsistent("ode_epsilon", "must be positive");
  if (c.name.empty() || c.name.find('/') != std::string::npos) inconsistent("name", "must be a plain file prefix");

  if (!c.layers.empty() && !c.xi.empty()) inconsistent("xi", "give either layers or xi with mass, not both");
  if (!c.xi.empty() && !c.mass) inconsistent("mass", "xi needs a target mass");
  if (c.mass && c.xi.empty()) inconsistent("mass", "mass is only used together with xi");
  check_layers(c.layers, "layers");
  check_layers(c.xi, "xi");
  const std::size_t layer_count = c.layers.empty() ? (c.xi.empty() ? 0 : c.xi.size() + 1) : c.layers.size();
  if (c.model == Model::ChN3 && layer_count != 0 && layer_count != 3) {
    inconsistent(c.layers.empty() ? "xi" : "layers", "ch-n3 needs exactly three layers");
  }
  if (!c.layers.empty()) {
    const LayerVector h(c.layers);
    std::vector<double> eps_all = c.epsilons;
    if (c.epsilon) eps_all.push_back(*c.epsilon);
    for (const double e : eps_all) {
      if (!h.admissible(c.gap_factor * e)) {
        inconsistent("layers", "a gap is at or below gap_factor * epsilon = " + std::to_string(c.gap_factor * e));
      }
    }
  }
  if (!c.hdot0.empty()) {
    if (!is_hyperbolic(c.model)) inconsistent("hdot0", "initial layer velocities need a hyperbolic model");
    if (layer_count != 0 && c.hdot0.size() != layer_count) inconsistent("hdot0", "one velocity per layer");
  }
  if (!c.u1.is_zero() && !is_hyperbolic(c.model)) inconsistent("u1", "initial velocity needs a hyperbolic model");
  if (c.u1.mode < 0) inconsistent("u1", "mode must be nonnegative");

  for (const double e : c.epsilons) {
    if (!(e > 0.0)) inconsistent("epsilons", "must be positive");
  }
  for (const double r : c.r_list) {
    if (!(r > 0.0)) inconsistent("r_list", "must be positive");
    if (!(r < c.r0)) inconsistent("r_list", "r = " + std::to_string(r) + " is not below r0");
  }
  for (std::size_t k = 0; k < c.taus.size(); ++k) {
    if (c.taus[k] < 0.0) inconsistent("taus", "must be nonnegative");
    if (k > 0 && !(c.taus[k] < c.taus[k - 1])) inconsistent("taus", "must be strictly decreasing");
  }

  Potential p = Potential::quartic();
  try {
    p = validate_potential(c.potential.build());
  } catch (const Error& e) {
    inconsistent("potential", e.what());
  }
  try {
    validate_damping(c.damping.build(p), p);
  } catch (const Error& e) {
    inconsistent("damping", e.what());
  }
}

}  // namespace

Potential PotentialSpec::build() const {
  return polynomial.empty() ? Potential::quartic() : Potential::polynomial(polynomial);
}

Damping DampingSpec::build(const Potential& potential) const {
  switch (kind) {
    case Damping::Kind::Constant: return validate_damping(Damping::constant(value), potential);
    case Damping::Kind::Relaxation: return validate_damping(Damping::relaxation(value, potential), potential);
    default: return validate_damping(Damping::one(), potential);
  }
}

std::vector<double> VelocitySpec::sample(int n) const {
  std::vector<double> out(n + 1);
  for (int i = 0; i <= n; ++i) {
    out[i] = mean + amplitude * std::cos(mode * std::numbers::pi * i / n);
  }
  return out;
}

std::string_view to_string(InitialProfile p) { return name_of(p, kProfiles); }
std::string_view to_string(SweepMethod m) { return name_of(m, kMethods); }

double RunConfig::cadence_or_default() const {
  if (cadence) return *cadence;
  return t_end ? *t_end / 100.0 : 1.0;
}

Potential RunConfig::build_potential() const { return validate_potential(potential.build()); }

PdeParams RunConfig::pde_params() const {
  PdeParams p;
  p.model = model;
  p.epsilon = epsilon.value_or(0.0);
  p.tau = tau;
  p.potential = build_potential();
  p.damping = damping.build(p.potential);
  return validate_pde_params(std::move(p));
}

OdeParams RunConfig::ode_params() const {
  OdeParams p;
  p.model = model;
  p.epsilon = epsilon.value_or(0.0);
  p.tau = tau;
  p.potential = build_potential();
  p.damping = damping.build(p.potential);
  p.alpha_mode = alpha_mode;
  p.gap_factor = gap_factor;
  return p;
}

LayerVector RunConfig::initial_layers() const {
  if (!layers.empty()) return LayerVector(layers);
  if (xi.empty()) inconsistent("layers", "missing");
  if (!epsilon) inconsistent("epsilon", "missing; needed to place the last layer");
  return solve_mass_constraint(xi, *mass, *epsilon, build_potential(), n,
                               ProfileOptions{AlphaMode::Exact, gap_factor});
}

RunConfig parse_config(const json& doc) {
  if (!doc.is_object()) schema("(root)", "expected a JSON object");
  RunConfig c;
  for (const auto& [key, v] : doc.items()) {
    if (key == "model") {
      const auto m = parse_model(text(v, key));
      if (!m) schema(key, "unknown model '" + v.get<std::string>() + "'");
      c.model = *m;
    } else if (key == "potential") {
      c.potential = parse_potential(v);
    } else if (key == "damping") {
      c.damping = parse_damping(v);
    } else if (key == "epsilon") {
      c.epsilon = number(v, key);
    } else if (key == "tau") {
      c.tau = number(v, key);
    } else if (key == "layers") {
      c.layers = numbers(v, key);
    } else if (key == "xi") {
      c.xi = numbers(v, key);
    } else if (key == "mass") {
      c.mass = number(v, key);
    } else if (key == "hdot0") {
      c.hdot0 = numbers(v, key);
    } else if (key == "project_hdot0") {
      c.project_hdot0 = boolean(v, key);
    } else if (key == "u1") {
      c.u1 = parse_velocity(v);
    } else if (key == "initial_profile") {
      c.initial_profile = parse_enum(v, key, kProfiles);
    } else if (key == "n") {
      if (!v.is_number_integer()) schema(key, "expected an integer");
      c.n = v.get<int>();
    } else if (key == "t_end") {
      c.t_end = number(v, key);
    } else if (key == "cadence") {
      c.cadence = number(v, key);
    } else if (key == "tol") {
      c.tol = number(v, key);
    } else if (key == "gap_factor") {
      c.gap_factor = number(v, key);
    } else if (key == "alpha_mode") {
      c.alpha_mode = parse_enum(v, key, kAlphaModes);
    } else if (key == "r0") {
      c.r0 = number(v, key);
    } else if (key == "epsilons") {
      c.epsilons = numbers(v, key);
    } else if (key == "r_list") {
      c.r_list = numbers(v, key);
    } else if (key == "taus") {
      c.taus = numbers(v, key);
    } else if (key == "sweep_method") {
      c.sweep_method = parse_enum(v, key, kMethods);
    } else if (key == "ode_epsilon") {
      c.ode_epsilon = number(v, key);
    } else if (key == "name") {
      c.name = text(v, key);
    } else {
      schema(key, "unknown key");
    }
  }
  validate(c);
  return c;
}

RunConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    schema("(document)", e.what());
  }
  return parse_config(doc);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) schema("(file)", "cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

json emit_config(const RunConfig& c) {
  json doc;
  doc["model"] = std::string(to_string(c.model));
  if (c.potential.polynomial.empty()) {
    doc["potential"] = "quartic";
  } else {
    doc["potential"] = {{"polynomial", c.potential.polynomial}};
  }
  switch (c.damping.kind) {
    case Damping::Kind::Constant: doc["damping"] = {{"constant", c.damping.value}}; break;
    case Damping::Kind::Relaxation: doc["damping"] = {{"relaxation", c.damping.value}}; break;
    default: doc["damping"] = "one";
  }
  if (c.epsilon) doc["epsilon"] = *c.epsilon;
  doc["tau"] = c.tau;
  if (!c.layers.empty()) doc["layers"] = c.layers;
  if (!c.xi.empty()) doc["xi"] = c.xi;
  if (c.mass) doc["mass"] = *c.mass;
  if (!c.hdot0.empty()) doc["hdot0"] = c.hdot0;
  doc["project_hdot0"] = c.project_hdot0;
  doc["u1"] = {{"mean", c.u1.mean}, {"amplitude", c.u1.amplitude}, {"mode", c.u1.mode}};
  doc["initial_profile"] = std::string(to_string(c.initial_profile));
  doc["n"] = c.n;
  if (c.t_end) doc["t_end"] = *c.t_end;
  if (c.cadence) doc["cadence"] = *c.cadence;
  doc["tol"] = c.tol;
  doc["gap_factor"] = c.gap_factor;
  doc["alpha_mode"] = std::string(name_of(c.alpha_mode, kAlphaModes));
  doc["r0"] = c.r0;
  if (!c.epsilons.empty()) doc["epsilons"] = c.epsilons;
  if (!c.r_list.empty()) doc["r_list"] = c.r_list;
  if (!c.taus.empty()) doc["taus"] = c.taus;
  doc["sweep_method"] = std::string(to_string(c.sweep_method));
  if (c.ode_epsilon) doc["ode_epsilon"] = *c.ode_epsilon;
  doc["name"] = c.name;
  return doc;
}

void require_keys(const RunConfig& c, std::initializer_list<std::string_view> keys) {
  for (const auto key : keys) {
    bool present = true;
    if (key == "epsilon") present = c.epsilon.has_value();
    else if (key == "t_end") present = c.t_end.has_value();
    else if (key == "layers") present = !c.layers.empty() || !c.xi.empty();
    else if (key == "epsilons") present = c.epsilons.size() >= 1;
    else if (key == "r_list") present = !c.r_list.empty();
    else if (key == "taus") present = !c.taus.empty();
    if (!present) inconsistent(std::string(key), "required by this command");
  }
}

}  // namespace hypmac
