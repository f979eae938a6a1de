#include <doctest.h>

#include <string>

#include "hypmac/config.hpp"
#include "hypmac/error.hpp"

using namespace hypmac;
using nlohmann::json;

namespace {

ErrorCode code_of(const json& doc, std::string& key) {
  try {
    parse_config(doc);
  } catch (const ConfigError& e) {
    key = e.key();
    return e.code();
  }
  FAIL("document was accepted: " << doc.dump());
  return ErrorCode::InvalidParameter;
}

void expect_error(const json& doc, ErrorCode code, const std::string& key) {
  std::string got;
  CHECK(code_of(doc, got) == code);
  CHECK(got == key);
}

}  // namespace

TEST_CASE("minimal document gets defaults") {
  const auto c = parse_config(json{{"model", "mac"}, {"epsilon", 0.06}, {"layers", {0.35, 0.60}}, {"t_end", 50}});
  CHECK(c.model == Model::MAC);
  CHECK(*c.epsilon == 0.06);
  CHECK(c.layers == std::vector<double>{0.35, 0.60});
  CHECK(*c.t_end == 50.0);
  CHECK(c.n == 512);
  CHECK(c.tol == 1e-9);
  CHECK(c.potential.polynomial.empty());
  CHECK(c.damping.kind == Damping::Kind::One);
  CHECK(c.u1.is_zero());
  CHECK(c.cadence_or_default() == doctest::Approx(0.5));
  CHECK(c.initial_layers() == LayerVector({0.35, 0.60}));
}

TEST_CASE("consistency errors name the key") {
  expect_error(json{{"model", "hyp-mac"}, {"tau", 0}}, ErrorCode::ConsistencyError, "tau");
  expect_error(json{{"model", "ch-n3"}, {"layers", {0.2, 0.5}}}, ErrorCode::ConsistencyError, "layers");
  expect_error(json{{"model", "mac"}, {"n", 32}}, ErrorCode::ConsistencyError, "n");
  expect_error(json{{"model", "mac"}, {"t_end", 1}, {"cadence", 2}}, ErrorCode::ConsistencyError, "cadence");
  expect_error(json{{"model", "mac"}, {"epsilon", 0.06}, {"layers", {0.3, 0.35}}}, ErrorCode::ConsistencyError,
               "layers");
  expect_error(json{{"model", "mac"}, {"layers", {0.6, 0.3}}}, ErrorCode::ConsistencyError, "layers");
  expect_error(json{{"model", "mac"}, {"hdot0", {0.0, 0.0}}, {"layers", {0.3, 0.6}}},
               ErrorCode::ConsistencyError, "hdot0");
  expect_error(json{{"model", "mac"}, {"taus", {0.05, 0.1}}}, ErrorCode::ConsistencyError, "taus");
  expect_error(json{{"model", "mac"}, {"damping", {{"constant", -1.0}}}}, ErrorCode::ConsistencyError, "damping");
  expect_error(json{{"model", "mac"}, {"potential", {{"polynomial", {0.0, 1.0, 1.0}}}}},
               ErrorCode::ConsistencyError, "potential");
}

TEST_CASE("schema errors name the key") {
  expect_error(json{{"model", "mac"}, {"epsilonn", 0.06}}, ErrorCode::SchemaError, "epsilonn");
  expect_error(json{{"model", "mac"}, {"epsilon", "small"}}, ErrorCode::SchemaError, "epsilon");
  expect_error(json{{"model", "heat"}}, ErrorCode::SchemaError, "model");
  expect_error(json{{"model", "mac"}, {"layers", 0.3}}, ErrorCode::SchemaError, "layers");
  expect_error(json{{"model", "mac"}, {"damping", "two"}}, ErrorCode::SchemaError, "damping");
  CHECK_THROWS_AS(parse_config_text("{not json"), ConfigError);
  CHECK_THROWS_AS(parse_config(json::array()), ConfigError);
}

TEST_CASE("emit then parse round-trips") {
  RunConfig c;
  c.model = Model::HypMAC;
  c.potential.polynomial = {0.25, 0.0, -0.5, 0.0, 0.25};
  c.damping = {Damping::Kind::Relaxation, 0.1};
  c.epsilon = 0.05;
  c.tau = 0.2;
  c.layers = {0.2, 0.5, 0.8};
  c.hdot0 = {1e-6, 0.0, -1e-6};
  c.project_hdot0 = true;
  c.u1 = {0.01, 0.02, 3};
  c.initial_profile = InitialProfile::Tanh;
  c.n = 256;
  c.t_end = 12.5;
  c.cadence = 0.25;
  c.tol = 1e-11;
  c.gap_factor = 3;
  c.alpha_mode = AlphaMode::Exact;
  c.epsilons = {0.05, 0.06, 0.07};
  c.r_list = {0.08, 0.06};
  c.taus = {0.2, 0.1, 0.05, 0.0};
  c.sweep_method = SweepMethod::Pde;
  c.ode_epsilon = 0.045;
  c.name = "roundtrip";
  const auto back = parse_config(emit_config(c));
  CHECK(back == c);
  CHECK(parse_config_text(emit_config(c).dump(2)) == c);

  const auto minimal = parse_config(json{{"model", "ac"}});
  CHECK(parse_config(emit_config(minimal)) == minimal);
}

TEST_CASE("mass constrained layers") {
  const auto c = parse_config(json{{"model", "mac"}, {"epsilon", 0.05}, {"xi", {0.3}}, {"mass", 0.1}});
  const auto h = c.initial_layers();
  REQUIRE(h.size() == 2);
  CHECK(h[0] == 0.3);
  CHECK(h[1] > 0.3);
  std::string key;
  CHECK(code_of(json{{"model", "mac"}, {"xi", {0.3}}}, key) == ErrorCode::ConsistencyError);
  CHECK(key == "mass");
}

TEST_CASE("require_keys") {
  const auto c = parse_config(json{{"model", "mac"}});
  try {
    require_keys(c, {"epsilon"});
    FAIL("missing key accepted");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "epsilon");
  }
}

TEST_CASE("u1 sampling") {
  const VelocitySpec v{0.1, 0.2, 2};
  const auto s = v.sample(4);
  REQUIRE(s.size() == 5);
  CHECK(s[0] == doctest::Approx(0.3));
  CHECK(s[1] == doctest::Approx(0.1));
  CHECK(s[2] == doctest::Approx(-0.1));
}
