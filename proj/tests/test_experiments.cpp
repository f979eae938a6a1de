#include <doctest.h>

#include <cmath>
#include <vector>

#include "hypmac/error.hpp"
#include "hypmac/experiments.hpp"

using namespace hypmac;
using nlohmann::json;

TEST_CASE("tanh gluing") {
  const LayerVector h({0.3, 0.6});
  const auto u = tanh_profile(h, 0.02, 1000);
  CHECK(u.front() == doctest::Approx(-1.0));
  CHECK(u.back() == doctest::Approx(-1.0));
  CHECK(u[450] == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(std::abs(u[300]) < 1e-12);
  CHECK(std::abs(u[600]) < 1e-12);
  const auto single = tanh_profile(LayerVector({0.5}), 0.02, 100);
  CHECK(single.front() < 0.0);
  CHECK(single.back() > 0.0);
}

TEST_CASE("initial datum policy") {
  const Potential p = Potential::quartic();
  const LayerVector h({0.35, 0.60});
  const auto ok = make_initial_datum(h, 0.05, p, 256, InitialProfile::Auto, 3.0);
  CHECK(ok.used == InitialProfile::Metastable);
  CHECK(ok.warnings.empty());
  // 0.25 < pi * 0.08: the middle gap has no standing wave.
  const auto fallback = make_initial_datum(h, 0.08, p, 256, InitialProfile::Auto, 3.0);
  CHECK(fallback.used == InitialProfile::Tanh);
  CHECK(fallback.warnings.size() == 1);
  CHECK_THROWS_AS(make_initial_datum(h, 0.08, p, 256, InitialProfile::Metastable, 3.0), Error);
  CHECK(make_initial_datum(h, 0.05, p, 256, InitialProfile::Tanh, 3.0).u == tanh_profile(h, 0.05, 256));
}

TEST_CASE("slope fit") {
  const std::vector<double> eps{0.05, 0.06, 0.07, 0.08};
  std::vector<double> speed;
  for (const double e : eps) speed.push_back(3.0 * std::exp(-0.5 / e));
  const auto fit = fit_slope(eps, speed, -0.5);
  CHECK(fit.slope == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(fit.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  CHECK(std::abs(fit.deviation) < 1e-12);

  for (std::size_t k = 0; k < eps.size(); ++k) speed[k] *= eps[k];
  const auto pref = fit_slope(eps, speed, -0.5);
  CHECK(pref.prefactor_corrected_slope == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(pref.slope < -0.5);

  const std::vector<double> two{0.05, 0.06};
  CHECK_THROWS_AS(fit_slope(two, std::vector<double>{1e-3, 1e-2}, -0.5), Error);
  try {
    fit_slope(two, std::vector<double>{1e-3, 1e-2}, -0.5);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InsufficientSamples);
  }
  CHECK_THROWS_AS(fit_slope(eps, std::vector<double>{1e-3, 0.0, 1e-2, 1e-1}, -0.5), Error);
}

TEST_CASE("asymptotics sweep on the quartic") {
  const std::vector<double> r{0.08, 0.06, 0.05, 0.04};
  const auto rep = asymptotics_sweep(r, Potential::quartic(), kDefaultAsymptoticR0, 2);
  REQUIRE(rep.rows.size() == 4);
  CHECK(rep.alpha_error_decreasing);
  CHECK(rep.beta_error_decreasing);
  for (const auto& row : rep.rows) {
    CHECK(row.sign == 1);
    if (row.r == 0.06) CHECK(row.beta_error <= 1e-2);
    if (row.r == 0.05) CHECK(row.beta_error <= 1e-3);
  }
  CHECK_THROWS_AS(asymptotics_sweep(std::vector<double>{0.2}, Potential::quartic()), Error);
}

TEST_CASE("asymmetric potential gives both branches") {
  // (u^2 - 1)^2 (1 + 0.3 u + 0.5 u^2) / 4
  const Potential p = Potential::polynomial({0.25, 0.075, -0.375, -0.15, 0.0, 0.075, 0.125});
  REQUIRE_FALSE(p.is_even());
  const auto rep = asymptotics_sweep(std::vector<double>{0.06, 0.05}, p);
  REQUIRE(rep.rows.size() == 4);
  CHECK(rep.rows[0].sign == 1);
  CHECK(rep.rows[2].sign == -1);
  CHECK(rep.rows[0].beta_exact != doctest::Approx(rep.rows[2].beta_exact));
}

TEST_CASE("metastability sweep with the layer model") {
  const auto c = parse_config(json{{"model", "ac"},
                                   {"layers", {0.35, 0.60}},
                                   {"epsilons", {0.05, 0.06, 0.07, 0.08}},
                                   {"gap_factor", 3},
                                   {"t_end", 100}});
  const auto rep = metastability_sweep(c, 2);
  CHECK(rep.min_gap == doctest::Approx(0.25));
  CHECK(rep.a == doctest::Approx(std::sqrt(2.0)));
  CHECK(rep.fit.predicted == doctest::Approx(-0.25 * std::sqrt(2.0)));
  REQUIRE(rep.points.size() == 4);
  for (std::size_t k = 1; k < rep.points.size(); ++k) CHECK(rep.points[k].speed > rep.points[k - 1].speed);
  CHECK(rep.fit.slope < 0.0);
  // Deterministic regardless of worker count.
  const auto serial = metastability_sweep(c, 1);
  for (std::size_t k = 0; k < rep.points.size(); ++k) CHECK(serial.points[k].speed == rep.points[k].speed);
}

TEST_CASE("PDE and layer model agree, and a wrong eps does not") {
  auto doc = json{{"model", "mac"}, {"epsilon", 0.06}, {"layers", {0.35, 0.60}}, {"t_end", 10}, {"n", 256}};
  const auto rep = compare_pde_ode(parse_config(doc));
  CHECK(rep.samples > 10);
  CHECK_FALSE(rep.window_mismatch);
  CHECK(rep.max_error() <= 0.02);


  // Moving layers: the layer model with the wrong eps lags well behind.
  auto ac = json{{"model", "ac"}, {"epsilon", 0.06}, {"layers", {0.35, 0.60}}, {"t_end", 5}, {"n", 256}};
  const auto moving = compare_pde_ode(parse_config(ac));
  ac["ode_epsilon"] = 0.05;
  const auto control = compare_pde_ode(parse_config(ac));
  CHECK(control.max_error() > 5.0 * moving.max_error());
  CHECK(control.max_error() > 0.01);
}

TEST_CASE("collision windows that disagree are flagged") {
  const auto rep = compare_pde_ode(parse_config(
      json{{"model", "ac"}, {"epsilon", 0.06}, {"layers", {0.35, 0.60}}, {"t_end", 50}, {"n", 256}}));
  REQUIRE(rep.pde_collision.has_value());
  REQUIRE(rep.ode_collision.has_value());
  CHECK(*rep.ode_collision < *rep.pde_collision);
  CHECK(rep.window_mismatch);
  CHECK(rep.window_end == *rep.ode_collision);
}

TEST_CASE("tau study") {
  const auto c = parse_config(json{{"model", "mac"},
                                   {"epsilon", 0.05},
                                   {"layers", {0.15, 0.55}},
                                   {"t_end", 20},
                                   {"tol", 1e-12},
                                   {"taus", {0.2, 0.1, 0.05, 0.0}}});
  const auto rep = tau_limit_study(c, 2);
  REQUIRE(rep.rows.size() == 4);
  CHECK(std::isnan(rep.rows[0].ratio));
  CHECK(rep.rows[3].distance == 0.0);
  CHECK(rep.monotone);
  auto bad = c;
  bad.damping = {Damping::Kind::Constant, 2.0};
  CHECK_THROWS_AS(tau_limit_study(bad), ConfigError);
}

TEST_CASE("dissipation on the plateau is exponentially small") {
  auto dissipation = [](double eps) {
    const LayerVector h({0.35, 0.60});
    const auto u0 = make_initial_datum(h, eps, Potential::quartic(), 256, InitialProfile::Auto, 3.0).u;
    SimulationOptions o;
    o.t_end = 1.0;
    o.cadence = 0.25;
    return run_simulation(u0, {}, PdeParams{Model::AC, eps, 0.0}, o).rows.back().cum_dissipation;
  };
  CHECK(dissipation(0.08) >= 10.0 * dissipation(0.05));
}
