#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "hypmac/error.hpp"
#include "hypmac/potential.hpp"
#include "hypmac/profile.hpp"

using namespace hypmac;

namespace {

const Potential& quartic() {
  static const Potential p = validate_potential(Potential::quartic());
  return p;
}

constexpr double kA = std::numbers::sqrt2;
constexpr double kK = 4.0;

// Fourth-order difference of a first derivative: eps^2 * u'' with O(eta^4) truncation.
template <class Slope>
double second_derivative(Slope&& slope, double x, double eta) {
  return (-slope(x + 2 * eta) + 8 * slope(x + eta) - 8 * slope(x - eta) + slope(x - 2 * eta)) /
         (12 * eta);
}

}  // namespace

TEST_CASE("half period") {
  const double eps = 0.05;
  SUBCASE("vanishing plateau: linearised half-length pi eps / 2") {
    CHECK(std::abs(minimal_half_period(quartic(), eps, 1) - std::numbers::pi * eps / 2) < 1e-8);
    CHECK(half_period(1e-4, quartic(), eps, 1) == doctest::Approx(std::numbers::pi * eps / 2).epsilon(1e-6));
  }
  SUBCASE("strictly increasing in the plateau, unbounded towards the well") {
    double previous = 0.0;
    for (const double beta : {0.9, 0.5, 0.1, 1e-2, 1e-4, 1e-8, 1e-12}) {
      const double h = half_period(1.0 - beta, quartic(), eps, 1);
      CHECK(h > previous);
      previous = h;
    }
    CHECK(previous > 0.9);
  }
  SUBCASE("eps = 0.05 at the asymptotic plateau of r = 0.05 gives half-length 0.5") {
    const double beta = kK * std::exp(-kA / (2 * 0.05));
    CHECK(half_period(1.0 - beta, quartic(), eps, 1) == doctest::Approx(0.5).epsilon(1e-5));
  }
  SUBCASE("negative branch mirrors the positive one for even F") {
    CHECK(half_period(-0.7, quartic(), eps, -1) == doctest::Approx(half_period(0.7, quartic(), eps, 1)));
  }
}

TEST_CASE("standing wave solve") {
  SUBCASE("l = 1, eps = 0.05 matches the beta asymptotics") {
    const auto wave = solve_standing_wave(1.0, 0.05, 1, quartic());
    const double beta_asym = kK * std::exp(-kA / (2 * 0.05));
    CHECK(std::abs(wave.deviation() / beta_asym - 1.0) < 1e-3);
    CHECK(std::abs(wave.value(0.5)) < 1e-9);
    CHECK(std::abs(wave.value(-0.5)) < 1e-9);
    CHECK(std::abs(wave.slope(0.0)) < 1e-9);
    CHECK(wave.value(0.0) == doctest::Approx(wave.plateau()).epsilon(1e-15));
  }
  SUBCASE("positive inside, residual of eps^2 phi'' + f(phi) below 1e-6 on 512 samples") {
    for (const double length : {0.25, 0.6, 1.0}) {
      const double eps = 0.05;
      const auto wave = solve_standing_wave(length, eps, 1, quartic());
      double worst = 0.0;
      for (int i = 1; i < 512; ++i) {
        const double x = -0.5 * length + length * i / 512.0;
        CHECK(wave.value(x) > 0.0);
        const double phi_xx =
            second_derivative([&](double y) { return wave.slope(y); }, x, eps / 100);
        worst = std::max(worst, std::abs(eps * eps * phi_xx + quartic().reaction(wave.value(x))));
      }
      CHECK(worst <= 1e-6);
    }
  }
  SUBCASE("odd symmetry of the two branches for even F") {
    const auto plus = solve_standing_wave(0.7, 0.04, 1, quartic());
    const auto minus = solve_standing_wave(0.7, 0.04, -1, quartic());
    for (const double x : {-0.3, -0.1, 0.0, 0.2, 0.34, 0.36}) {
      CHECK(minus.value(x) == doctest::Approx(-plus.value(x)).epsilon(1e-12));
    }
  }
  SUBCASE("continuation past the zero follows the same orbit") {
    const auto wave = solve_standing_wave(0.7, 0.04, 1, quartic());
    // For even F the orbit is odd about its zero.
    for (const double y : {0.005, 0.02, 0.04}) {
      CHECK(wave.value(0.35 + y) == doctest::Approx(-wave.value(0.35 - y)).epsilon(1e-10));
    }
    CHECK(wave.slope(0.35 + 1e-3) < 0.0);
  }
  SUBCASE("round trip through half_period") {
    for (const double plateau : {0.3, 0.9, 0.999, 1 - 1e-7}) {
      const double eps = 0.03;
      const double l = 2 * half_period(plateau, quartic(), eps, 1);
      CHECK(std::abs(solve_standing_wave(l, eps, 1, quartic()).plateau() - plateau) < 1e-9);
    }
  }
  SUBCASE("too short an interval has no wave") {
    CHECK_THROWS_AS(solve_standing_wave(0.9 * std::numbers::pi * 0.05, 0.05, 1, quartic()), Error);
    CHECK_NOTHROW(solve_standing_wave(1.1 * std::numbers::pi * 0.05, 0.05, 1, quartic()));
  }
}

TEST_CASE("alpha and beta") {
  SUBCASE("asymptotic plug-in at r = 0.05") {
    const auto ab = alpha_beta(1.0, 0.05, 1, quartic(), AlphaMode::Asymptotic);
    CHECK(ab.beta == doctest::Approx(4.0 * std::exp(-14.142135623730951)).epsilon(1e-12));
    CHECK(ab.beta == doctest::Approx(2.890e-6).epsilon(1e-3));
    CHECK(ab.alpha == doctest::Approx(16.0 * std::exp(-28.284271247461902)).epsilon(1e-12));
    CHECK(ab.alpha == doctest::Approx(8.35e-12).epsilon(2e-3));
    CHECK_FALSE(ab.exact);
  }
  SUBCASE("exact and asymptotic agree to 1e-3 at r = 0.05") {
    const auto e = alpha_beta(1.0, 0.05, 1, quartic(), AlphaMode::Exact);
    const auto a = alpha_beta(1.0, 0.05, 1, quartic(), AlphaMode::Asymptotic);
    CHECK(std::abs(e.alpha / a.alpha - 1) <= 1e-3);
    CHECK(std::abs(e.beta / a.beta - 1) <= 1e-3);
  }
  SUBCASE("relative error shrinks with r and is below 1e-2 at r = 0.06") {
    double previous = 1.0;
    for (const double r : {0.08, 0.06, 0.05, 0.04}) {
      const auto e = alpha_beta(1.0, r, 1, quartic(), AlphaMode::Exact);
      const auto a = alpha_beta(1.0, r, 1, quartic(), AlphaMode::Asymptotic);
      const double err = std::abs(e.alpha / a.alpha - 1);
      CHECK(err < previous);
      if (r == 0.06) CHECK(err <= 1e-2);
      previous = err;
    }
  }
  SUBCASE("alpha and beta decrease as the interval grows") {
    double alpha_prev = 1.0, beta_prev = 1.0;
    for (const double l : {0.3, 0.4, 0.6, 0.9}) {
      const auto e = alpha_beta(l, 0.04, -1, quartic(), AlphaMode::Exact);
      CHECK(e.alpha < alpha_prev);
      CHECK(e.beta < beta_prev);
      CHECK(e.alpha > 0.0);
      alpha_prev = e.alpha;
      beta_prev = e.beta;
    }
  }
  SUBCASE("asymptotic mode rejects r above r0") {
    CHECK_THROWS_AS(alpha_beta(0.3, 0.04, 1, quartic(), AlphaMode::Asymptotic), Error);
  }
}

TEST_CASE("layer vector") {
  const LayerVector h({0.3, 0.6});
  const auto l = h.gaps();
  REQUIRE(l.size() == 3);
  CHECK(l[0] == doctest::Approx(0.6));
  CHECK(l[1] == doctest::Approx(0.3));
  CHECK(l[2] == doctest::Approx(0.8));
  CHECK(h.min_gap() == doctest::Approx(0.3));
  CHECK(h.admissible(0.16));
  CHECK_FALSE(h.admissible(0.3));
  CHECK_THROWS_AS(LayerVector({0.6, 0.3}), Error);
  CHECK_THROWS_AS(LayerVector({0.0, 0.3}), Error);
  CHECK_THROWS_AS(LayerVector(std::vector<double>{}), Error);
}

TEST_CASE("metastable profile construction") {
  SUBCASE("zeros at every layer and signs (-1)^j on the gaps") {
    const LayerVector h({0.25, 0.5, 0.75});
    const auto profile = build_profile(h, 0.02, quartic(), 1024);
    for (std::size_t j = 0; j < h.size(); ++j) CHECK(std::abs(profile.value(h[j])) < 1e-12);
    CHECK(profile.value(0.1) < 0.0);
    CHECK(profile.value(0.4) > 0.0);
    CHECK(profile.value(0.6) < 0.0);
    CHECK(profile.value(0.9) > 0.0);
  }
  SUBCASE("single layer: u(0) is the plateau of the wave on [-h1, h1]") {
    const double eps = 0.02;
    const auto profile = build_profile(LayerVector({0.5}), eps, quartic(), 256);
    const double beta = kK * std::exp(-kA / (2 * eps));
    CHECK(beta == doctest::Approx(1.7e-15).epsilon(0.05));
    CHECK(std::abs(profile.value(0.0) - (-1.0 + beta)) < 3e-16);
    CHECK(std::abs(profile.gaps()[0].beta / beta - 1) < 1e-3);
  }
  SUBCASE("residual vanishes away from the layers; Neumann slopes at both ends") {
    const double eps = 0.02;
    const LayerVector h({0.25, 0.5, 0.75});
    const auto profile = build_profile(h, eps, quartic(), 1024);
    double worst = 0.0;
    for (int i = 1; i < 1024; ++i) {
      const double x = i / 1024.0;
      bool near = false;
      for (std::size_t j = 0; j < h.size(); ++j) near = near || std::abs(x - h[j]) <= eps;
      if (near || x < 3 * eps / 100 || x > 1 - 3 * eps / 100) continue;
      const double uxx = second_derivative([&](double y) { return profile.derivative(y); }, x, eps / 100);
      worst = std::max(worst, std::abs(eps * eps * uxx + quartic().reaction(profile.value(x))));
    }
    CHECK(worst <= 1e-6);
    CHECK(std::abs(profile.derivative(0.0)) <= 1e-6);
    CHECK(std::abs(profile.derivative(1.0)) <= 1e-6);
  }
  SUBCASE("inadmissible layers are rejected") {
    CHECK_THROWS_AS(build_profile(LayerVector({0.3, 0.35}), 0.02, quartic(), 256), Error);
  }
}

TEST_CASE("barrier function") {
  SUBCASE("equal gaps give zero") {
    CHECK(barrier_psi(LayerVector({0.25, 0.75}), 0.04, quartic()) == 0.0);
    CHECK(barrier_psi(LayerVector({1.0 / 6, 0.5, 5.0 / 6}), 0.04, quartic(), AlphaMode::Asymptotic) ==
          doctest::Approx(0.0));
  }
  SUBCASE("N = 1, h = (0.3, 0.6), eps = 0.04: asymptotic plug-in on gaps (0.6, 0.3, 0.8)") {
    auto alpha = [](double l) { return 0.5 * kK * kK * kA * kA * std::exp(-kA * l / 0.04); };
    const double a1 = alpha(0.6), a2 = alpha(0.3), a3 = alpha(0.8);
    const double expected = (a2 - a1) * (a2 - a1) + (a3 - a2) * (a3 - a2);
    const double psi = barrier_psi(LayerVector({0.3, 0.6}), 0.04, quartic(), AlphaMode::Asymptotic);
    CHECK(psi == doctest::Approx(expected).epsilon(1e-12));
    CHECK(psi >= 0.0);
  }
}

TEST_CASE("profile mass") {
  SUBCASE("equispaced N = 1 has zero mass") {
    const auto profile = build_profile(LayerVector({0.25, 0.75}), 0.03, quartic(), 512);
    CHECK(std::abs(profile_mass(profile)) < 1e-6);
  }
  SUBCASE("leading order 2 (h2 - h1) - 1") {
    const double eps = 0.02;
    const auto profile = build_profile(LayerVector({0.2, 0.55}), eps, quartic(), 1024);
    CHECK(std::abs(profile_mass(profile) - (2 * 0.35 - 1)) < eps);
  }
  SUBCASE("constant field") {
    const std::vector<double> u(65, 0.3);
    CHECK(trapezoid_mass(u) == doctest::Approx(0.3).epsilon(1e-14));
  }
}

TEST_CASE("mass constraint parametrisation") {
  const double eps = 0.02;
  const int n = 1024;
  SUBCASE("N = 1, xi = 0.2, M = 0 places the second layer near 0.7") {
    const std::vector<double> xi{0.2};
    const auto h = solve_mass_constraint(xi, 0.0, eps, quartic(), n);
    CHECK(h[1] == doctest::Approx(0.7).epsilon(1e-3));
    CHECK(std::abs(build_profile(h, eps, quartic(), n).mass()) <= 1e-8);
  }
  SUBCASE("dz/dxi_j = (-1)^(N-j) for well separated layers") {
    const std::vector<double> xi{0.2, 0.45};
    const double mass = 0.1;
    const double step = 1e-4;
    for (std::size_t j = 0; j < xi.size(); ++j) {
      auto up = xi, down = xi;
      up[j] += step;
      down[j] -= step;
      const double dz = (solve_mass_constraint(up, mass, eps, quartic(), n)[2] -
                         solve_mass_constraint(down, mass, eps, quartic(), n)[2]) /
                        (2 * step);
      const int expected = ((2 - static_cast<int>(j + 1)) % 2 == 0) ? 1 : -1;
      CHECK(std::abs(dz - expected) <= 1e-3);
    }
  }
  SUBCASE("unreachable mass") {
    const std::vector<double> xi{0.2};
    CHECK_THROWS_AS(solve_mass_constraint(xi, 0.9, eps, quartic(), n), Error);
  }
}

TEST_CASE("renormalized energy") {
  const int n = 4096;
  SUBCASE("constant well state has zero energy") {
    const std::vector<double> u(n + 1, 1.0), v(n + 1, 0.0);
    CHECK(renormalized_energy(u, v, 0.01, 0.1, quartic()) == doctest::Approx(0.0));
  }
  SUBCASE("two layers cost 2 c_F") {
    const double eps = 0.01;
    const auto profile = build_profile(LayerVector({0.3, 0.7}), eps, quartic(), n);
    const std::vector<double> v(n + 1, 0.0);
    const double e = renormalized_energy(profile.samples(), v, eps, 0.0, quartic());
    CHECK(std::abs(e - 2 * transition_energy(quartic())) <= 1e-6);
  }
  SUBCASE("linear in tau through the kinetic term") {
    std::vector<double> u(257), v(257);
    for (int i = 0; i <= 256; ++i) {
      u[i] = std::tanh((i / 256.0 - 0.5) / 0.05);
      v[i] = std::sin(3.0 * i / 256.0);
    }
    const double eps = 0.05, tau = 0.2;
    const double e1 = renormalized_energy(u, v, eps, tau, quartic());
    const double e2 = renormalized_energy(u, v, eps, 2 * tau, quartic());
    std::vector<double> v2(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) v2[i] = v[i] * v[i];
    CHECK(e2 - e1 == doctest::Approx(tau / (2 * eps) * trapezoid_mass(v2)).epsilon(1e-12));
  }
}
