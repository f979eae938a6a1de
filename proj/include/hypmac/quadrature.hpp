#pragma once

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <string>

#include "hypmac/error.hpp"

namespace hypmac::quad {

using Rule = boost::math::quadrature::gauss<double, 20>;

/// 20-point Gauss–Legendre on a single panel. Nodes never touch the endpoints.
template <class F>
double gauss_panel(F&& f, double a, double b) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  const auto& x = Rule::abscissa();
  const auto& w = Rule::weights();
  // boost stores the non-negative half of the symmetric rule; x[0] == 0 for odd orders only.
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0.0) {
      sum += w[i] * f(mid);
    } else {
      sum += w[i] * (f(mid - half * x[i]) + f(mid + half * x[i]));
    }
  }
  return half * sum;
}

struct Result {
  double value = 0.0;
  double error_estimate = 0.0;
  int panels = 0;
};

/// Composite Gauss–Legendre with panel doubling until two successive sums agree to
/// `abs_tol` (or `rel_tol` relative to the magnitude).
template <class F>
Result composite_gauss(F&& f, double a, double b, double abs_tol, double rel_tol = 0.0,
                       int start_panels = 2, int max_panels = 1 << 14,
                       ErrorCode failure = ErrorCode::QuadratureFailure) {
  auto sum_panels = [&](int panels) {
    const double h = (b - a) / panels;
    double s = 0.0;
    for (int k = 0; k < panels; ++k) s += gauss_panel(f, a + k * h, a + (k + 1) * h);
    return s;
  };
  int panels = start_panels;
  double previous = sum_panels(panels);
  while (panels < max_panels) {
    panels *= 2;
    const double current = sum_panels(panels);
    const double diff = std::abs(current - previous);
    if (!std::isfinite(current)) break;
    if (diff <= abs_tol || diff <= rel_tol * std::abs(current)) {
      return {current, diff, panels};
    }
    previous = current;
  }
  throw Error(failure, "composite Gauss-Legendre did not converge on [" + std::to_string(a) +
                           ", " + std::to_string(b) + "]");
}

}  // namespace hypmac::quad
