#pragma once

// Shared test utilities: deterministic random fields and quadrature oracles.

#include <cmath>
#include <functional>
#include <random>

#include "plapflow/grid.hpp"

namespace testutil {

inline plapflow::GridFunction random_function(const plapflow::Grid& grid,
                                              std::mt19937_64& rng, double lo = -1.0,
                                              double hi = 1.0) {
  plapflow::GridFunction f(grid);
  std::uniform_real_distribution<double> dist(lo, hi);
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = dist(rng);
  return f;
}

// Composite Simpson on [a,b]; panels must be even.
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        int panels = 20000) {
  const double h = (b - a) / panels;
  double s = f(a) + f(b);
  for (int i = 1; i < panels; ++i) s += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return s * h / 3.0;
}

inline double integrate2d(const std::function<double(double, double)>& f, int panels = 400) {
  return integrate(
      [&](double x) {
        return integrate([&, x](double y) { return f(x, y); }, 0.0, 1.0, panels);
      },
      0.0, 1.0, panels);
}

// First Dirichlet eigenvalue of the 1D p-Laplacian on (0,1) with unit weight,
// via the closed form (p-1) * (2 I_p)^p, I_p = (1/p) * pi / sin(pi/p).
inline double plap_eigenvalue_1d(double p) {
  const double pi = std::acos(-1.0);
  const double ip = pi / (p * std::sin(pi / p));
  return (p - 1.0) * std::pow(2.0 * ip, p);
}

inline double sup_distance(const plapflow::GridFunction& a, const plapflow::GridFunction& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a[k] - b[k]));
  return d;
}

}  // namespace testutil
