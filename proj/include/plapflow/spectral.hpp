#pragma once

#include <cmath>
#include <optional>

#include "plapflow/plap.hpp"

namespace plapflow {

/// Nonnegative weight on the grid, positive on at least one node.
class Weight {
 public:
  explicit Weight(GridFunction values);
  const GridFunction& values() const { return values_; }
  const Grid& grid() const { return values_.grid(); }

 private:
  GridFunction values_;
};

struct EigenResult {
  double mu0 = 0.0;
  GridFunction psi0;  // positive, sup-normalized
  double residual = 0.0;
  int iterations = 0;
};

struct Thresholds {
  double lambda_min = 0.0;
  double lambda_max = 0.0;  // +infinity when ginf vanishes identically
  bool lambda_max_finite() const { return std::isfinite(lambda_max); }
};

struct ThresholdsResult {
  Thresholds thresholds;
  EigenResult mode_min;                   // eigenpair of weight g0 (psi_min)
  std::optional<EigenResult> mode_max;    // eigenpair of ginf when finite
};

/// seminorm_grad_p(w)^p / sum(rho |w|^p h^dim). Scale invariant in w,
/// inversely linear in rho.
double rayleigh_quotient(const GridFunction& w, const Weight& rho, double p);

/// Principal eigenpair of -Delta_p psi = mu rho phi_p(psi) by inverse power
/// iteration with sup normalization; mu reported from the Rayleigh quotient.
EigenResult principal_eigenvalue(const Weight& rho, double p,
                                 const SolverControls& controls);

ThresholdsResult compute_thresholds(const Nonlinearity& g, double p,
                                    const Grid& grid, const SolverControls& controls);
Thresholds thresholds(const Nonlinearity& g, double p, const Grid& grid,
                      const SolverControls& controls);

/// g_delta(x) := g(x, delta) sampled at the grid nodes (delta = 0 gives g0,
/// infinity gives ginf analytically).
Weight weight_from_g(const Nonlinearity& g, const Grid& grid, double delta);
Weight weight_g0(const Nonlinearity& g, const Grid& grid);
Weight weight_ginf(const Nonlinearity& g, const Grid& grid);
Weight unit_weight(const Grid& grid);

/// Positive product-of-sines profile with unit sup-norm, the canonical
/// positive initial iterate.
GridFunction sine_profile(const Grid& grid);

}  // namespace plapflow
