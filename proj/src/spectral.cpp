#include "plapflow/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace plapflow {

Weight::Weight(GridFunction values) : values_(std::move(values)) {
  bool any_positive = false;
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (values_[k] < 0.0) throw ConfigError("Weight: entries must be nonnegative");
    any_positive = any_positive || values_[k] > 0.0;
  }
  if (!any_positive) throw ConfigError("Weight: must be positive on at least one node");
}

double rayleigh_quotient(const GridFunction& w, const Weight& rho, double p) {
  if (!(w.grid() == rho.grid())) throw ConfigError("rayleigh_quotient: grid mismatch");
  double den = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k)
    den += rho.values()[k] * std::pow(std::abs(w[k]), p);
  den *= w.grid().cell_measure();
  if (!(den > 0.0)) throw ConfigError("rayleigh_quotient: zero denominator");
  return std::pow(seminorm_grad_p(w, p), p) / den;
}

GridFunction sine_profile(const Grid& grid) {
  const double pi = std::acos(-1.0);
  return sample(grid, [&](const Point& x) {
    double v = std::sin(pi * x.x);
    if (grid.dim() == 2) v *= std::sin(pi * x.y);
    return v;
  });
}

namespace {

double eigen_residual(const GridFunction& psi, double mu, const Weight& rho, double p,
                      double* scale_out) {
  GridFunction r = apply_p_laplacian(psi, p);
  double scale = norm_L2(r);
  for (std::size_t k = 0; k < r.size(); ++k)
    r[k] += mu * rho.values()[k] * phi_p(psi[k], p);
  if (scale_out != nullptr) *scale_out = scale;
  return norm_L2(r);
}

}  // namespace

EigenResult principal_eigenvalue(const Weight& rho, double p,
                                 const SolverControls& controls) {
  if (!(p >= 2.0)) throw ConfigError("principal_eigenvalue: p must be at least 2");
  controls.validate();
  const Grid& grid = rho.grid();
  GridFunction psi = sine_profile(grid);

  SolverControls inner = controls;
  inner.tol_residual = std::max(controls.tol_residual * 0.1, 1e-14);

  double mu = rayleigh_quotient(psi, rho, p);
  double residual = 0.0;
  for (int iter = 1; iter <= controls.max_iter; ++iter) {
    // premultiplying by the current mu estimate keeps the solution O(1), so
    // the inner solver tolerance is not amplified by the normalization
    GridFunction rhs(grid);
    for (std::size_t k = 0; k < rhs.size(); ++k)
      rhs[k] = mu * rho.values()[k] * phi_p(psi[k], p);
    GridFunction z = solve_p_poisson(rhs, p, inner, &psi);

    const double zmax = norm_sup(z);
    if (!(zmax > 0.0))
      throw SolverError("principal_eigenvalue: iterate collapsed", residual);
    for (std::size_t k = 0; k < z.size(); ++k) z[k] /= zmax;
    psi = z;

    const double mu_new = rayleigh_quotient(psi, rho, p);
    double scale = 0.0;
    residual = eigen_residual(psi, mu_new, rho, p, &scale);
    const double tol_eff =
        std::max(controls.tol_residual, flux_residual_floor(grid, scale + mu_new));
    const bool mu_settled = std::abs(mu_new - mu) <= 1e-8 * std::abs(mu_new);
    mu = mu_new;
    if (residual <= tol_eff && mu_settled) {
      for (std::size_t k = 0; k < psi.size(); ++k)
        if (!(psi[k] > 0.0))
          throw SolverError("principal_eigenvalue: loss of positivity", residual);
      return EigenResult{mu, psi, residual, iter};
    }
  }
  throw SolverError("principal_eigenvalue: no convergence within max_iter", residual);
}

Weight weight_from_g(const Nonlinearity& g, const Grid& grid, double delta) {
  return Weight(sample(grid, [&](const Point& x) { return g.g(x, delta); }));
}

Weight weight_g0(const Nonlinearity& g, const Grid& grid) {
  return Weight(sample(grid, [&](const Point& x) { return g.g0(x); }));
}

Weight weight_ginf(const Nonlinearity& g, const Grid& grid) {
  return Weight(sample(grid, [&](const Point& x) { return g.ginf(x); }));
}

Weight unit_weight(const Grid& grid) {
  return Weight(GridFunction(grid, 1.0));
}

ThresholdsResult compute_thresholds(const Nonlinearity& g, double p, const Grid& grid,
                                    const SolverControls& controls) {
  ThresholdsResult out;
  out.mode_min = principal_eigenvalue(weight_g0(g, grid), p, controls);
  out.thresholds.lambda_min = out.mode_min.mu0;

  bool ginf_vanishes = true;
  for (std::size_t k = 0; k < grid.num_nodes() && ginf_vanishes; ++k)
    ginf_vanishes = g.ginf(grid.coord(k)) == 0.0;
  if (ginf_vanishes) {
    out.thresholds.lambda_max = std::numeric_limits<double>::infinity();
  } else {
    out.mode_max = principal_eigenvalue(weight_ginf(g, grid), p, controls);
    out.thresholds.lambda_max = out.mode_max->mu0;
  }
  if (!(out.thresholds.lambda_min < out.thresholds.lambda_max))
    throw IntegrityError("thresholds: lambda_min >= lambda_max");
  return out;
}

Thresholds thresholds(const Nonlinearity& g, double p, const Grid& grid,
                      const SolverControls& controls) {
  return compute_thresholds(g, p, grid, controls).thresholds;
}

}  // namespace plapflow
