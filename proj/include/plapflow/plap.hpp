#pragma once

#include <optional>
#include <vector>

#include "plapflow/grid.hpp"
#include "plapflow/nonlinearity.hpp"

namespace plapflow {

struct SolverControls {
  // Absolute L2 residual target (a machine-precision relative floor applies).
  // Tight enough that the implicit integrator still resolves motion at the
  // 1e-6 sup-norm scale of the trivial-equilibrium cutoff.
  double tol_residual = 1e-12;
  // Iteration budget. The fixed-point equilibrium iteration slows critically
  // near the bifurcation thresholds, where a few thousand cheap warm-started
  // sweeps are normal.
  int max_iter = 20000;
  double damping = 0.5;        // Picard damping for the equilibrium iteration
  double eps_jacobian = 1e-8;  // regularization inside Newton Jacobians only

  void validate() const;
};

/// phi_p(s) = |s|^{p-1} sgn(s); odd and strictly increasing.
double phi_p(double s, double p);

/// Smallest meaningful L2 residual of flux-form operator evaluations at a
/// given magnitude scale: edge-flux rounding is amplified by 1/h when
/// differenced across cells.
inline double flux_residual_floor(const Grid& g, double scale) {
  const double hmin = g.dim() == 2 ? std::min(g.h(0), g.h(1)) : g.h(0);
  return 2e-14 * scale / hmin;
}

/// Flux-form discrete p-Laplacian. The exact (negative) gradient of the edge
/// energy behind seminorm_grad_p, in the h-weighted L2 inner product; the
/// degenerate flux is not regularized here.
GridFunction apply_p_laplacian(const GridFunction& f, double p);

/// Regularized linearization of -Delta_p at a state u: the Hessian of the edge
/// energy with |grad u|^2 replaced by |grad u|^2 + eps^2 inside coefficients.
/// Symmetric positive semidefinite in the h-weighted inner product.
class PLapLinearization {
 public:
  PLapLinearization(const GridFunction& u, double p, double eps_jacobian);

  void apply(const std::vector<double>& z, std::vector<double>& y) const;

  // Solves (alpha I + H + diag(extra)) x = b. Direct tridiagonal solve in 1D,
  // Jacobi-preconditioned CG in 2D. extra may be empty (treated as zero).
  // Returns false on CG breakdown (indefinite system) or stall.
  bool solve(double alpha, const std::vector<double>& extra,
             const std::vector<double>& b, std::vector<double>& x,
             double rel_tol = 1e-10) const;

  const std::vector<double>& diagonal() const { return diag_; }

 private:
  struct EdgeCoef {
    double m0, mc, dn, t;
  };
  const Grid grid_;
  double p_;
  std::vector<EdgeCoef> ex_, ey_;  // 2D edge data (ey_ unused in 1D)
  std::vector<double> w1d_;        // 1D edge weights (p-1)(D^2+eps^2)^{(p-2)/2}
  std::vector<double> diag_;
};

/// Solves -Delta_p u = rhs (the unique minimizer of the strictly convex
/// functional (1/p)||grad u||_p^p - <rhs,u>). Newton with Armijo backtracking,
/// preconditioned gradient descent fallback. Throws SolverError on
/// non-convergence; `init` warm-starts the iteration.
GridFunction solve_p_poisson(const GridFunction& rhs, double p,
                             const SolverControls& controls,
                             const GridFunction* init = nullptr);

/// Nodewise F(x, f(x)) with F(x,xi) = int_0^xi g(x,s) s^{p-1} ds.
GridFunction big_F(const Nonlinearity& g, const GridFunction& f, double p);

/// E_{lambda g}(f) = (1/p) seminorm_grad_p(f)^p - lambda * sum_i F(x_i,f_i) h^dim.
double energy(const GridFunction& f, double lambda, const Nonlinearity& g, double p);

/// Nodal reaction coefficient for the integrator: either the full g(x, xi) of a
/// Nonlinearity or a frozen x-dependent weight gamma(x) (constant in xi).
class ReactionField {
 public:
  ReactionField(const Nonlinearity& g, const Grid& grid, double p);
  static ReactionField frozen(const GridFunction& gamma, double p);

  double p() const { return p_; }
  double coeff(std::size_t node, double xi) const;
  double dcoeff_dxi(std::size_t node, double xi) const;
  // c(x,xi) phi_p(xi) and its xi-derivative
  double reaction(std::size_t node, double xi) const;
  double dreaction_dxi(std::size_t node, double xi) const;
  // int_0^xi c(x,s) s^{p-1} ds
  double antiderivative(std::size_t node, double xi) const;

 private:
  ReactionField() = default;
  std::optional<Nonlinearity> g_;
  std::vector<Point> coords_;
  std::vector<double> gamma_;
  double p_ = 0.0;
};

/// Energy of the flow associated with an arbitrary reaction field.
double energy_with_reaction(const GridFunction& f, double lambda,
                            const ReactionField& field);

}  // namespace plapflow
