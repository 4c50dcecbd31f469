#pragma once

#include <vector>

#include "plapflow/spectral.hpp"

namespace plapflow {

// Sup-norm below which an equilibrium counts as the trivial one.
inline constexpr double kTrivialCutoff = 1e-6;
// Sup-norm cap at which the branch is declared to have escaped to infinity.
inline constexpr double kBranchEscapeCap = 1e6;

enum class EquilibriumClass { Trivial, Nontrivial };

struct EquilibriumResult {
  double lambda = 0.0;
  GridFunction u;
  double residual = 0.0;
  int iterations = 0;
  EquilibriumClass classification = EquilibriumClass::Trivial;
};

struct BranchSample {
  double lambda = 0.0;
  double seminorm = 0.0;
  double sup = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

struct BranchResult {
  std::vector<BranchSample> samples;
  Thresholds thresholds;
  bool escaped = false;       // sup-norm cap hit while approaching lambda_max
  double escape_lambda = 0.0;
};

/// Damped Picard iteration u <- (1-alpha) u + alpha (-Delta_p)^{-1}(lambda g(u) phi_p(u)).
/// The damping is halved (up to 4 times) when the residual oscillates.
EquilibriumResult solve_equilibrium(double lambda, const Nonlinearity& g, double p,
                                    const GridFunction& init,
                                    const SolverControls& controls);

/// Max pairwise sup-distance among the nontrivial equilibria reached from the
/// given starts (0 when fewer than two are nontrivial). Throws if a start
/// fails to converge.
double verify_uniqueness(double lambda, const Nonlinearity& g, double p,
                         const std::vector<GridFunction>& starts,
                         const SolverControls& controls);

/// Warm-started continuation along an increasing schedule inside
/// (lambda_min, lambda_max); the first solve is seeded with 0.1 psi_min.
BranchResult trace_branch(const Nonlinearity& g, double p, const Grid& grid,
                          const std::vector<double>& lambda_schedule,
                          const SolverControls& controls);

/// Default schedule: `count` geometric points in (1.02 lambda_min, 0.98 lambda_max),
/// or (1.02 lambda_min, 4 lambda_min) when lambda_max is infinite.
std::vector<double> default_branch_schedule(const Thresholds& th, int count = 24);

}  // namespace plapflow
