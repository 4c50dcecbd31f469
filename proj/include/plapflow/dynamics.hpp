#pragma once

#include <optional>
#include <string>
#include <vector>

#include "plapflow/spectral.hpp"

namespace plapflow {

enum class Outcome { Decayed, ConvergedToEquilibrium, BlewUp, HorizonReached };

std::string to_string(Outcome o);

struct StepControls {
  double dt_init = 1e-3;
  double dt_min = 1e-12;
  double dt_max = 1e5;
  double blowup_threshold = 1e6;  // sup-norm
  double horizon = 1e6;           // final time T
  double stationarity_tol = 1e-8; // on ||v+ - v||_2 / dt

  void validate() const;
};

struct TrajectorySample {
  double t = 0.0;
  double sup_norm = 0.0;
  double grad_p_seminorm = 0.0;
  double energy = 0.0;
  double dt = 0.0;       // step that produced this sample (0 for the initial one)
  double step_l2 = 0.0;  // ||v+ - v||_2 of that step, for dissipation auditing
};

struct TrajectoryRecord {
  std::vector<TrajectorySample> samples;
  Outcome outcome = Outcome::HorizonReached;
  double t_estimate = 0.0;  // blow-up time estimate (last accepted t)
  std::vector<double> dt_history;
  GridFunction final_state;
  StepControls controls_used;
  double energy_slack = 0.0;  // 10*tol slack applied by the step acceptance
};

/// One backward-Euler step: solves v+ - dt (Delta_p v+ + lambda g(v+) phi_p(v+)) = v
/// by Newton with the regularized Jacobian. Throws SolverError when Newton fails.
GridFunction step_implicit(const GridFunction& v, double dt, double lambda,
                           const Nonlinearity& g, double p,
                           const SolverControls& controls);

/// Adaptive backward-Euler trajectory. Steps are accepted only when the
/// discrete dissipation inequality E(v+) - E(v) <= -0.9 ||v+-v||_2^2/dt holds
/// (up to a 10*tol slack); rejected steps halve dt.
TrajectoryRecord evolve(const GridFunction& v0, double lambda, const Nonlinearity& g,
                        double p, const SolverControls& controls,
                        const StepControls& step_controls);

/// Same integrator with the reaction coefficient frozen to a weight gamma(x).
TrajectoryRecord evolve_frozen(const GridFunction& w0, double lambda,
                               const Weight& gamma, double p,
                               const SolverControls& controls,
                               const StepControls& step_controls);

/// Re-derives the outcome label from the recorded samples (idempotent with the
/// label stored by evolve). With a candidate equilibrium, convergence
/// additionally requires sup-distance to it below dist_tol. Throws
/// IntegrityError if the recorded energies increase beyond 10*tol.
Outcome classify_asymptotics(const TrajectoryRecord& traj,
                             const GridFunction* e_candidate = nullptr,
                             double dist_tol = 1e-5);

struct ComparisonReport {
  double max_ordering_violation = 0.0;  // max over (t,node) of (w - v)+
  double min_value_v = 0.0;             // most negative v seen (positivity check)
  bool v_blew_up_no_later = true;
  Outcome outcome_v = Outcome::HorizonReached;
  Outcome outcome_w = Outcome::HorizonReached;
  double t_end = 0.0;
};

/// Co-evolves v (full g-reaction) and w (frozen weight gamma) on a shared
/// adaptive time grid. Hypotheses ginf >= gamma >= 0 and v0 >= w0 >= 0 are
/// checked nodewise; gamma may vanish identically (the positivity case).
ComparisonReport compare_evolutions(const GridFunction& v0, const GridFunction& w0,
                                    const GridFunction& gamma, double lambda,
                                    const Nonlinearity& g, double p,
                                    const SolverControls& controls,
                                    const StepControls& step_controls);

/// Frozen-weight blow-up probe. For lambda > mu0(gamma) the run must blow up
/// (IntegrityError otherwise); below mu0(gamma) it reports the outcome as a
/// negative control.
Outcome blowup_probe(const Weight& gamma, double lambda, const GridFunction& w0,
                     double p, const SolverControls& controls,
                     const StepControls& step_controls);

struct InstabilityProbeResult {
  bool escaped = false;
  double escape_time = 0.0;
  double mu0_g_delta = 0.0;
  TrajectoryRecord record;
};

/// Starts at (delta/4) psi_min and verifies the trivial equilibrium repels the
/// trajectory past sup-norm delta (requires lambda > mu0(g_delta), checked).
InstabilityProbeResult trivial_instability_probe(double lambda, const Nonlinearity& g,
                                                 double p, double delta, const Grid& grid,
                                                 const SolverControls& controls,
                                                 const StepControls& step_controls);

}  // namespace plapflow
