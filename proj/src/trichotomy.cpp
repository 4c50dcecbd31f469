#include "plapflow/trichotomy.hpp"

#include <cmath>
#include <sstream>

#include "plapflow/csv.hpp"

namespace plapflow {

TrichotomyReport run_trichotomy(const ExperimentConfig& config) {
  config.validate();
  const Grid grid = config.make_grid();
  const ThresholdsResult thr = compute_thresholds(config.g, config.p, grid, config.solver);

  TrichotomyReport rep;
  rep.thresholds = thr.thresholds;
  const GridFunction v0 =
      resolve_initial_data(config.v0, grid, thr.mode_min.psi0);

  double mid = config.lambda.resolve(thr.thresholds);
  if (config.lambda.kind != LambdaSpec::Kind::Numeric)
    mid = LambdaSpec{LambdaSpec::Kind::Mid, 0.0}.resolve(thr.thresholds);
  if (!(mid > thr.thresholds.lambda_min && mid < thr.thresholds.lambda_max))
    throw ConfigError("trichotomy: mid-regime lambda must lie in (lambda_min, lambda_max)");

  struct Plan {
    const char* regime;
    double lambda;
    bool applicable;
    Outcome expected;
  };
  const bool has_max = thr.thresholds.lambda_max_finite();
  const Plan plans[3] = {
      {"below_lambda_min", 0.5 * thr.thresholds.lambda_min, true, Outcome::Decayed},
      {"between", mid, true, Outcome::ConvergedToEquilibrium},
      {"above_lambda_max", has_max ? 1.5 * thr.thresholds.lambda_max : 0.0, has_max,
       Outcome::BlewUp},
  };

  rep.pass = true;
  for (const Plan& plan : plans) {
    TrichotomyRow row;
    row.regime = plan.regime;
    row.lambda = plan.lambda;
    row.applicable = plan.applicable;
    if (!plan.applicable) {
      row.pass = true;  // not applicable: reported, not counted against the run
      rep.rows.push_back(row);
      continue;
    }
    const TrajectoryRecord rec =
        evolve(v0, plan.lambda, config.g, config.p, config.solver, config.step);
    row.outcome = rec.outcome;
    row.final_sup = rec.samples.back().sup_norm;
    row.final_seminorm = rec.samples.back().grad_p_seminorm;
    row.t_estimate = rec.t_estimate;
    if (plan.expected == Outcome::ConvergedToEquilibrium &&
        rec.outcome == Outcome::ConvergedToEquilibrium) {
      // cross-check against the fixed-point route to e_lambda
      const EquilibriumResult eq =
          solve_equilibrium(plan.lambda, config.g, config.p, v0, config.solver);
      double d = 0.0;
      for (std::size_t k = 0; k < eq.u.size(); ++k)
        d = std::max(d, std::abs(eq.u[k] - rec.final_state[k]));
      row.equilibrium_dist = d;
    }
    row.pass = rec.outcome == plan.expected;
    rep.pass = rep.pass && row.pass;
    rep.rows.push_back(row);
  }
  return rep;
}

std::string render_text(const TrichotomyReport& report) {
  std::ostringstream out;
  out << "lambda_min = " << format_double(report.thresholds.lambda_min)
      << "  lambda_max = "
      << (report.thresholds.lambda_max_finite()
              ? format_double(report.thresholds.lambda_max)
              : std::string("inf"))
      << "\n";
  for (const TrichotomyRow& r : report.rows) {
    out << r.regime << ": ";
    if (!r.applicable) {
      out << "not applicable (lambda_max = inf)\n";
      continue;
    }
    out << "lambda = " << format_double(r.lambda) << " -> " << to_string(r.outcome);
    if (r.outcome == Outcome::BlewUp)
      out << " (t_estimate = " << format_double(r.t_estimate) << ")";
    else
      out << " (sup = " << format_double(r.final_sup)
          << ", seminorm = " << format_double(r.final_seminorm) << ")";
    if (r.equilibrium_dist > 0.0)
      out << " (dist to e_lambda = " << format_double(r.equilibrium_dist) << ")";
    out << (r.pass ? "  [pass]" : "  [FAIL]") << "\n";
  }
  out << (report.pass ? "trichotomy: PASS" : "trichotomy: FAIL") << "\n";
  return out.str();
}

}  // namespace plapflow
