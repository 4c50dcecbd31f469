#include "plapflow/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace plapflow {

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::Decayed: return "decayed";
    case Outcome::ConvergedToEquilibrium: return "converged_to_equilibrium";
    case Outcome::BlewUp: return "blew_up";
    case Outcome::HorizonReached: return "horizon_reached";
  }
  return "unknown";
}

void StepControls::validate() const {
  if (!(dt_min > 0.0 && dt_init > 0.0 && dt_max > 0.0))
    throw ConfigError("StepControls: step sizes must be positive");
  if (!(dt_min <= dt_init && dt_init <= dt_max))
    throw ConfigError("StepControls: need dt_min <= dt_init <= dt_max");
  if (!(blowup_threshold > 0.0)) throw ConfigError("StepControls: blowup_threshold must be positive");
  if (!(horizon > 0.0)) throw ConfigError("StepControls: horizon must be positive");
  if (!(stationarity_tol > 0.0)) throw ConfigError("StepControls: stationarity_tol must be positive");
}

namespace {

constexpr double kTrivialSup = 1e-6;       // matches equilibria::kTrivialCutoff
constexpr double kDissipationSlackEta = 0.1;

// Newton solve of S(w) = (w - v)/dt - Delta_p w - lambda r(w) = 0, warm-started
// at v. Returns false if Newton or its line search fails.
bool backward_euler_solve(const GridFunction& v, double dt, double lambda,
                          const ReactionField& field, const SolverControls& sc,
                          GridFunction& out) {
  const Grid& grid = v.grid();
  const std::size_t n = grid.num_nodes();
  const double p = field.p();
  GridFunction w = v;

  const auto residual = [&](const GridFunction& ww, GridFunction& s, double* scale) {
    s = apply_p_laplacian(ww, p);
    double sc_acc = norm_L2(s) + norm_L2(v) / dt;
    for (std::size_t k = 0; k < n; ++k) {
      const double reac = lambda * field.reaction(k, ww[k]);
      s[k] = (ww[k] - v[k]) / dt - s[k] - reac;
    }
    if (scale != nullptr) *scale = sc_acc;
    return norm_L2(s);
  };

  GridFunction s(grid);
  double scale = 0.0;
  double sn = residual(w, s, &scale);
  const double tol = std::max(sc.tol_residual, flux_residual_floor(grid, scale));

  for (int iter = 0; iter < 40; ++iter) {
    if (sn <= tol) {
      out = std::move(w);
      return true;
    }
    PLapLinearization lin(w, p, sc.eps_jacobian);
    std::vector<double> extra(n), rhs(n), d;
    for (std::size_t k = 0; k < n; ++k) {
      extra[k] = -lambda * field.dreaction_dxi(k, w[k]);
      rhs[k] = -s[k];
    }
    if (!lin.solve(1.0 / dt, extra, rhs, d, grid.dim() == 1 ? 1e-12 : 1e-8))
      return false;

    // no representable step left: accept the numerical best, or give up
    double dmax = 0.0, wmax = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      dmax = std::max(dmax, std::abs(d[k]));
      wmax = std::max(wmax, std::abs(w[k]));
    }
    if (dmax <= 8e-16 * wmax) {
      if (sn <= 1e-7 * scale) {
        out = std::move(w);
        return true;
      }
      return false;
    }

    double t = 1.0;
    bool ok = false;
    GridFunction trial(grid);
    for (int ls = 0; ls < 35; ++ls) {
      for (std::size_t k = 0; k < n; ++k) trial[k] = w[k] + t * d[k];
      GridFunction strial(grid);
      const double strial_n = residual(trial, strial, nullptr);
      if (strial_n <= (1.0 - 1e-4 * t) * sn) {
        w = trial;
        s = std::move(strial);
        sn = strial_n;
        ok = true;
        break;
      }
      t *= 0.5;
    }
    if (!ok) return false;
  }
  if (sn <= tol) {
    out = std::move(w);
    return true;
  }
  return false;
}

struct StepAttempt {
  bool solved = false;
  bool accepted = false;
  GridFunction w;
  double energy_next = 0.0;
  double step_l2 = 0.0;
};

double acceptance_slack(double tol_residual, double energy_now) {
  return 10.0 * tol_residual + 1e-13 * std::abs(energy_now);
}

StepAttempt attempt_step(const GridFunction& v, double energy_now, double dt,
                         double lambda, const ReactionField& field,
                         const SolverControls& sc) {
  StepAttempt a;
  a.solved = backward_euler_solve(v, dt, lambda, field, sc, a.w);
  if (!a.solved) return a;
  // Positivity is part of the acceptance test: Newton noise within the
  // solver allowance is projected back onto the cone, a genuine negative
  // excursion rejects the step so dt is halved.
  const double project_floor = -1e-7 * std::max(1.0, norm_sup(a.w));
  for (std::size_t k = 0; k < a.w.size(); ++k) {
    if (a.w[k] >= 0.0) continue;
    if (a.w[k] > project_floor) {
      a.w[k] = 0.0;
    } else {
      a.accepted = false;
      return a;
    }
  }
  GridFunction diff = a.w;
  for (std::size_t k = 0; k < diff.size(); ++k) diff[k] -= v[k];
  a.step_l2 = norm_L2(diff);
  a.energy_next = energy_with_reaction(a.w, lambda, field);
  const double d_energy = a.energy_next - energy_now;
  a.accepted = d_energy <= -(1.0 - kDissipationSlackEta) * a.step_l2 * a.step_l2 / dt +
                               acceptance_slack(sc.tol_residual, energy_now);
  return a;
}

void check_positivity(const GridFunction& w) {
  const double floor_ = -1e-6 * std::max(1.0, norm_sup(w));
  for (std::size_t k = 0; k < w.size(); ++k)
    if (w[k] < floor_)
      throw IntegrityError("trajectory lost positivity beyond the noise allowance");
}

TrajectoryRecord evolve_field(const GridFunction& v0, double lambda,
                              const ReactionField& field, const SolverControls& sc,
                              const StepControls& tc) {
  sc.validate();
  tc.validate();
  for (std::size_t k = 0; k < v0.size(); ++k)
    if (v0[k] < 0.0) throw ConfigError("evolve: initial data must be nonnegative");

  TrajectoryRecord rec;
  rec.controls_used = tc;
  rec.energy_slack = 10.0 * sc.tol_residual;
  GridFunction v = v0;
  double energy_now = energy_with_reaction(v, lambda, field);
  double t = 0.0, dt = tc.dt_init;
  rec.samples.push_back({0.0, norm_sup(v), seminorm_grad_p(v, field.p()), energy_now, 0.0, 0.0});

  int grew_recently = 0;
  const int max_accepted = 500000;
  for (int steps = 0; steps < max_accepted;) {
    if (t >= tc.horizon) {
      rec.outcome = Outcome::HorizonReached;
      break;
    }
    StepAttempt a = attempt_step(v, energy_now, dt, lambda, field, sc);
    if (!a.solved || !a.accepted) {
      if (dt * 0.5 >= tc.dt_min) {
        dt *= 0.5;
        continue;
      }
      // step failure at dt_min: blow-up if the sup-norm has been ramping up
      if (grew_recently >= 3 && norm_sup(v) > 1e3) {
        rec.outcome = Outcome::BlewUp;
        rec.t_estimate = t;
        break;
      }
      throw SolverError("evolve: step failure at dt_min not attributable to blow-up",
                        a.solved ? a.step_l2 : -1.0);
    }

    check_positivity(a.w);
    const double sup_prev = norm_sup(v);
    v = std::move(a.w);
    t += dt;
    ++steps;
    const double sup_now = norm_sup(v);
    const double deriv = a.step_l2 / dt;
    energy_now = a.energy_next;
    rec.samples.push_back(
        {t, sup_now, seminorm_grad_p(v, field.p()), energy_now, dt, a.step_l2});
    rec.dt_history.push_back(dt);
    grew_recently = sup_now > sup_prev ? grew_recently + 1 : 0;

    if (sup_now > tc.blowup_threshold) {
      rec.outcome = Outcome::BlewUp;
      rec.t_estimate = t;
      break;
    }
    if (deriv < tc.stationarity_tol) {
      if (sup_now < kTrivialSup) {
        rec.outcome = Outcome::Decayed;
        break;
      }
      // near-stationary at a nontrivial level: require the sup-norm to have
      // settled over a trailing window before calling it an equilibrium
      const std::size_t m = rec.samples.size();
      if (m >= 8) {
        double lo = sup_now, hi = sup_now;
        for (std::size_t k = m - 8; k < m; ++k) {
          lo = std::min(lo, rec.samples[k].sup_norm);
          hi = std::max(hi, rec.samples[k].sup_norm);
        }
        if (hi - lo <= 0.01 * std::max(hi, 1e-300)) {
          rec.outcome = Outcome::ConvergedToEquilibrium;
          break;
        }
      }
    }
    dt = std::min(dt * 2.0, tc.dt_max);
  }
  rec.final_state = std::move(v);
  return rec;
}

}  // namespace

GridFunction step_implicit(const GridFunction& v, double dt, double lambda,
                           const Nonlinearity& g, double p,
                           const SolverControls& controls) {
  if (!(dt > 0.0)) throw ConfigError("step_implicit: dt must be positive");
  const ReactionField field(g, v.grid(), p);
  GridFunction out(v.grid());
  if (!backward_euler_solve(v, dt, lambda, field, controls, out))
    throw SolverError("step_implicit: Newton failed", dt);
  return out;
}

TrajectoryRecord evolve(const GridFunction& v0, double lambda, const Nonlinearity& g,
                        double p, const SolverControls& controls,
                        const StepControls& step_controls) {
  return evolve_field(v0, lambda, ReactionField(g, v0.grid(), p), controls, step_controls);
}

TrajectoryRecord evolve_frozen(const GridFunction& w0, double lambda,
                               const Weight& gamma, double p,
                               const SolverControls& controls,
                               const StepControls& step_controls) {
  return evolve_field(w0, lambda, ReactionField::frozen(gamma.values(), p), controls,
                      step_controls);
}

Outcome classify_asymptotics(const TrajectoryRecord& traj, const GridFunction* e_candidate,
                             double dist_tol) {
  if (traj.samples.empty()) throw IntegrityError("classify_asymptotics: empty trajectory");
  double slack = traj.energy_slack;
  for (std::size_t k = 1; k < traj.samples.size(); ++k) {
    const double de = traj.samples[k].energy - traj.samples[k - 1].energy;
    if (de > slack + 1e-13 * std::abs(traj.samples[k - 1].energy))
      throw IntegrityError("classify_asymptotics: energy increased along the trajectory");
  }
  const TrajectorySample& last = traj.samples.back();
  if (last.sup_norm > traj.controls_used.blowup_threshold) return Outcome::BlewUp;

  // dissipation identity: dE/dt = -||dv/dt||_2^2, so the final time-derivative
  // norm is sqrt(max(0, -dE/dt)) estimated from the last accepted step
  double deriv = std::numeric_limits<double>::infinity();
  if (traj.samples.size() >= 2) {
    const TrajectorySample& prev = traj.samples[traj.samples.size() - 2];
    if (last.t > prev.t)
      deriv = std::sqrt(std::max(0.0, (prev.energy - last.energy) / (last.t - prev.t)));
  }
  if (deriv < traj.controls_used.stationarity_tol * 10.0) {
    if (last.sup_norm < kTrivialSup) return Outcome::Decayed;
    if (e_candidate != nullptr) {
      double d = 0.0;
      for (std::size_t k = 0; k < traj.final_state.size(); ++k)
        d = std::max(d, std::abs(traj.final_state[k] - (*e_candidate)[k]));
      if (d <= dist_tol) return Outcome::ConvergedToEquilibrium;
      return Outcome::HorizonReached;
    }
    return Outcome::ConvergedToEquilibrium;
  }
  return Outcome::HorizonReached;
}

ComparisonReport compare_evolutions(const GridFunction& v0, const GridFunction& w0,
                                    const GridFunction& gamma, double lambda,
                                    const Nonlinearity& g, double p,
                                    const SolverControls& sc, const StepControls& tc) {
  sc.validate();
  tc.validate();
  const Grid& grid = v0.grid();
  if (!(grid == w0.grid()) || !(grid == gamma.grid()))
    throw ConfigError("compare_evolutions: grid mismatch");
  for (std::size_t k = 0; k < grid.num_nodes(); ++k) {
    if (gamma[k] < 0.0 || g.ginf(grid.coord(k)) < gamma[k] - 1e-12)
      throw ConfigError("compare_evolutions: need ginf >= gamma >= 0");
    if (w0[k] < 0.0 || v0[k] < w0[k] - 1e-14)
      throw ConfigError("compare_evolutions: need v0 >= w0 >= 0");
  }
  const ReactionField field_v(g, grid, p);
  const ReactionField field_w = ReactionField::frozen(gamma, p);

  ComparisonReport rep;
  GridFunction v = v0, w = w0;
  double ev = energy_with_reaction(v, lambda, field_v);
  double ew = energy_with_reaction(w, lambda, field_w);
  double t = 0.0, dt = tc.dt_init;
  double deriv_v = std::numeric_limits<double>::infinity(), deriv_w = deriv_v;

  const auto scan = [&]() {
    for (std::size_t k = 0; k < v.size(); ++k) {
      rep.max_ordering_violation = std::max(rep.max_ordering_violation, w[k] - v[k]);
      rep.min_value_v = std::min(rep.min_value_v, v[k]);
    }
  };
  scan();

  const int max_steps = 200000;
  for (int steps = 0; steps < max_steps; ++steps) {
    if (t >= tc.horizon) break;
    StepAttempt av = attempt_step(v, ev, dt, lambda, field_v, sc);
    StepAttempt aw = attempt_step(w, ew, dt, lambda, field_w, sc);
    if (!(av.solved && av.accepted && aw.solved && aw.accepted)) {
      if (dt * 0.5 >= tc.dt_min) {
        dt *= 0.5;
        continue;
      }
      const bool v_hot = norm_sup(v) > 1e3;
      if (v_hot) break;  // v driving toward blow-up at dt_min; ordering held so far
      throw SolverError("compare_evolutions: joint step failure at dt_min", dt);
    }
    v = std::move(av.w);
    w = std::move(aw.w);
    ev = av.energy_next;
    ew = aw.energy_next;
    t += dt;
    deriv_v = av.step_l2 / dt;
    deriv_w = aw.step_l2 / dt;
    scan();

    const double sup_v = norm_sup(v), sup_w = norm_sup(w);
    if (sup_v > tc.blowup_threshold || sup_w > tc.blowup_threshold) {
      if (sup_v > tc.blowup_threshold) {
        rep.outcome_v = Outcome::BlewUp;
        rep.v_blew_up_no_later = true;
      }
      if (sup_w > tc.blowup_threshold) {
        rep.outcome_w = Outcome::BlewUp;
        if (sup_v <= tc.blowup_threshold) rep.v_blew_up_no_later = false;
      }
      break;
    }
    if (deriv_v < tc.stationarity_tol && deriv_w < tc.stationarity_tol) {
      rep.outcome_v = sup_v < kTrivialSup ? Outcome::Decayed : Outcome::ConvergedToEquilibrium;
      rep.outcome_w = sup_w < kTrivialSup ? Outcome::Decayed : Outcome::ConvergedToEquilibrium;
      break;
    }
    dt = std::min(dt * 2.0, tc.dt_max);
  }
  rep.t_end = t;
  return rep;
}

Outcome blowup_probe(const Weight& gamma, double lambda, const GridFunction& w0,
                     double p, const SolverControls& sc, const StepControls& tc) {
  if (norm_sup(w0) == 0.0) throw ConfigError("blowup_probe: w0 must be nonzero");
  const EigenResult eig = principal_eigenvalue(gamma, p, sc);
  const TrajectoryRecord rec = evolve_frozen(w0, lambda, gamma, p, sc, tc);
  if (lambda > eig.mu0 && rec.outcome != Outcome::BlewUp)
    throw IntegrityError("blowup_probe: lambda > mu0(gamma) but the run did not blow up");
  return rec.outcome;
}

InstabilityProbeResult trivial_instability_probe(double lambda, const Nonlinearity& g,
                                                 double p, double delta, const Grid& grid,
                                                 const SolverControls& sc,
                                                 const StepControls& tc) {
  if (!(delta > 0.0)) throw ConfigError("trivial_instability_probe: delta must be positive");
  const EigenResult eig_delta =
      principal_eigenvalue(weight_from_g(g, grid, delta), p, sc);
  if (!(lambda > eig_delta.mu0))
    throw ConfigError("trivial_instability_probe: lambda <= mu0(g_delta); "
                      "use a smaller delta (requires lambda > lambda_min)");
  const EigenResult mode = principal_eigenvalue(weight_g0(g, grid), p, sc);

  GridFunction v0 = mode.psi0;
  for (std::size_t k = 0; k < v0.size(); ++k) v0[k] *= 0.25 * delta;

  // starting from O(delta) data the reaction rate is O(delta^{p-1}); the
  // stationarity detector and solver must resolve motion at that scale
  const double rate_scale = lambda * std::pow(0.25 * delta, p - 1.0);
  StepControls probe_tc = tc;
  probe_tc.stationarity_tol = std::min(tc.stationarity_tol, 1e-3 * rate_scale);
  SolverControls probe_sc = sc;
  probe_sc.tol_residual = std::min(sc.tol_residual, 1e-4 * rate_scale);

  InstabilityProbeResult out;
  out.mu0_g_delta = eig_delta.mu0;
  out.record = evolve(v0, lambda, g, p, probe_sc, probe_tc);
  for (const TrajectorySample& s : out.record.samples) {
    if (s.sup_norm > delta) {
      out.escaped = true;
      out.escape_time = s.t;
      break;
    }
  }
  return out;
}

}  // namespace plapflow
