#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "plapflow/csv.hpp"
#include "plapflow/trichotomy.hpp"

namespace py = pybind11;
using namespace plapflow;

PYBIND11_MODULE(_plapflow, m) {
  m.doc() = "p-Laplacian gradient flows: eigenvalues, equilibrium branches, and "
            "the decay/converge/blow-up trichotomy on (0,1) and (0,1)^2";

  py::register_exception<ConfigError>(m, "ConfigError");
  py::register_exception<SolverError>(m, "SolverError");
  py::register_exception<IntegrityError>(m, "IntegrityError");

  py::class_<Grid>(m, "Grid")
      .def_property_readonly("dim", &Grid::dim)
      .def("n", &Grid::n, py::arg("axis") = 0)
      .def("h", &Grid::h, py::arg("axis") = 0)
      .def_property_readonly("num_nodes", &Grid::num_nodes)
      .def("coord", [](const Grid& g, std::size_t k) {
        const Point p = g.coord(k);
        return std::make_pair(p.x, p.y);
      });
  m.def("build_grid", &build_grid, py::arg("dim"), py::arg("n_per_axis"));

  py::class_<GridFunction>(m, "GridFunction")
      .def(py::init<const Grid&, double>(), py::arg("grid"), py::arg("fill") = 0.0)
      .def(py::init<const Grid&, std::vector<double>>(), py::arg("grid"),
           py::arg("values"))
      .def_property_readonly("grid", &GridFunction::grid)
      .def("values",
           [](const GridFunction& f) { return f.values(); })
      .def("__len__", &GridFunction::size)
      .def("__getitem__",
           [](const GridFunction& f, std::size_t k) { return f[k]; });

  m.def("norm_sup", &norm_sup);
  m.def("norm_Lq", &norm_Lq, py::arg("f"), py::arg("q"));
  m.def("seminorm_grad_p", &seminorm_grad_p, py::arg("f"), py::arg("p"));
  m.def("phi_p", &phi_p, py::arg("s"), py::arg("p"));

  py::class_<Nonlinearity>(m, "Nonlinearity")
      .def_static("one_plus_exp", &Nonlinearity::one_plus_exp, py::arg("a"),
                  py::arg("b"), py::arg("c"))
      .def_static("power_decay", &Nonlinearity::power_decay, py::arg("a"), py::arg("b"),
                  py::arg("c"))
      .def("g", [](const Nonlinearity& g, double x, double xi) {
        return g.g(Point{x, 0.0}, xi);
      })
      .def("g0", [](const Nonlinearity& g) { return g.g0(Point{}); })
      .def("ginf", [](const Nonlinearity& g) { return g.ginf(Point{}); })
      .def("F", [](const Nonlinearity& g, double xi, double p) {
        return g.F(Point{}, xi, p);
      })
      .def_property_readonly("name", &Nonlinearity::name);

  py::class_<SolverControls>(m, "SolverControls")
      .def(py::init<>())
      .def_readwrite("tol_residual", &SolverControls::tol_residual)
      .def_readwrite("max_iter", &SolverControls::max_iter)
      .def_readwrite("damping", &SolverControls::damping)
      .def_readwrite("eps_jacobian", &SolverControls::eps_jacobian);

  py::class_<StepControls>(m, "StepControls")
      .def(py::init<>())
      .def_readwrite("dt_init", &StepControls::dt_init)
      .def_readwrite("dt_min", &StepControls::dt_min)
      .def_readwrite("dt_max", &StepControls::dt_max)
      .def_readwrite("blowup_threshold", &StepControls::blowup_threshold)
      .def_readwrite("horizon", &StepControls::horizon)
      .def_readwrite("stationarity_tol", &StepControls::stationarity_tol);

  m.def("apply_p_laplacian", &apply_p_laplacian, py::arg("f"), py::arg("p"));
  m.def(
      "solve_p_poisson",
      [](const GridFunction& rhs, double p, const SolverControls& sc) {
        return solve_p_poisson(rhs, p, sc);
      },
      py::arg("rhs"), py::arg("p"), py::arg("controls") = SolverControls());
  m.def("big_F", &big_F, py::arg("g"), py::arg("f"), py::arg("p"));
  m.def("energy", &energy, py::arg("f"), py::arg("lam"), py::arg("g"), py::arg("p"));

  py::class_<Weight>(m, "Weight").def(py::init<GridFunction>());
  m.def("unit_weight", &unit_weight);
  m.def("weight_g0", &weight_g0);
  m.def("weight_ginf", &weight_ginf);
  m.def("weight_from_g", &weight_from_g, py::arg("g"), py::arg("grid"), py::arg("delta"));
  m.def("sine_profile", &sine_profile);
  m.def("random_positive", &random_positive, py::arg("grid"), py::arg("seed"));

  py::class_<EigenResult>(m, "EigenResult")
      .def_readonly("mu0", &EigenResult::mu0)
      .def_readonly("psi0", &EigenResult::psi0)
      .def_readonly("residual", &EigenResult::residual)
      .def_readonly("iterations", &EigenResult::iterations);
  py::class_<Thresholds>(m, "Thresholds")
      .def_readonly("lambda_min", &Thresholds::lambda_min)
      .def_readonly("lambda_max", &Thresholds::lambda_max)
      .def("lambda_max_finite", &Thresholds::lambda_max_finite);
  py::class_<ThresholdsResult>(m, "ThresholdsResult")
      .def_readonly("thresholds", &ThresholdsResult::thresholds)
      .def_readonly("mode_min", &ThresholdsResult::mode_min)
      .def_readonly("mode_max", &ThresholdsResult::mode_max);

  m.def("rayleigh_quotient", &rayleigh_quotient, py::arg("w"), py::arg("rho"),
        py::arg("p"));
  m.def(
      "principal_eigenvalue",
      [](const Weight& rho, double p, const SolverControls& sc) {
        return principal_eigenvalue(rho, p, sc);
      },
      py::arg("rho"), py::arg("p"), py::arg("controls") = SolverControls());
  m.def(
      "thresholds",
      [](const Nonlinearity& g, double p, const Grid& grid, const SolverControls& sc) {
        return thresholds(g, p, grid, sc);
      },
      py::arg("g"), py::arg("p"), py::arg("grid"),
      py::arg("controls") = SolverControls());
  m.def(
      "compute_thresholds",
      [](const Nonlinearity& g, double p, const Grid& grid, const SolverControls& sc) {
        return compute_thresholds(g, p, grid, sc);
      },
      py::arg("g"), py::arg("p"), py::arg("grid"),
      py::arg("controls") = SolverControls());

  py::enum_<EquilibriumClass>(m, "EquilibriumClass")
      .value("trivial", EquilibriumClass::Trivial)
      .value("nontrivial", EquilibriumClass::Nontrivial);
  py::class_<EquilibriumResult>(m, "EquilibriumResult")
      .def_readonly("lam", &EquilibriumResult::lambda)
      .def_readonly("u", &EquilibriumResult::u)
      .def_readonly("residual", &EquilibriumResult::residual)
      .def_readonly("iterations", &EquilibriumResult::iterations)
      .def_readonly("classification", &EquilibriumResult::classification);
  py::class_<BranchSample>(m, "BranchSample")
      .def_readonly("lam", &BranchSample::lambda)
      .def_readonly("seminorm", &BranchSample::seminorm)
      .def_readonly("sup", &BranchSample::sup)
      .def_readonly("residual", &BranchSample::residual)
      .def_readonly("iterations", &BranchSample::iterations);
  py::class_<BranchResult>(m, "BranchResult")
      .def_readonly("samples", &BranchResult::samples)
      .def_readonly("thresholds", &BranchResult::thresholds)
      .def_readonly("escaped", &BranchResult::escaped)
      .def_readonly("escape_lambda", &BranchResult::escape_lambda);

  m.def(
      "solve_equilibrium",
      [](double lam, const Nonlinearity& g, double p, const GridFunction& init,
         const SolverControls& sc) { return solve_equilibrium(lam, g, p, init, sc); },
      py::arg("lam"), py::arg("g"), py::arg("p"), py::arg("init"),
      py::arg("controls") = SolverControls());
  m.def(
      "verify_uniqueness",
      [](double lam, const Nonlinearity& g, double p,
         const std::vector<GridFunction>& starts, const SolverControls& sc) {
        return verify_uniqueness(lam, g, p, starts, sc);
      },
      py::arg("lam"), py::arg("g"), py::arg("p"), py::arg("starts"),
      py::arg("controls") = SolverControls());
  m.def(
      "trace_branch",
      [](const Nonlinearity& g, double p, const Grid& grid,
         const std::vector<double>& schedule, const SolverControls& sc) {
        return trace_branch(g, p, grid, schedule, sc);
      },
      py::arg("g"), py::arg("p"), py::arg("grid"), py::arg("schedule"),
      py::arg("controls") = SolverControls());
  m.def("default_branch_schedule", &default_branch_schedule, py::arg("thresholds"),
        py::arg("count") = 24);

  py::enum_<Outcome>(m, "Outcome")
      .value("decayed", Outcome::Decayed)
      .value("converged_to_equilibrium", Outcome::ConvergedToEquilibrium)
      .value("blew_up", Outcome::BlewUp)
      .value("horizon_reached", Outcome::HorizonReached);
  py::class_<TrajectorySample>(m, "TrajectorySample")
      .def_readonly("t", &TrajectorySample::t)
      .def_readonly("sup_norm", &TrajectorySample::sup_norm)
      .def_readonly("grad_p_seminorm", &TrajectorySample::grad_p_seminorm)
      .def_readonly("energy", &TrajectorySample::energy)
      .def_readonly("dt", &TrajectorySample::dt);
  py::class_<TrajectoryRecord>(m, "TrajectoryRecord")
      .def_readonly("samples", &TrajectoryRecord::samples)
      .def_readonly("outcome", &TrajectoryRecord::outcome)
      .def_readonly("t_estimate", &TrajectoryRecord::t_estimate)
      .def_readonly("dt_history", &TrajectoryRecord::dt_history)
      .def_readonly("final_state", &TrajectoryRecord::final_state);
  py::class_<ComparisonReport>(m, "ComparisonReport")
      .def_readonly("max_ordering_violation", &ComparisonReport::max_ordering_violation)
      .def_readonly("min_value_v", &ComparisonReport::min_value_v)
      .def_readonly("v_blew_up_no_later", &ComparisonReport::v_blew_up_no_later)
      .def_readonly("outcome_v", &ComparisonReport::outcome_v)
      .def_readonly("outcome_w", &ComparisonReport::outcome_w)
      .def_readonly("t_end", &ComparisonReport::t_end);
  py::class_<InstabilityProbeResult>(m, "InstabilityProbeResult")
      .def_readonly("escaped", &InstabilityProbeResult::escaped)
      .def_readonly("escape_time", &InstabilityProbeResult::escape_time)
      .def_readonly("mu0_g_delta", &InstabilityProbeResult::mu0_g_delta)
      .def_readonly("record", &InstabilityProbeResult::record);

  m.def(
      "step_implicit",
      [](const GridFunction& v, double dt, double lam, const Nonlinearity& g, double p,
         const SolverControls& sc) { return step_implicit(v, dt, lam, g, p, sc); },
      py::arg("v"), py::arg("dt"), py::arg("lam"), py::arg("g"), py::arg("p"),
      py::arg("controls") = SolverControls());
  m.def(
      "evolve",
      [](const GridFunction& v0, double lam, const Nonlinearity& g, double p,
         const SolverControls& sc, const StepControls& tc) {
        return evolve(v0, lam, g, p, sc, tc);
      },
      py::arg("v0"), py::arg("lam"), py::arg("g"), py::arg("p"),
      py::arg("controls") = SolverControls(),
      py::arg("step_controls") = StepControls());
  m.def(
      "evolve_frozen",
      [](const GridFunction& w0, double lam, const Weight& gamma, double p,
         const SolverControls& sc, const StepControls& tc) {
        return evolve_frozen(w0, lam, gamma, p, sc, tc);
      },
      py::arg("w0"), py::arg("lam"), py::arg("gamma"), py::arg("p"),
      py::arg("controls") = SolverControls(),
      py::arg("step_controls") = StepControls());
  m.def(
      "classify_asymptotics",
      [](const TrajectoryRecord& rec, const GridFunction* cand, double tol) {
        return classify_asymptotics(rec, cand, tol);
      },
      py::arg("record"), py::arg("e_candidate") = nullptr,
      py::arg("dist_tol") = 1e-5);
  m.def(
      "compare_evolutions",
      [](const GridFunction& v0, const GridFunction& w0, const GridFunction& gamma,
         double lam, const Nonlinearity& g, double p, const SolverControls& sc,
         const StepControls& tc) {
        return compare_evolutions(v0, w0, gamma, lam, g, p, sc, tc);
      },
      py::arg("v0"), py::arg("w0"), py::arg("gamma"), py::arg("lam"), py::arg("g"),
      py::arg("p"), py::arg("controls") = SolverControls(),
      py::arg("step_controls") = StepControls());
  m.def(
      "blowup_probe",
      [](const Weight& gamma, double lam, const GridFunction& w0, double p,
         const SolverControls& sc, const StepControls& tc) {
        return blowup_probe(gamma, lam, w0, p, sc, tc);
      },
      py::arg("gamma"), py::arg("lam"), py::arg("w0"), py::arg("p"),
      py::arg("controls") = SolverControls(),
      py::arg("step_controls") = StepControls());
  m.def(
      "trivial_instability_probe",
      [](double lam, const Nonlinearity& g, double p, double delta, const Grid& grid,
         const SolverControls& sc, const StepControls& tc) {
        return trivial_instability_probe(lam, g, p, delta, grid, sc, tc);
      },
      py::arg("lam"), py::arg("g"), py::arg("p"), py::arg("delta"), py::arg("grid"),
      py::arg("controls") = SolverControls(),
      py::arg("step_controls") = StepControls());

  py::class_<TrichotomyRow>(m, "TrichotomyRow")
      .def_readonly("regime", &TrichotomyRow::regime)
      .def_readonly("lam", &TrichotomyRow::lambda)
      .def_readonly("applicable", &TrichotomyRow::applicable)
      .def_readonly("outcome", &TrichotomyRow::outcome)
      .def_readonly("final_sup", &TrichotomyRow::final_sup)
      .def_readonly("final_seminorm", &TrichotomyRow::final_seminorm)
      .def_readonly("t_estimate", &TrichotomyRow::t_estimate)
      .def_readonly("equilibrium_dist", &TrichotomyRow::equilibrium_dist)
      .def_readonly("passed", &TrichotomyRow::pass);
  py::class_<TrichotomyReport>(m, "TrichotomyReport")
      .def_readonly("thresholds", &TrichotomyReport::thresholds)
      .def_readonly("rows", &TrichotomyReport::rows)
      .def_readonly("passed", &TrichotomyReport::pass);
  py::class_<ExperimentConfig>(m, "ExperimentConfig");
  m.def("parse_config", &parse_config, py::arg("text"));
  m.def("run_trichotomy", &run_trichotomy, py::arg("config"));
  m.def("render_text", &render_text, py::arg("report"));

  m.def("emit_trajectory_csv",
        [](const TrajectoryRecord& r, const std::string& path) { emit_csv(r, path); });
  m.def("emit_branch_csv",
        [](const BranchResult& r, const std::string& path) { emit_csv(r, path); });
  m.def("emit_trichotomy_csv",
        [](const TrichotomyReport& r, const std::string& path) { emit_csv(r, path); });
}
