// Command-line driver: eigen / equilibrium / branch / evolve / compare /
// trichotomy subcommands over key=value configs with flag overrides.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "plapflow/csv.hpp"
#include "plapflow/trichotomy.hpp"

namespace {

using namespace plapflow;

const char* kConfigKeys[] = {
    "dim", "n", "p", "g", "lambda", "v0", "w0", "tol_residual", "max_iter",
    "damping", "eps_jacobian", "dt_init", "dt_min", "dt_max", "blowup_threshold",
    "T", "stationarity_tol", "out", "weight", "schedule", "delta", "gamma_scale"};

struct CommandState {
  std::string config_path;
  std::map<std::string, std::string> overrides;
  bool emit_psi = false;
};

void attach_common(CLI::App* cmd, CommandState& st) {
  cmd->add_option("--config", st.config_path, "key=value config file");
  for (const char* key : kConfigKeys) {
    const std::string name = std::string("--") + key;
    cmd->add_option_function<std::string>(
        name, [&st, key](const std::string& v) { st.overrides[key] = v; },
        std::string("overrides config key '") + key + "'");
  }
}

std::map<std::string, std::string> merged_map(const CommandState& st) {
  std::map<std::string, std::string> kv;
  if (!st.config_path.empty()) {
    std::ifstream in(st.config_path);
    if (!in) throw ConfigError("cannot open config file '" + st.config_path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    kv = parse_key_values(buf.str());
  }
  for (const auto& [k, v] : st.overrides) kv[k] = v;
  return kv;
}

std::string resolve_out(const std::string& path) {
  if (path.empty() || path.front() == '/') return path;
  const char* dir = std::getenv("PLAPFLOW_OUT");
  if (dir == nullptr || dir[0] == '\0') return path;
  return std::string(dir) + "/" + path;
}

Weight resolve_weight(const ExperimentConfig& cfg, const Grid& grid) {
  const std::string& spec = cfg.weight_spec;
  if (spec == "one") return unit_weight(grid);
  if (spec == "g0") return weight_g0(cfg.g, grid);
  if (spec == "ginf") return weight_ginf(cfg.g, grid);
  if (spec.rfind("g_delta:", 0) == 0)
    return weight_from_g(cfg.g, grid, parse_double(spec.substr(8), "weight g_delta"));
  if (spec.rfind("file:", 0) == 0) {
    const auto rows = read_csv(spec.substr(5));
    if (rows.size() != grid.num_nodes())
      throw ConfigError("weight file: row count does not match grid node count");
    GridFunction w(grid);
    for (std::size_t k = 0; k < rows.size(); ++k) {
      if (rows[k].empty()) throw ConfigError("weight file: empty row");
      w[k] = rows[k].back();
    }
    return Weight(std::move(w));
  }
  throw ConfigError("unknown weight spec '" + spec + "'");
}

std::vector<double> resolve_schedule(const ExperimentConfig& cfg, const Thresholds& th) {
  const std::string& spec = cfg.schedule_spec;
  if (spec.rfind("geometric", 0) == 0) {
    int count = 24;
    const auto colon = spec.find(':');
    if (colon != std::string::npos)
      count = static_cast<int>(parse_double(spec.substr(colon + 1), "schedule count"));
    return default_branch_schedule(th, count);
  }
  std::vector<double> sched;
  std::string s = spec;
  for (char& ch : s)
    if (ch == ',') ch = ' ';
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) sched.push_back(parse_double(tok, "schedule"));
  if (sched.empty()) throw ConfigError("schedule: no lambda values given");
  return sched;
}

int cmd_eigen(const CommandState& st) {
  auto kv = merged_map(st);
  // raw spectral query; p = 2 is allowed here as the linear cross-check
  std::string p_str;
  if (auto it = kv.find("p"); it != kv.end()) {
    p_str = it->second;
    kv.erase(it);
  }
  ExperimentConfig cfg = config_from_map(kv);
  if (!p_str.empty()) cfg.p = parse_double(p_str, "p");
  if (!(cfg.p >= 2.0)) throw ConfigError("eigen: p must be at least 2");
  const Grid grid = cfg.make_grid();
  const EigenResult eig = principal_eigenvalue(resolve_weight(cfg, grid), cfg.p, cfg.solver);
  std::cout << "mu0 = " << format_double(eig.mu0) << "\nresidual = "
            << format_double(eig.residual) << "\niterations = " << eig.iterations << "\n";
  const std::string out = resolve_out(cfg.out_path);
  if (!out.empty()) emit_csv(eig, out, st.emit_psi);
  return 0;
}

int cmd_equilibrium(const CommandState& st) {
  const ExperimentConfig cfg = config_from_map(merged_map(st));
  const Grid grid = cfg.make_grid();
  const ThresholdsResult thr = compute_thresholds(cfg.g, cfg.p, grid, cfg.solver);
  const double lambda = cfg.lambda.resolve(thr.thresholds);
  const GridFunction init = resolve_initial_data(cfg.v0, grid, thr.mode_min.psi0);
  const EquilibriumResult eq = solve_equilibrium(lambda, cfg.g, cfg.p, init, cfg.solver);
  std::cout << "lambda = " << format_double(lambda) << "\nclassification = "
            << (eq.classification == EquilibriumClass::Nontrivial ? "nontrivial" : "trivial")
            << "\nsup = " << format_double(norm_sup(eq.u)) << "\nseminorm = "
            << format_double(seminorm_grad_p(eq.u, cfg.p)) << "\nresidual = "
            << format_double(eq.residual) << "\niterations = " << eq.iterations << "\n";
  const std::string out = resolve_out(cfg.out_path);
  if (!out.empty()) {
    BranchResult row;
    row.thresholds = thr.thresholds;
    row.samples.push_back({lambda, seminorm_grad_p(eq.u, cfg.p), norm_sup(eq.u),
                           eq.residual, eq.iterations});
    emit_csv(row, out);
  }
  return 0;
}

int cmd_branch(const CommandState& st) {
  const ExperimentConfig cfg = config_from_map(merged_map(st));
  const Grid grid = cfg.make_grid();
  const Thresholds th = thresholds(cfg.g, cfg.p, grid, cfg.solver);
  const BranchResult br = trace_branch(cfg.g, cfg.p, grid, resolve_schedule(cfg, th),
                                       cfg.solver);
  std::cout << "samples = " << br.samples.size();
  if (br.escaped)
    std::cout << " (escaped at lambda = " << format_double(br.escape_lambda) << ")";
  std::cout << "\n";
  const std::string out = resolve_out(cfg.out_path);
  if (!out.empty()) emit_csv(br, out);
  return 0;
}

int cmd_evolve(const CommandState& st) {
  const ExperimentConfig cfg = config_from_map(merged_map(st));
  const Grid grid = cfg.make_grid();
  const ThresholdsResult thr = compute_thresholds(cfg.g, cfg.p, grid, cfg.solver);
  const double lambda = cfg.lambda.resolve(thr.thresholds);
  const GridFunction v0 = resolve_initial_data(cfg.v0, grid, thr.mode_min.psi0);
  const TrajectoryRecord rec = evolve(v0, lambda, cfg.g, cfg.p, cfg.solver, cfg.step);
  std::cout << "outcome = " << to_string(rec.outcome) << "\nt_end = "
            << format_double(rec.samples.back().t) << "\nsup = "
            << format_double(rec.samples.back().sup_norm) << "\n";
  if (rec.outcome == Outcome::BlewUp)
    std::cout << "t_estimate = " << format_double(rec.t_estimate) << "\n";
  const std::string out = resolve_out(cfg.out_path);
  if (!out.empty()) emit_csv(rec, out);
  return 0;
}

int cmd_compare(const CommandState& st) {
  const ExperimentConfig cfg = config_from_map(merged_map(st));
  const Grid grid = cfg.make_grid();
  const ThresholdsResult thr = compute_thresholds(cfg.g, cfg.p, grid, cfg.solver);
  const double lambda = cfg.lambda.resolve(thr.thresholds);
  const GridFunction v0 = resolve_initial_data(cfg.v0, grid, thr.mode_min.psi0);
  const GridFunction w0 = resolve_initial_data(cfg.w0, grid, thr.mode_min.psi0);
  GridFunction gamma = sample(grid, [&](const Point& x) {
    return cfg.gamma_scale * cfg.g.ginf(x);
  });
  const ComparisonReport rep =
      compare_evolutions(v0, w0, gamma, lambda, cfg.g, cfg.p, cfg.solver, cfg.step);
  std::cout << "max_ordering_violation = " << format_double(rep.max_ordering_violation)
            << "\nmin_value_v = " << format_double(rep.min_value_v)
            << "\nv_blew_up_no_later = " << (rep.v_blew_up_no_later ? "yes" : "no")
            << "\noutcome_v = " << to_string(rep.outcome_v)
            << "\noutcome_w = " << to_string(rep.outcome_w) << "\nt_end = "
            << format_double(rep.t_end) << "\n";
  return 0;
}

int cmd_trichotomy(const CommandState& st) {
  const ExperimentConfig cfg = config_from_map(merged_map(st));
  const TrichotomyReport rep = run_trichotomy(cfg);
  std::cout << render_text(rep);
  const std::string out = resolve_out(cfg.out_path);
  if (!out.empty()) emit_csv(rep, out);
  return rep.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"p-Laplacian gradient-flow experiments: eigenvalues, equilibria, "
               "branches, dynamics, and the stability trichotomy"};
  app.require_subcommand(1);

  CommandState st;
  auto* eigen = app.add_subcommand("eigen", "principal eigenvalue of -Delta_p with a weight");
  eigen->add_flag("--psi", st.emit_psi, "also emit the eigenfunction CSV");
  auto* equilibrium = app.add_subcommand("equilibrium", "solve the equilibrium at one lambda");
  auto* branch = app.add_subcommand("branch", "trace the equilibrium branch over a schedule");
  auto* evolve_cmd = app.add_subcommand("evolve", "integrate the gradient flow");
  auto* compare = app.add_subcommand("compare", "comparison run against a frozen weight");
  auto* trichotomy = app.add_subcommand("trichotomy", "full decay/converge/blow-up reproduction");
  for (CLI::App* cmd : {eigen, equilibrium, branch, evolve_cmd, compare, trichotomy})
    attach_common(cmd, st);

  CLI11_PARSE(app, argc, argv);

  try {
    if (eigen->parsed()) return cmd_eigen(st);
    if (equilibrium->parsed()) return cmd_equilibrium(st);
    if (branch->parsed()) return cmd_branch(st);
    if (evolve_cmd->parsed()) return cmd_evolve(st);
    if (compare->parsed()) return cmd_compare(st);
    if (trichotomy->parsed()) return cmd_trichotomy(st);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what()
              << " (last residual " << e.last_residual << ")\n";
    return 2;
  } catch (const IntegrityError& e) {
    std::cerr << "integrity failure: " << e.what() << "\n";
    return 1;
  }
  return 3;
}
