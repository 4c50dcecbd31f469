#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "plapflow/dynamics.hpp"
#include "plapflow/equilibria.hpp"

namespace plapflow {

struct LambdaSpec {
  enum class Kind { Numeric, TimesLambdaMin, TimesLambdaMax, Mid };
  Kind kind = Kind::Mid;
  double value = 0.0;  // the literal, or the multiplier for the symbolic kinds

  // Needs the same-run thresholds; symbolic specs are never resolved against
  // cached values from another grid.
  double resolve(const Thresholds& th) const;
};

struct InitSpec {
  enum class Kind { EpsPsiMin, RandomPositive, File };
  Kind kind = Kind::EpsPsiMin;
  double eps = 0.5;
  std::uint64_t seed = 0;
  std::string path;
};

struct ExperimentConfig {
  int dim = 1;
  std::vector<int> n = {255};
  double p = 3.0;
  Nonlinearity g = Nonlinearity::one_plus_exp(1.0, 1.0, 1.0);
  LambdaSpec lambda;
  InitSpec v0;
  InitSpec w0{InitSpec::Kind::EpsPsiMin, 0.25, 0, ""};  // comparison runs
  SolverControls solver;
  StepControls step;
  std::string out_path;
  std::string weight_spec = "one";      // eigen / blow-up probe weight
  std::string schedule_spec = "geometric:24";
  double delta = 0.01;                  // instability probe level
  double gamma_scale = 1.0;             // comparison runs: gamma = scale * ginf

  Grid make_grid() const { return build_grid(dim, n); }
  void validate() const;
};

/// key=value per line, '#' starts a comment. Unknown keys are rejected with a
/// message naming the key; invariant violations name the constraint.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig config_from_map(const std::map<std::string, std::string>& kv);
std::map<std::string, std::string> parse_key_values(const std::string& text);

/// Deterministic nodewise-uniform positive initial data in [0.05, 1.05).
GridFunction random_positive(const Grid& grid, std::uint64_t seed);

/// Resolves an InitSpec; psi_min is the principal eigenfunction of weight g0.
GridFunction resolve_initial_data(const InitSpec& spec, const Grid& grid,
                                  const GridFunction& psi_min);

double parse_double(const std::string& s, const std::string& what);

}  // namespace plapflow
