#pragma once

#include <string>
#include <vector>

#include "plapflow/config.hpp"

namespace plapflow {

struct TrichotomyRow {
  std::string regime;   // below_lambda_min | between | above_lambda_max
  double lambda = 0.0;
  bool applicable = true;
  Outcome outcome = Outcome::HorizonReached;
  double final_sup = 0.0;
  double final_seminorm = 0.0;
  double t_estimate = 0.0;       // blow-up only
  double equilibrium_dist = 0.0; // sup-distance to the separately solved e_lambda (mid row)
  bool pass = false;
};

struct TrichotomyReport {
  Thresholds thresholds;
  std::vector<TrichotomyRow> rows;
  bool pass = false;  // all applicable parts in regime order
};

/// Computes thresholds, evolves a common v0 at 0.5*lambda_min, mid, and
/// 1.5*lambda_max (the last skipped when lambda_max is infinite), classifies,
/// and checks the regime outcomes. An explicit numeric lambda in the config
/// replaces the mid-regime value.
TrichotomyReport run_trichotomy(const ExperimentConfig& config);

std::string render_text(const TrichotomyReport& report);

}  // namespace plapflow
