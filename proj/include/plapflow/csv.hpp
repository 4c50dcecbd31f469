#pragma once

#include <string>
#include <vector>

#include "plapflow/dynamics.hpp"
#include "plapflow/equilibria.hpp"

namespace plapflow {

struct TrichotomyReport;  // trichotomy.hpp

/// Shortest-round-trip decimal with 17 significant digits, '.' separator,
/// locale independent.
std::string format_double(double x);

void emit_csv(const TrajectoryRecord& record, const std::string& path);
void emit_csv(const BranchResult& branch, const std::string& path);
void emit_csv(const EigenResult& eigen, const std::string& path, bool include_psi = false);
void emit_csv(const TrichotomyReport& report, const std::string& path);

/// Numeric CSV reader for round-trips and v0=file specs; skips the header row.
std::vector<std::vector<double>> read_csv(const std::string& path);

}  // namespace plapflow
