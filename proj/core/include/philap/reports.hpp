#pragma once

#include "philap/config.hpp"
#include "philap/theorems.hpp"

namespace philap {

// Structured text report of every derived constant with its error bound or
// method tag, plus the R-curve table over the m-grid.
std::string render_constants_report(const ProblemInstance& inst, const Config& cfg);

// Certificates: regime classification, thresholds, windows with witnesses,
// nonexistence bounds, and shell-check outcomes at each window midpoint.
std::string render_certify_report(const ProblemInstance& inst, const Config& cfg);

std::string render_branch_csv(const Branch& br);
std::string render_solutions_index_csv(const std::vector<Solution>& sols);

}  // namespace philap
