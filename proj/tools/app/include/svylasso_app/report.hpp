#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <svylasso/sampling.hpp>

#include "svylasso_app/commands.hpp"

namespace svylasso::app {

nlohmann::json fit_to_json(const FitOutcome& outcome);

/// Row label of a study hypothesis, e.g. "coef[x1]=1".
std::string hypothesis_label(Hypothesis h, const SimulationConfig& cfg);

/// Tests × p grid per hypothesis block; cells are rejection percentages
/// among replications where the test was computed ("-" when not evaluated).
void write_rejection_csv(std::ostream& out, const std::vector<RejectionTable>& tables);

/// One row per (p, hypothesis, test) with the raw counts behind each rate.
void write_diagnostics_csv(std::ostream& out, const std::vector<RejectionTable>& tables);

nlohmann::json study_to_json(const std::vector<RejectionTable>& tables);

}  // namespace svylasso::app
