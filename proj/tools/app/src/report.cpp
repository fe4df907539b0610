#include "svylasso_app/report.hpp"

#include <ostream>

#include "svylasso_app/csv.hpp"

namespace svylasso::app {

namespace {

constexpr std::array<Hypothesis, 2> kHypotheses = {Hypothesis::coefficient, Hypothesis::ame};

const char* scheme_name(SchemeKind k) { return k == SchemeKind::standard ? "standard" : "exogenous"; }

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

nlohmann::json config_json(const SimulationConfig& c) {
  // Worker count is left out so the file does not depend on it.
  return {{"scheme", scheme_name(c.scheme)},
          {"n_s", c.per_stratum},
          {"n", 4 * c.per_stratum},
          {"p", c.p},
          {"population", c.population_size},
          {"prob", c.prob},
          {"replications", c.replications},
          {"level", c.level},
          {"seed", c.seed},
          {"lambda", c.cross_validate ? nlohmann::json("cv") : nlohmann::json(c.fixed_lambda)},
          {"cv_folds", c.cv_folds},
          {"cv_rule", c.cv_rule == CvRule::best ? "min" : "1se"},
          {"test_column", c.test_column},
          {"coefficient_null", c.coefficient_null},
          {"ame_null", c.ame_null},
          {"regenerate_population", c.regenerate_population},
          {"mle_iterations", c.mle_iterations}};
}

}  // namespace

nlohmann::json fit_to_json(const FitOutcome& o) {
  nlohmann::json j;
  j["n"] = o.data.n();
  j["p"] = o.data.p();
  j["names"] = o.data.names;
  j["lambda"] = o.fit.lambda;
  j["theta"] = to_std(o.fit.theta);
  j["active"] = o.fit.active;
  j["signs"] = o.fit.signs;
  j["iterations"] = o.fit.iterations;
  j["converged"] = o.fit.converged;
  j["kkt"] = {{"satisfied", o.kkt.satisfied},
              {"intercept_residual", o.kkt.intercept_residual},
              {"max_active_residual", o.kkt.max_active_residual},
              {"max_inactive_excess", o.kkt.max_inactive_excess}};
  if (o.cv) {
    const CvResult& cv = *o.cv;
    j["cv"] = {{"rule", cv.chosen_index == cv.best_index ? "min" : "1se"},
               {"lambda_min", cv.grid[cv.best_index]},
               {"lambda_1se", cv.grid[cv.one_se_index]},
               {"grid", cv.grid},
               {"mean_auc", cv.mean_score},
               {"std_error", cv.std_error},
               {"redraws", cv.redraws}};
  }
  return j;
}

std::string hypothesis_label(Hypothesis h, const SimulationConfig& cfg) {
  const std::string var = "x" + std::to_string(cfg.test_column);
  if (h == Hypothesis::coefficient) return "coef[" + var + "]=" + format_number(cfg.coefficient_null);
  return "AME[" + var + "]=" + format_number(cfg.ame_null);
}

void write_rejection_csv(std::ostream& out, const std::vector<RejectionTable>& tables) {
  std::vector<std::string> header{"hypothesis", "test"};
  for (const auto& t : tables) header.push_back("p=" + std::to_string(t.config.p));
  std::vector<std::vector<std::string>> rows;
  if (!tables.empty()) {
    for (const Hypothesis h : kHypotheses) {
      for (const Method m : kStudyMethods) {
        std::vector<std::string> row{hypothesis_label(h, tables.front().config), std::string(method_name(m))};
        for (const auto& t : tables) {
          row.push_back(RejectionTable::evaluated(h, m) ? format_number(t.at(h, m).rate()) : "-");
        }
        rows.push_back(std::move(row));
      }
    }
  }
  write_csv(out, header, rows);
}

void write_diagnostics_csv(std::ostream& out, const std::vector<RejectionTable>& tables) {
  const std::vector<std::string> header{"p", "hypothesis", "test", "replications", "rejections", "applicable",
                                        "not_applicable", "failures", "pinv", "rate", "rate_all"};
  std::vector<std::vector<std::string>> rows;
  for (const auto& t : tables) {
    for (const Hypothesis h : kHypotheses) {
      for (const Method m : kStudyMethods) {
        if (!RejectionTable::evaluated(h, m)) continue;
        const TestTally& c = t.at(h, m);
        rows.push_back({std::to_string(t.config.p), hypothesis_label(h, t.config), std::string(method_name(m)),
                        std::to_string(t.replications), std::to_string(c.rejections), std::to_string(c.applicable),
                        std::to_string(c.not_applicable), std::to_string(c.failures), std::to_string(c.pinv),
                        format_number(c.rate()), format_number(c.rate_all(t.replications))});
      }
    }
  }
  write_csv(out, header, rows);
}

nlohmann::json study_to_json(const std::vector<RejectionTable>& tables) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& t : tables) {
    nlohmann::json j;
    j["config"] = config_json(t.config);
    j["replications"] = t.replications;
    j["replication_failures"] = t.replication_failures;
    j["kkt_violations"] = t.kkt_violations;
    j["lasso_nonconverged"] = t.lasso_nonconverged;
    j["mle_nonconverged"] = t.mle_nonconverged;
    j["empty_selections"] = t.empty_selections;
    nlohmann::json rates;
    for (const Hypothesis h : kHypotheses) {
      nlohmann::json block;
      for (const Method m : kStudyMethods) {
        if (!RejectionTable::evaluated(h, m)) continue;
        const TestTally& c = t.at(h, m);
        block[std::string(method_name(m))] = {{"rate", c.rate()},
                                              {"rejections", c.rejections},
                                              {"applicable", c.applicable},
                                              {"not_applicable", c.not_applicable},
                                              {"failures", c.failures}};
      }
      rates[hypothesis_label(h, t.config)] = block;
    }
    j["rates"] = rates;
    nlohmann::json errors = nlohmann::json::array();
    for (std::size_t i = 0; i < t.records.size(); ++i) {
      if (t.records[i].failed) errors.push_back({{"replication", i}, {"error", t.records[i].error}});
    }
    j["failed_replications"] = errors;
    out.push_back(j);
  }
  return out;
}

}  // namespace svylasso::app
