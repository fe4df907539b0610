#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "svylasso_app/commands.hpp"
#include "svylasso_app/config.hpp"
#include "svylasso_app/errors.hpp"

using namespace svylasso::app;

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void add_data_options(CLI::App* cmd, FitSpec& spec, std::string& covariates) {
  cmd->add_option("--data", spec.data.path, "CSV file with a header row")->required();
  cmd->add_option("--outcome", spec.data.outcome, "0/1 outcome column")->required();
  cmd->add_option("--weights", spec.data.weights, "survey weight column (default: unit weights)");
  cmd->add_option("--covariates", covariates,
                  "comma-separated covariate columns; empty for intercept only (default: all other columns)");
  cmd->add_option("--lambda", spec.lambda, "penalty level or 'cv'")->capture_default_str();
  cmd->add_option("--seed", spec.seed, "fold assignment seed")->capture_default_str();
  cmd->add_option("--folds", spec.folds, "cross-validation folds")->capture_default_str();
  cmd->add_option("--cv-rule", spec.cv_rule, "min or 1se")->capture_default_str();
}

void apply_covariates(CLI::App* cmd, FitSpec& spec, const std::string& covariates) {
  if (cmd->count("--covariates") > 0) spec.data.covariates = split_list(covariates);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Survey-weighted logit Lasso with post-selection inference"};
  app.require_subcommand(1);

  FitSpec fit_spec;
  std::string fit_covariates;
  std::string fit_out;
  CLI::App* fit = app.add_subcommand("fit", "fit the weighted Lasso logit and print it as JSON");
  add_data_options(fit, fit_spec, fit_covariates);
  fit->add_option("--out", fit_out, "output file (default: stdout)");

  InferSpec infer_spec;
  std::string infer_covariates;
  std::string infer_out;
  std::string ame_out;
  std::string methods = "db,ca,si,si2,tsvy";
  CLI::App* infer = app.add_subcommand("infer", "tests and estimates for every coefficient");
  add_data_options(infer, infer_spec.fit, infer_covariates);
  infer->add_option("--methods", methods, "comma-separated subset of db,ca,si,si2,tsvy")->capture_default_str();
  infer->add_option("--level", infer_spec.level, "test size")->capture_default_str();
  infer->add_flag("--ame", infer_spec.ame, "also test zero average marginal effects of binary covariates");
  infer->add_option("--out", infer_out, "coefficient table (default: stdout)");
  infer->add_option("--ame-out", ame_out, "AME table (default: after the coefficient table)");

  std::string config_path;
  std::string sim_out;
  bool quiet = false;
  std::map<std::string, std::string> overrides;
  CLI::App* sim = app.add_subcommand("simulate", "Monte Carlo rejection rates under the stratified design");
  sim->add_option("--config", config_path, "key = value settings file");
  sim->add_option("--out", sim_out, "output directory")->required();
  sim->add_flag("--quiet", quiet, "no progress output");
  for (const auto& key : simulation_keys()) {
    std::string flag = "--" + key;
    for (auto& ch : flag) {
      if (ch == '_') ch = '-';
    }
    sim->add_option(flag, overrides[key], "override '" + key + "'");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUser;
  }

  if (fit->parsed()) {
    apply_covariates(fit, fit_spec, fit_covariates);
    return cmd_fit(fit_spec, fit_out, std::cout, std::cerr);
  }
  if (infer->parsed()) {
    apply_covariates(infer, infer_spec.fit, infer_covariates);
    const int code = guarded(
        [&] {
          infer_spec.methods = parse_methods(methods);
          return kExitOk;
        },
        std::cerr);
    if (code != kExitOk) return code;
    return cmd_infer(infer_spec, infer_out, ame_out, std::cout, std::cerr);
  }
  ConfigMap settings;
  const int code = guarded(
      [&] {
        if (!config_path.empty()) settings = read_config(config_path);
        return kExitOk;
      },
      std::cerr);
  if (code != kExitOk) return code;
  for (const auto& key : simulation_keys()) {
    std::string flag = "--" + key;
    for (auto& ch : flag) {
      if (ch == '_') ch = '-';
    }
    if (sim->count(flag) > 0) settings[key] = overrides[key];
  }
  return cmd_simulate(settings, sim_out, std::cerr, quiet);
}
