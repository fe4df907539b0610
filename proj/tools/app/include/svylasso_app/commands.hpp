#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <svylasso/dataset.hpp>
#include <svylasso/inference.hpp>
#include <svylasso/lasso.hpp>

#include "svylasso_app/config.hpp"

namespace svylasso::app {

struct DataSpec {
  std::string path;
  std::string outcome;
  std::string weights;  // empty: unit weights
  std::optional<std::vector<std::string>> covariates;  // unset: every other column
};

/// Reads the CSV and builds a validated dataset (binary outcome, positive weights).
Dataset load_dataset(const DataSpec& spec);

struct FitSpec {
  DataSpec data;
  std::string lambda = "cv";  // "cv" or a number
  std::uint64_t seed = 1;
  int folds = 10;
  std::string cv_rule = "min";  // min or 1se
};

struct FitOutcome {
  Dataset data;  // weights rescaled to sum to n
  LassoFit fit;
  std::optional<CvResult> cv;
  KktReport kkt;
};

FitOutcome run_fit(const FitSpec& spec);

struct InferSpec {
  FitSpec fit;
  std::vector<Method> methods = {Method::db, Method::calpha, Method::si, Method::si2, Method::tsvy};
  double level = 0.05;
  bool ame = false;
};

/// Preformatted result tables. Cells are numbers, "-" (not computed) or "NA"
/// (computation failed; see warnings).
struct TextTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct InferReport {
  TextTable coefficients;
  TextTable ame;  // empty unless requested
  std::vector<std::string> warnings;
};

InferReport run_infer(const InferSpec& spec);

/// Parses "db,ca,si,si2,tsvy".
std::vector<Method> parse_methods(const std::string& list);

/// Runs `body`, mapping exceptions to exit codes and messages on `err`.
int guarded(const std::function<int()>& body, std::ostream& err);

/// `out_path` empty or "-": write to `out`.
int cmd_fit(const FitSpec& spec, const std::string& out_path, std::ostream& out, std::ostream& err);
int cmd_infer(const InferSpec& spec, const std::string& out_path, const std::string& ame_out_path,
              std::ostream& out, std::ostream& err);
/// Writes rejection.csv, diagnostics.csv and study.json into `out_dir`.
int cmd_simulate(const ConfigMap& settings, const std::string& out_dir, std::ostream& err, bool quiet = false);

}  // namespace svylasso::app
