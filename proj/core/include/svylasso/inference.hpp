#pragma once

#include <functional>
#include <limits>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "svylasso/dataset.hpp"

namespace svylasso {

enum class Method { db, si, si2, calpha, tsvy };

std::string_view method_name(Method m) noexcept;

/// Parses "db", "si", "si2", "ca" / "calpha", "tsvy". Throws ArgumentError.
Method parse_method(std::string_view s);

/// Outcome of one test / interval. Fields that a method does not produce stay NaN.
struct InferenceResult {
  Method method = Method::db;
  std::string target;
  double estimate = std::numeric_limits<double>::quiet_NaN();
  double std_error = std::numeric_limits<double>::quiet_NaN();
  double statistic = std::numeric_limits<double>::quiet_NaN();
  double p_value = std::numeric_limits<double>::quiet_NaN();
  double ci_lower = std::numeric_limits<double>::quiet_NaN();
  double ci_upper = std::numeric_limits<double>::quiet_NaN();
  double level = 0.05;  // ζ; intervals have coverage 1 - ζ
  int df = 1;
  bool applicable = true;
  bool pinv_used = false;
  std::string note;

  bool rejects(double alpha) const noexcept { return applicable && p_value < alpha; }

  static InferenceResult not_applicable(Method m, std::string target, std::string why);
};

/// A (possibly vector-valued) parameter function ρ(θ) with Jacobian
/// ρ̇(θ) = ∂ρ'/∂θ of shape (p+1) × r.
struct ParamFunction {
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> value;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> jacobian;
  std::string label;

  Index dim_out(const Eigen::VectorXd& at) const { return value(at).size(); }
};

/// ρ(θ) = θ_j.
ParamFunction coordinate_function(Index j, std::string label = {});

/// ρ(θ) = θ_idx (vector of coordinates).
ParamFunction coordinates_function(std::vector<Index> idx, std::string label = {});

}  // namespace svylasso
