#include "svylasso/inference.hpp"

#include <string>

#include "svylasso/errors.hpp"

namespace svylasso {

std::string_view method_name(Method m) noexcept {
  switch (m) {
    case Method::db: return "DB";
    case Method::si: return "SI";
    case Method::si2: return "SI2";
    case Method::calpha: return "Calpha";
    case Method::tsvy: return "t_svy";
  }
  return "?";
}

Method parse_method(std::string_view s) {
  if (s == "db" || s == "DB") return Method::db;
  if (s == "si" || s == "SI") return Method::si;
  if (s == "si2" || s == "SI2") return Method::si2;
  if (s == "ca" || s == "calpha" || s == "Calpha") return Method::calpha;
  if (s == "tsvy" || s == "t_svy") return Method::tsvy;
  throw ArgumentError("unknown inference method '" + std::string(s) + "' (expected db, ca, si, si2, tsvy)");
}

InferenceResult InferenceResult::not_applicable(Method m, std::string target, std::string why) {
  InferenceResult r;
  r.method = m;
  r.target = std::move(target);
  r.applicable = false;
  r.note = std::move(why);
  return r;
}

ParamFunction coordinate_function(Index j, std::string label) {
  if (label.empty()) label = "theta[" + std::to_string(j) + "]";
  ParamFunction f;
  f.value = [j](const Eigen::VectorXd& theta) {
    if (j < 0 || j >= theta.size()) throw ArgumentError("coordinate index out of range");
    return Eigen::VectorXd::Constant(1, theta[j]);
  };
  f.jacobian = [j](const Eigen::VectorXd& theta) {
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(theta.size(), 1);
    jac(j, 0) = 1.0;
    return jac;
  };
  f.label = std::move(label);
  return f;
}

ParamFunction coordinates_function(std::vector<Index> idx, std::string label) {
  if (label.empty()) label = "theta[subset]";
  ParamFunction f;
  f.value = [idx](const Eigen::VectorXd& theta) {
    Eigen::VectorXd v(static_cast<Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) v[static_cast<Index>(k)] = theta[idx[k]];
    return v;
  };
  f.jacobian = [idx](const Eigen::VectorXd& theta) {
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(theta.size(), static_cast<Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) jac(idx[k], static_cast<Index>(k)) = 1.0;
    return jac;
  };
  f.label = std::move(label);
  return f;
}

}  // namespace svylasso
