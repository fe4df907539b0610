#include "svylasso/calpha.hpp"

#include <cmath>
#include <optional>

#include "svylasso/ame.hpp"
#include "svylasso/errors.hpp"
#include "svylasso/linalg.hpp"
#include "svylasso/stats.hpp"

namespace svylasso {

namespace {

const Dataset& rescaled(const Dataset& ds, std::optional<Dataset>& holder) {
  if (has_rescaled_weights(ds)) return ds;
  holder = with_rescaled_weights(ds);
  return *holder;
}

}  // namespace

CalphaStat c_alpha_stat(const Dataset& ds, const GlmFamily& fam, const AuxiliaryEstimate& aux,
                        const Eigen::MatrixXd& rho_dot) {
  std::optional<Dataset> holder;
  const Dataset& data = rescaled(ds, holder);
  if (rho_dot.rows() != aux.theta.size() || rho_dot.cols() < 1) throw ArgumentError("C(alpha): Jacobian must be (p+1) x r");
  const CurvatureSet cs = curvature(data, fam, aux.theta);
  CalphaStat out;
  const Eigen::MatrixXd hinv = inverse_or_pinv(cs.hessian, out.pinv_used);
  out.pinv_used = out.pinv_used || aux.pinv_used;
  const Eigen::MatrixXd b = hinv * rho_dot;            // Ĥ⁻¹ρ̇
  const Eigen::VectorXd u = b.transpose() * cs.score;  // ρ̇'Ĥ⁻¹S
  Eigen::MatrixXd v = b.transpose() * cs.information * b;
  v = (0.5 * (v + v.transpose())).eval();
  Eigen::LLT<Eigen::MatrixXd> llt(v);
  if (llt.info() != Eigen::Success || !(v.diagonal().minCoeff() > 0.0)) {
    throw NumericError("C(alpha): score variance matrix is not positive definite");
  }
  out.df = static_cast<int>(rho_dot.cols());
  out.statistic = static_cast<double>(data.n()) * u.dot(llt.solve(u));
  out.p_value = chi_square_sf(out.statistic, out.df);
  return out;
}

InferenceResult c_alpha_test(const Dataset& ds, const GlmFamily& fam, const AuxiliaryEstimate& aux,
                             const ParamFunction& rho, double level) {
  const CalphaStat st = c_alpha_stat(ds, fam, aux, rho.jacobian(aux.theta));
  InferenceResult out;
  out.method = Method::calpha;
  out.target = rho.label;
  out.level = level;
  out.statistic = st.statistic;
  out.df = st.df;
  out.p_value = st.p_value;
  out.pinv_used = st.pinv_used;
  return out;
}

AuxiliaryEstimate auxiliary_coordinate_pin(const Dataset& ds, const GlmFamily& fam, const Eigen::VectorXd& theta,
                                           Index j, double value, bool refine) {
  if (j < 0 || j >= theta.size()) throw ArgumentError("pinned coordinate out of range");
  AuxiliaryEstimate aux;
  aux.construction = AuxConstruction::coordinate_pin;
  aux.theta = theta;
  aux.theta[j] = value;
  if (!refine || theta.size() == 1) return aux;

  std::optional<Dataset> holder;
  const Dataset& data = rescaled(ds, holder);
  const CurvatureSet cs = curvature(data, fam, aux.theta);
  IndexSet others = complement(IndexSet{j}, theta.size());
  const Eigen::MatrixXd h = submatrix(cs.hessian, others, others);
  const Eigen::VectorXd step = inverse_or_pinv(h, aux.pinv_used) * subvector(cs.score, others);
  for (std::size_t k = 0; k < others.size(); ++k) aux.theta[others[k]] += step[static_cast<Index>(k)];
  return aux;
}

AuxiliaryEstimate auxiliary_ame_solve(const Dataset& ds, const Eigen::VectorXd& theta, Index j, double ame0) {
  AuxiliaryEstimate aux;
  aux.construction = AuxConstruction::ame_solve;
  aux.theta = theta;
  auto f = [&](double t) {
    aux.theta[j] = t;
    return ame_estimate(ds, aux.theta, j) - ame0;
  };
  double lo = -50.0;
  double hi = 50.0;
  const double flo = f(lo);
  const double fhi = f(hi);
  if (flo > 0.0 || fhi < 0.0) throw ArgumentError("AME restriction has no solution with the coefficient in [-50, 50]");
  if (flo == 0.0) hi = lo;
  if (fhi == 0.0) lo = hi;
  if (ame0 == 0.0) lo = hi = 0.0;  // AME_j vanishes exactly at θ_j = 0
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  aux.theta[j] = 0.5 * (lo + hi);
  return aux;
}

AuxiliaryEstimate auxiliary_ame_pin(const Dataset& ds, const GlmFamily& fam, const Eigen::VectorXd& theta, Index j,
                                    double ame0) {
  std::optional<Dataset> holder;
  const Dataset& data = rescaled(ds, holder);
  if (ame0 == 0.0) return auxiliary_coordinate_pin(data, fam, theta, j, 0.0);
  auto at = [&](double t) { return auxiliary_coordinate_pin(data, fam, theta, j, t); };
  auto f = [&](const AuxiliaryEstimate& a) { return ame_estimate(data, a.theta, j) - ame0; };
  double lo = -50.0;
  double hi = 50.0;
  const double flo = f(at(lo));
  const double fhi = f(at(hi));
  if (!(flo <= 0.0 && fhi >= 0.0)) {
    throw ArgumentError("AME restriction has no solution with the coefficient in [-50, 50]");
  }
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (f(at(mid)) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  AuxiliaryEstimate aux = at(0.5 * (lo + hi));
  aux.construction = AuxConstruction::ame_solve;
  return aux;
}

}  // namespace svylasso
