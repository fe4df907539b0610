#include "svylasso_app/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <svylasso/ame.hpp>
#include <svylasso/calpha.hpp>
#include <svylasso/debiased.hpp>
#include <svylasso/errors.hpp>
#include <svylasso/glm.hpp>
#include <svylasso/sampling.hpp>
#include <svylasso/selective.hpp>

#include "svylasso_app/csv.hpp"
#include "svylasso_app/errors.hpp"
#include "svylasso_app/report.hpp"

namespace svylasso::app {

namespace {

constexpr const char* kNotComputed = "-";
constexpr const char* kFailed = "NA";

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

bool wants(const std::vector<Method>& methods, Method m) {
  return std::find(methods.begin(), methods.end(), m) != methods.end();
}

std::string p_cell(const InferenceResult& r) {
  return r.applicable ? format_number(r.p_value) : kNotComputed;
}

std::ostream& open_output(const std::string& path, std::ofstream& file, std::ostream& fallback) {
  if (path.empty() || path == "-") return fallback;
  file.open(path);
  if (!file) throw UserError("cannot write to '" + path + "'");
  return file;
}

}  // namespace

Dataset load_dataset(const DataSpec& spec) {
  if (spec.path.empty()) throw UserError("--data is required");
  if (spec.outcome.empty()) throw UserError("--outcome is required");
  const CsvFrame frame = read_csv(spec.path);
  if (frame.values.rows() == 0) throw UserError(spec.path + ": no data rows");
  const Index yc = frame.column(spec.outcome);
  const Index wc = spec.weights.empty() ? -1 : frame.column(spec.weights);

  std::vector<std::string> covariates;
  if (spec.covariates) {
    covariates = *spec.covariates;
  } else {
    for (Index k = 0; k < static_cast<Index>(frame.columns.size()); ++k) {
      if (k != yc && k != wc) covariates.push_back(frame.columns[static_cast<std::size_t>(k)]);
    }
  }
  std::set<std::string> seen;
  for (const auto& c : covariates) {
    if (c == spec.outcome) throw UserError("the outcome cannot also be a covariate");
    if (!spec.weights.empty() && c == spec.weights) throw UserError("the weight column cannot also be a covariate");
    if (!seen.insert(c).second) throw UserError("covariate '" + c + "' listed twice");
    frame.column(c);
  }

  const Index n = frame.values.rows();
  Eigen::VectorXd y = frame.values.col(yc);
  for (Index i = 0; i < n; ++i) {
    if (y[i] != 0.0 && y[i] != 1.0) {
      throw UserError(spec.path + ": outcome '" + spec.outcome + "' must be 0/1; data row " + std::to_string(i + 1) +
                      " has " + format_number(y[i]));
    }
  }
  Eigen::VectorXd w = wc >= 0 ? Eigen::VectorXd(frame.values.col(wc)) : Eigen::VectorXd::Ones(n);
  for (Index i = 0; i < n; ++i) {
    if (!(w[i] > 0.0)) {
      throw UserError(spec.path + ": weight '" + spec.weights + "' must be positive; data row " +
                      std::to_string(i + 1) + " has " + format_number(w[i]));
    }
  }
  Eigen::MatrixXd X(n, static_cast<Index>(covariates.size()));
  for (std::size_t k = 0; k < covariates.size(); ++k) X.col(static_cast<Index>(k)) = frame.values.col(frame.column(covariates[k]));
  try {
    return with_rescaled_weights(make_dataset_with_intercept(std::move(y), X, std::move(w), covariates));
  } catch (const ArgumentError& e) {
    throw UserError(e.what());
  }
}

FitOutcome run_fit(const FitSpec& spec) {
  FitOutcome out;
  out.data = load_dataset(spec.data);
  const GlmFamily& fam = logit();
  if (spec.folds < 2) throw UserError("--folds must be >= 2");
  if (spec.cv_rule != "min" && spec.cv_rule != "1se") throw UserError("--cv-rule must be min or 1se");
  if (spec.lambda == "cv" && out.data.p() > 0) {
    CvSpec cv;
    cv.folds = spec.folds;
    cv.seed = spec.seed;
    cv.rule = spec.cv_rule == "1se" ? CvRule::one_se : CvRule::best;
    out.cv = cv_select_lambda(out.data, fam, cv);
    out.fit = out.cv->fit;
  } else {
    double lambda = 0.0;
    if (spec.lambda != "cv") {
      const auto res = std::from_chars(spec.lambda.data(), spec.lambda.data() + spec.lambda.size(), lambda);
      if (res.ec != std::errc() || res.ptr != spec.lambda.data() + spec.lambda.size() || !(lambda >= 0.0)) {
        throw UserError("--lambda must be 'cv' or a number >= 0, got '" + spec.lambda + "'");
      }
    }
    out.fit = fit_penalized(out.data, fam, lambda);
  }
  out.kkt = kkt_certificate(out.data, fam, out.fit);
  return out;
}

std::vector<Method> parse_methods(const std::string& list) {
  std::vector<Method> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      const Method m = parse_method(item);
      if (!wants(out, m)) out.push_back(m);
    } catch (const ArgumentError& e) {
      throw UserError(e.what());
    }
  }
  if (out.empty()) throw UserError("--methods: no method given");
  return out;
}

InferReport run_infer(const InferSpec& spec) {
  if (!(spec.level > 0.0 && spec.level < 1.0)) throw UserError("--level must lie in (0, 1)");
  const FitOutcome fo = run_fit(spec.fit);
  const Dataset& ds = fo.data;
  const LassoFit& fit = fo.fit;
  const GlmFamily& fam = logit();
  const auto& m = spec.methods;
  const double level = spec.level;
  InferReport rep;

  const MleFit mle = fit_mle(ds, fam);
  if (!mle.converged) rep.warnings.push_back("unpenalized GLM fit did not converge in 25 iterations");
  if (mle.pinv_used) rep.warnings.push_back("unpenalized GLM fit used a pseudo-inverse Hessian");
  if (!fo.kkt.satisfied) rep.warnings.push_back("Lasso fit does not meet the KKT tolerance");

  std::optional<SelectionEvent> event;
  std::string event_error;
  if (fit.active_slopes() > 0 && (wants(m, Method::si) || wants(m, Method::si2))) {
    try {
      event = build_selection_event(ds, fam, fit);
    } catch (const std::exception& e) {
      event_error = std::string("selection event: ") + e.what();
    }
  }
  auto selected = [&](Index j) { return std::find(fit.active.begin() + 1, fit.active.end(), j) != fit.active.end(); };
  auto need_event = [&]() -> const SelectionEvent& {
    if (!event) throw NumericError(event_error);
    return *event;
  };
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(1);
  std::vector<std::string>& warn = rep.warnings;

  // Runs one inference; a failure becomes a warning and an empty slot.
  auto attempt = [&](const std::string& what, auto&& f) -> std::optional<InferenceResult> {
    try {
      return f();
    } catch (const std::exception& e) {
      warn.push_back(what + ": " + e.what());
      return std::nullopt;
    }
  };
  // Cell text for an optional result: "-" when not requested, "NA" on failure.
  auto show = [](bool requested, const std::optional<InferenceResult>& r, auto&& pick) -> std::string {
    if (!requested) return kNotComputed;
    if (!r) return kFailed;
    return pick(*r);
  };
  auto p_of = [](const InferenceResult& r) { return p_cell(r); };
  auto lo_of = [](const InferenceResult& r) { return r.applicable ? format_number(r.ci_lower) : kNotComputed; };
  auto hi_of = [](const InferenceResult& r) { return r.applicable ? format_number(r.ci_upper) : kNotComputed; };
  auto est_of = [](const InferenceResult& r) { return format_number(r.estimate); };

  const bool want_db = wants(m, Method::db);
  const bool want_tsvy = wants(m, Method::tsvy);
  const bool want_ca = wants(m, Method::calpha);

  rep.coefficients.header = {"variable", "GLM",      "Lasso",    "DB",       "SI",       "p_tsvy",  "p_DB",
                             "p_Calpha", "p_SI",     "DB_lower", "DB_upper", "SI_lower", "SI_upper"};
  for (Index j = 1; j <= ds.p(); ++j) {
    const std::string& name = ds.names[static_cast<std::size_t>(j)];
    const ParamFunction coef = coordinate_function(j, name);
    const bool si_on = wants(m, Method::si) && selected(j);
    std::optional<InferenceResult> dbr, tr, car, sir;
    if (want_db) dbr = attempt("DB " + name, [&] { return db_wald(ds, fam, fit, coef, zero, level); });
    if (want_tsvy) tr = attempt("t_svy " + name, [&] { return tsvy_wald(ds, fam, mle, coef, zero, level); });
    if (want_ca) {
      car = attempt("C(alpha) " + name, [&] {
        return c_alpha_test(ds, fam, auxiliary_coordinate_pin(ds, fam, fit.theta, j, 0.0), coef, level);
      });
    }
    if (si_on) sir = attempt("SI " + name, [&] { return si_ci_coordinate(need_event(), j, 0.0, level); });
    std::vector<std::string> row{name, format_number(mle.theta[j]), format_number(fit.theta[j])};
    row.push_back(show(want_db, dbr, est_of));
    row.push_back(show(si_on, sir, est_of));
    row.push_back(show(want_tsvy, tr, p_of));
    row.push_back(show(want_db, dbr, p_of));
    row.push_back(show(want_ca, car, p_of));
    row.push_back(show(si_on, sir, p_of));
    row.push_back(show(want_db, dbr, lo_of));
    row.push_back(show(want_db, dbr, hi_of));
    row.push_back(show(si_on, sir, lo_of));
    row.push_back(show(si_on, sir, hi_of));
    rep.coefficients.rows.push_back(std::move(row));
  }

  if (spec.ame) {
    const bool want_si2 = wants(m, Method::si2);
    rep.ame.header = {"variable", "GLM", "DB", "SI", "p_tsvy", "p_DB", "p_Calpha", "p_SI"};
    if (want_si2) rep.ame.header.push_back("p_SI2");
    for (const char* c : {"DB_lower", "DB_upper", "SI_lower", "SI_upper"}) rep.ame.header.push_back(c);
    for (Index j = 1; j <= ds.p(); ++j) {
      if (!is_binary_column(ds, j)) continue;
      const std::string& name = ds.names[static_cast<std::size_t>(j)];
      const ParamFunction ame = ame_function(ds, j);
      const bool si_on = wants(m, Method::si) && selected(j);
      const bool si2_on = want_si2 && selected(j);
      std::optional<InferenceResult> dbr, tr, car, sir, si2r;
      if (want_db) dbr = attempt("DB AME " + name, [&] { return db_wald(ds, fam, fit, ame, zero, level); });
      if (want_tsvy) tr = attempt("t_svy AME " + name, [&] { return tsvy_wald(ds, fam, mle, ame, zero, level); });
      if (want_ca) {
        car = attempt("C(alpha) AME " + name, [&] {
          return c_alpha_test(ds, fam, auxiliary_ame_pin(ds, fam, fit.theta, j, 0.0), ame, level);
        });
      }
      if (si_on) {
        sir = attempt("SI AME " + name, [&] { return si_ci_rho(augment_for_rho(need_event(), ame, true), 0.0, level); });
      }
      if (si2_on) {
        si2r = attempt("SI2 AME " + name,
                       [&] { return si_ci_rho(augment_for_rho(need_event(), ame, false), 0.0, level); });
      }
      std::vector<std::string> row{name, format_number(ame_estimate(ds, mle.theta, j))};
      row.push_back(show(want_db, dbr, est_of));
      row.push_back(show(si_on, sir, est_of));
      row.push_back(show(want_tsvy, tr, p_of));
      row.push_back(show(want_db, dbr, p_of));
      row.push_back(show(want_ca, car, p_of));
      row.push_back(show(si_on, sir, p_of));
      if (want_si2) row.push_back(show(si2_on, si2r, p_of));
      row.push_back(show(want_db, dbr, lo_of));
      row.push_back(show(want_db, dbr, hi_of));
      row.push_back(show(si_on, sir, lo_of));
      row.push_back(show(si_on, sir, hi_of));
      rep.ame.rows.push_back(std::move(row));
    }
  }
  return rep;
}

int guarded(const std::function<int()>& body, std::ostream& err) {
  try {
    return body();
  } catch (const UserError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUser;
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUser;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitUser;
  } catch (const NumericError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const SelectionDegenerateError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

int cmd_fit(const FitSpec& spec, const std::string& out_path, std::ostream& out, std::ostream& err) {
  return guarded(
      [&] {
        const FitOutcome fo = run_fit(spec);
        std::ofstream file;
        std::ostream& dst = open_output(out_path, file, out);
        dst << fit_to_json(fo).dump(2) << '\n';
        if (!fo.kkt.satisfied) err << "warning: fit does not meet the KKT tolerance\n";
        return kExitOk;
      },
      err);
}

int cmd_infer(const InferSpec& spec, const std::string& out_path, const std::string& ame_out_path, std::ostream& out,
              std::ostream& err) {
  return guarded(
      [&] {
        const InferReport rep = run_infer(spec);
        for (const auto& w : rep.warnings) err << "warning: " << w << '\n';
        std::ofstream file;
        std::ostream& dst = open_output(out_path, file, out);
        write_csv(dst, rep.coefficients.header, rep.coefficients.rows);
        if (spec.ame) {
          std::ofstream ame_file;
          const bool same = ame_out_path.empty() || ame_out_path == "-";
          if (same) dst << '\n';
          std::ostream& ame_dst = same ? dst : open_output(ame_out_path, ame_file, out);
          write_csv(ame_dst, rep.ame.header, rep.ame.rows);
        }
        return kExitOk;
      },
      err);
}

int cmd_simulate(const ConfigMap& settings, const std::string& out_dir, std::ostream& err, bool quiet) {
  return guarded(
      [&] {
        if (out_dir.empty()) throw UserError("--out is required");
        const StudyPlan plan = plan_from_config(settings);
        std::error_code ec;
        std::filesystem::create_directories(out_dir, ec);
        if (ec) throw UserError("cannot create output directory '" + out_dir + "': " + ec.message());

        std::vector<RejectionTable> tables;
        for (const Index p : plan.p_values) {
          SimulationConfig cfg = plan.base;
          cfg.p = p;
          int last_decile = -1;
          auto progress = [&](int done, int total) {
            if (quiet || total == 0) return;
            const int decile = 10 * done / total;
            if (decile != last_decile) {
              last_decile = decile;
              err << "p=" << p << ": " << done << "/" << total << " replications\n";
            }
          };
          tables.push_back(run_rejection_study(cfg, progress));
        }

        const std::filesystem::path dir(out_dir);
        {
          std::ofstream f(dir / "rejection.csv");
          if (!f) throw UserError("cannot write to '" + (dir / "rejection.csv").string() + "'");
          write_rejection_csv(f, tables);
        }
        {
          std::ofstream f(dir / "diagnostics.csv");
          write_diagnostics_csv(f, tables);
        }
        {
          std::ofstream f(dir / "study.json");
          f << study_to_json(tables).dump(2) << '\n';
        }
        return kExitOk;
      },
      err);
}

}  // namespace svylasso::app
