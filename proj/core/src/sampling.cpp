#include "svylasso/sampling.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include "svylasso/ame.hpp"
#include "svylasso/calpha.hpp"
#include "svylasso/debiased.hpp"
#include "svylasso/errors.hpp"
#include "svylasso/glm.hpp"
#include "svylasso/lasso.hpp"
#include "svylasso/random.hpp"
#include "svylasso/selective.hpp"

namespace svylasso {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr int kPopulationRetries = 20;

std::vector<std::string> default_names(Index p) {
  std::vector<std::string> names{"(Intercept)"};
  for (Index j = 1; j <= p; ++j) names.push_back("x" + std::to_string(j));
  return names;
}

StratificationScheme scheme_for(const SimulationConfig& cfg) {
  return cfg.scheme == SchemeKind::standard ? StratificationScheme::standard(cfg.per_stratum, cfg.population_size)
                                            : StratificationScheme::exogenous(cfg.per_stratum, cfg.prob);
}

}  // namespace

Eigen::VectorXd paper_theta0(Index p) {
  if (p < 2) throw ArgumentError("the design needs p >= 2");
  Eigen::VectorXd t = Eigen::VectorXd::Zero(p + 1);
  t.head(3).setOnes();
  return t;
}

Population generate_population(Index size, Index p, double prob, const Eigen::VectorXd& theta0, std::uint64_t seed) {
  if (size < 1) throw ArgumentError("population size must be positive");
  if (p < 1 || theta0.size() != p + 1) throw ArgumentError("theta0 must have length p+1");
  if (!(prob >= 0.0 && prob <= 1.0)) throw ArgumentError("prob must lie in [0, 1]");
  Rng rng(seed);
  Population pop;
  pop.theta0 = theta0;
  pop.prob = prob;
  pop.X.resize(size, p + 1);
  pop.y.resize(size);
  for (Index i = 0; i < size; ++i) {
    pop.X(i, 0) = 1.0;
    for (Index j = 1; j <= p; ++j) pop.X(i, j) = rng.bernoulli(prob) ? 1.0 : 0.0;
    pop.y[i] = rng.bernoulli(logistic(pop.X.row(i).dot(theta0))) ? 1.0 : 0.0;
  }
  return pop;
}

StratificationScheme StratificationScheme::standard(Index per_stratum, Index population_size) {
  if (population_size % 10 != 0) throw ArgumentError("standard scheme needs a population size divisible by 10");
  StratificationScheme s;
  s.kind = SchemeKind::standard;
  s.per_stratum = per_stratum;
  const Index unit = population_size / 10;
  s.block_sizes = {unit, 2 * unit, 3 * unit, 4 * unit};
  s.shares = {0.1, 0.2, 0.3, 0.4};
  return s;
}

StratificationScheme StratificationScheme::exogenous(Index per_stratum, double prob) {
  if (!(prob > 0.0 && prob < 1.0)) throw ArgumentError("exogenous scheme needs prob in (0, 1)");
  StratificationScheme s;
  s.kind = SchemeKind::exogenous;
  s.per_stratum = per_stratum;
  const double a = 1.0 - prob;
  s.shares = {a * a, a * prob, prob * a, prob * prob};
  return s;
}

double StratificationScheme::raw_weight(std::size_t h) const {
  const double n = static_cast<double>(sample_size());
  return shares.at(h) / (static_cast<double>(per_stratum) / n);
}

std::vector<std::vector<Index>> stratum_rows(const Population& pop, const StratificationScheme& scheme) {
  std::vector<std::vector<Index>> rows(scheme.shares.size());
  const Index size = pop.X.rows();
  if (scheme.kind == SchemeKind::standard) {
    Index start = 0;
    for (std::size_t h = 0; h < scheme.block_sizes.size(); ++h) {
      for (Index i = start; i < start + scheme.block_sizes[h] && i < size; ++i) rows[h].push_back(i);
      start += scheme.block_sizes[h];
    }
    if (start != size) throw ArgumentError("stratum sizes do not add up to the population size");
  } else {
    if (pop.X.cols() < 3) throw ArgumentError("exogenous scheme needs at least two regressors");
    for (Index i = 0; i < size; ++i) {
      const auto cell = static_cast<std::size_t>(2 * (pop.X(i, 1) != 0.0) + (pop.X(i, 2) != 0.0));
      rows[cell].push_back(i);
    }
  }
  for (std::size_t h = 0; h < rows.size(); ++h) {
    if (rows[h].empty()) throw DataError("stratum " + std::to_string(h + 1) + " is empty in the population");
  }
  return rows;
}

Dataset draw_sample(const Population& pop, const StratificationScheme& scheme, std::uint64_t seed) {
  if (scheme.per_stratum < 1) throw ArgumentError("need at least one draw per stratum");
  const auto rows = stratum_rows(pop, scheme);
  Rng rng(seed);
  const Index n = scheme.sample_size();
  const Index cols = pop.X.cols();
  Eigen::MatrixXd X(n, cols);
  Eigen::VectorXd y(n);
  Eigen::VectorXd w(n);
  Index r = 0;
  for (std::size_t h = 0; h < rows.size(); ++h) {
    const double wh = scheme.raw_weight(h);
    for (Index k = 0; k < scheme.per_stratum; ++k, ++r) {
      const Index i = rows[h][static_cast<std::size_t>(rng.below(rows[h].size()))];
      X.row(r) = pop.X.row(i);
      y[r] = pop.y[i];
      w[r] = wh;
    }
  }
  return with_rescaled_weights(make_dataset(std::move(y), std::move(X), std::move(w), default_names(cols - 1)));
}

double true_ame_oracle(const Eigen::VectorXd& theta0, double prob, std::int64_t draws, std::uint64_t seed, Index j) {
  if (draws < 1) throw ArgumentError("need at least one draw");
  if (j < 1 || j >= theta0.size()) throw ArgumentError("AME column out of range");
  // Coordinates with a zero coefficient do not move x'θ0; only the others are drawn.
  std::vector<Index> live;
  for (Index k = 1; k < theta0.size(); ++k) {
    if (k != j && theta0[k] != 0.0) live.push_back(k);
  }
  Rng rng(seed);
  double acc = 0.0;
  for (std::int64_t d = 0; d < draws; ++d) {
    double t = theta0[0];
    for (Index k : live) {
      if (rng.bernoulli(prob)) t += theta0[k];
    }
    acc += logistic(t + theta0[j]) - logistic(t);
  }
  return acc / static_cast<double>(draws);
}

std::size_t study_slot(Method m) noexcept {
  switch (m) {
    case Method::db: return 0;
    case Method::calpha: return 1;
    case Method::si: return 2;
    case Method::si2: return 3;
    case Method::tsvy: return 4;
  }
  return 0;
}

ReplicationRecord run_replication(const SimulationConfig& cfg, std::uint64_t index, const Population* shared) {
  ReplicationRecord rec;
  for (auto& row : rec.p_value) row.fill(kNaN);
  const std::uint64_t seed = derive_seed(cfg.seed, index);
  const GlmFamily& fam = logit();
  try {
    const StratificationScheme scheme = scheme_for(cfg);
    std::optional<Population> own;
    std::optional<Dataset> drawn;
    if (shared != nullptr) {
      drawn = draw_sample(*shared, scheme, derive_seed(seed, 1));
    } else {
      const Eigen::VectorXd theta0 = paper_theta0(cfg.p);
      for (int attempt = 0; !drawn; ++attempt) {
        own = generate_population(cfg.population_size, cfg.p, cfg.prob, theta0, derive_seed(seed, 100 + attempt));
        try {
          drawn = draw_sample(*own, scheme, derive_seed(seed, 1));
        } catch (const DataError&) {
          if (attempt + 1 >= kPopulationRetries) throw;
        }
      }
    }
    const Dataset& ds = *drawn;

    LassoFit fit;
    if (cfg.cross_validate) {
      CvSpec spec;
      spec.folds = cfg.cv_folds;
      spec.rule = cfg.cv_rule;
      spec.seed = derive_seed(seed, 2);
      fit = cv_select_lambda(ds, fam, spec).fit;
    } else {
      fit = fit_penalized(ds, fam, cfg.fixed_lambda);
    }
    rec.lambda = fit.lambda;
    rec.selected = fit.active_slopes();
    rec.fit_converged = fit.converged;
    rec.kkt_ok = kkt_certificate(ds, fam, fit).satisfied;

    const MleFit mle = fit_mle(ds, fam, cfg.mle_iterations);
    rec.mle_converged = mle.converged;

    const Index j = cfg.test_column;
    const ParamFunction coef = coordinate_function(j, "theta[" + std::to_string(j) + "]");
    const ParamFunction ame = ame_function(ds, j);
    const Eigen::VectorXd coef_null = Eigen::VectorXd::Constant(1, cfg.coefficient_null);
    const Eigen::VectorXd ame_null = Eigen::VectorXd::Constant(1, cfg.ame_null);
    const bool selected = std::find(fit.active.begin() + 1, fit.active.end(), j) != fit.active.end();

    std::optional<SelectionEvent> event;
    std::string event_error;
    if (selected) {
      try {
        event = build_selection_event(ds, fam, fit);
      } catch (const std::exception& e) {
        event_error = e.what();
      }
    }

    for (const Hypothesis h : {Hypothesis::coefficient, Hypothesis::ame}) {
      const auto hi = static_cast<std::size_t>(h);
      for (const Method m : kStudyMethods) {
        if (!RejectionTable::evaluated(h, m)) continue;
        const std::size_t slot = study_slot(m);
        const bool is_coef = h == Hypothesis::coefficient;
        try {
          InferenceResult res;
          switch (m) {
            case Method::db:
              res = db_wald(ds, fam, fit, is_coef ? coef : ame, is_coef ? coef_null : ame_null, cfg.level);
              break;
            case Method::tsvy:
              res = tsvy_wald(ds, fam, mle, is_coef ? coef : ame, is_coef ? coef_null : ame_null, cfg.level);
              break;
            case Method::calpha: {
              const AuxiliaryEstimate aux = is_coef ? auxiliary_coordinate_pin(ds, fam, fit.theta, j, cfg.coefficient_null)
                                                    : auxiliary_ame_pin(ds, fam, fit.theta, j, cfg.ame_null);
              res = c_alpha_test(ds, fam, aux, is_coef ? coef : ame, cfg.level);
              break;
            }
            case Method::si:
            case Method::si2:
              if (!selected) {
                res = InferenceResult::not_applicable(m, "", "variable not selected");
              } else if (!event) {
                throw NumericError(event_error);
              } else if (is_coef) {
                res = si_ci_coordinate(*event, j, cfg.coefficient_null, cfg.level);
              } else {
                res = si_ci_rho(augment_for_rho(*event, ame, m == Method::si), cfg.ame_null, cfg.level);
              }
              break;
          }
          rec.pinv[hi][slot] = res.pinv_used;
          if (res.applicable) {
            rec.p_value[hi][slot] = res.p_value;
          } else {
            rec.note[hi][slot] = res.note.empty() ? "not applicable" : res.note;
          }
        } catch (const std::exception& e) {
          rec.note[hi][slot] = std::string("failed: ") + e.what();
        }
      }
    }
  } catch (const std::exception& e) {
    rec.failed = true;
    rec.error = e.what();
  }
  return rec;
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SVYLASSO_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

RejectionTable run_rejection_study(const SimulationConfig& cfg, const std::function<void(int, int)>& progress) {
  if (cfg.replications < 0) throw ArgumentError("replications must be non-negative");
  if (!(cfg.level > 0.0 && cfg.level < 1.0)) throw ArgumentError("level must lie in (0, 1)");
  if (cfg.p < 2) throw ArgumentError("the design needs p >= 2");
  if (cfg.test_column < 1 || cfg.test_column > cfg.p) throw ArgumentError("test column out of range");

  RejectionTable table;
  table.config = cfg;
  table.replications = cfg.replications;
  table.records.resize(static_cast<std::size_t>(cfg.replications));

  std::optional<Population> shared;
  if (!cfg.regenerate_population) {
    shared = generate_population(cfg.population_size, cfg.p, cfg.prob, paper_theta0(cfg.p), derive_seed(cfg.seed, ~0ULL));
    stratum_rows(*shared, scheme_for(cfg));  // fail early on an empty stratum
  }
  const Population* pop = shared ? &*shared : nullptr;

  std::atomic<int> next{0};
  std::atomic<int> done{0};
  std::mutex progress_mutex;
  auto worker = [&] {
    for (int r = next++; r < cfg.replications; r = next++) {
      table.records[static_cast<std::size_t>(r)] = run_replication(cfg, static_cast<std::uint64_t>(r), pop);
      const int finished = ++done;
      if (progress) {
        std::lock_guard<std::mutex> lock(progress_mutex);
        progress(finished, cfg.replications);
      }
    }
  };
  const int workers = std::min(resolve_threads(cfg.threads), std::max(1, cfg.replications));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (const ReplicationRecord& rec : table.records) {
    if (rec.failed) {
      ++table.replication_failures;
      continue;
    }
    if (!rec.kkt_ok && rec.fit_converged) ++table.kkt_violations;
    if (!rec.fit_converged) ++table.lasso_nonconverged;
    if (!rec.mle_converged) ++table.mle_nonconverged;
    if (rec.selected == 0) ++table.empty_selections;
    for (std::size_t h = 0; h < 2; ++h) {
      for (const Method m : kStudyMethods) {
        if (!RejectionTable::evaluated(static_cast<Hypothesis>(h), m)) continue;
        const std::size_t s = study_slot(m);
        TestTally& t = table.tally[h][s];
        if (rec.pinv[h][s]) ++t.pinv;
        if (!std::isnan(rec.p_value[h][s])) {
          ++t.applicable;
          if (rec.p_value[h][s] < cfg.level) ++t.rejections;
        } else if (rec.note[h][s].rfind("failed", 0) == 0) {
          ++t.failures;
        } else {
          ++t.not_applicable;
        }
      }
    }
  }
  return table;
}

}  // namespace svylasso
