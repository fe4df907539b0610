#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "svylasso/dataset.hpp"
#include "svylasso/inference.hpp"
#include "svylasso/lasso.hpp"

namespace svylasso {

/// Finite population drawn from the binary-regressor logit design.
struct Population {
  Eigen::MatrixXd X;  // N × (p+1) with the intercept column
  Eigen::VectorXd y;
  Eigen::VectorXd theta0;
  double prob = 0.5;
};

/// θ0 = (1, 1, 1, 0, ..., 0)' of length p+1. Requires p >= 2.
Eigen::VectorXd paper_theta0(Index p);

/// x̃_ij iid Bernoulli(prob), y_i ~ Bernoulli(Λ(x_i'θ0)).
Population generate_population(Index size, Index p, double prob, const Eigen::VectorXd& theta0, std::uint64_t seed);

enum class SchemeKind { standard, exogenous };

/// Four strata with population shares q_h and n_s draws (with replacement)
/// from each. Standard: consecutive row blocks of the given sizes.
/// Exogenous: the cells (x̃1, x̃2) = (0,0), (0,1), (1,0), (1,1).
struct StratificationScheme {
  SchemeKind kind = SchemeKind::standard;
  std::vector<Index> block_sizes;  // standard only
  std::vector<double> shares;      // q_h, summing to one
  Index per_stratum = 50;          // n_s

  /// Blocks of N·(0.1, 0.2, 0.3, 0.4) rows.
  static StratificationScheme standard(Index per_stratum, Index population_size = 10000);
  /// Cell shares implied by independent Bernoulli(prob) regressors.
  static StratificationScheme exogenous(Index per_stratum, double prob);

  Index sample_size() const noexcept { return per_stratum * static_cast<Index>(shares.size()); }
  /// Raw weight q_h / (n_h / n) of stratum h.
  double raw_weight(std::size_t h) const;
};

/// Row indices of each stratum in the population. Throws DataError when a
/// stratum is empty.
std::vector<std::vector<Index>> stratum_rows(const Population& pop, const StratificationScheme& scheme);

/// Stratified sample with weights rescaled to sum to n. Rows are ordered by
/// stratum.
Dataset draw_sample(const Population& pop, const StratificationScheme& scheme, std::uint64_t seed);

/// Monte Carlo value of the population AME of slope column j (default: the
/// first slope) under the design: E[Λ(x'θ0 | x_j=1) - Λ(x'θ0 | x_j=0)].
double true_ame_oracle(const Eigen::VectorXd& theta0, double prob, std::int64_t draws, std::uint64_t seed,
                       Index j = 1);

enum class Hypothesis { coefficient = 0, ame = 1 };
inline constexpr std::array<Method, 5> kStudyMethods = {Method::db, Method::calpha, Method::si, Method::si2,
                                                        Method::tsvy};
std::size_t study_slot(Method m) noexcept;

struct SimulationConfig {
  SchemeKind scheme = SchemeKind::standard;
  Index per_stratum = 50;  // n_s; n = 4 n_s
  Index p = 2;
  Index population_size = 10000;
  double prob = 0.5;
  int replications = 1000;
  double level = 0.05;
  std::uint64_t seed = 20240607;
  bool cross_validate = true;
  double fixed_lambda = 0.05;  // used when cross_validate is false
  int cv_folds = 10;
  CvRule cv_rule = CvRule::one_se;  // largest λ within one SE of the best mean AUC
  Index test_column = 1;
  double coefficient_null = 1.0;
  double ame_null = 0.11;
  bool regenerate_population = true;
  int threads = 0;  // 0: SVYLASSO_THREADS, else hardware concurrency
  int mle_iterations = 25;
};

/// Counts for one (hypothesis, test) cell.
struct TestTally {
  int rejections = 0;
  int applicable = 0;
  int not_applicable = 0;
  int failures = 0;
  int pinv = 0;
  /// Percentage among replications where the test was computed.
  double rate() const noexcept { return applicable > 0 ? 100.0 * rejections / applicable : 0.0; }
  /// Percentage over all replications, not-applicable counted as acceptance.
  double rate_all(int replications) const noexcept {
    return replications > 0 ? 100.0 * rejections / replications : 0.0;
  }
};

struct ReplicationRecord {
  bool failed = false;
  std::string error;
  double lambda = 0.0;
  Index selected = 0;  // active slopes
  bool kkt_ok = true;
  bool fit_converged = true;
  bool mle_converged = true;
  // p-values by [hypothesis][study_slot], NaN when not computed.
  std::array<std::array<double, 5>, 2> p_value{};
  std::array<std::array<bool, 5>, 2> pinv{};
  std::array<std::array<std::string, 5>, 2> note{};
};

struct RejectionTable {
  SimulationConfig config;
  int replications = 0;
  std::array<std::array<TestTally, 5>, 2> tally{};
  int replication_failures = 0;
  int kkt_violations = 0;
  int lasso_nonconverged = 0;
  int mle_nonconverged = 0;
  int empty_selections = 0;
  std::vector<ReplicationRecord> records;

  const TestTally& at(Hypothesis h, Method m) const { return tally[static_cast<std::size_t>(h)][study_slot(m)]; }
  /// Whether the study evaluates test m for hypothesis h (SI2 only for the AME).
  static bool evaluated(Hypothesis h, Method m) noexcept { return !(h == Hypothesis::coefficient && m == Method::si2); }
};

/// One replication: draw, fit, test. Never throws; failures are recorded.
ReplicationRecord run_replication(const SimulationConfig& cfg, std::uint64_t index, const Population* shared);

/// All replications, spread over worker threads and merged by replication
/// index, so the result does not depend on the number of workers.
RejectionTable run_rejection_study(const SimulationConfig& cfg,
                                   const std::function<void(int, int)>& progress = {});

/// Worker count: cfg.threads, else SVYLASSO_THREADS, else hardware concurrency.
int resolve_threads(int requested);

}  // namespace svylasso
