#include <gtest/gtest.h>

#include <svylasso/debiased.hpp>
#include <svylasso/glm.hpp>
#include <svylasso/inference.hpp>
#include <svylasso/lasso.hpp>
#include <svylasso/random.hpp>
#include <svylasso/sampling.hpp>

using namespace svylasso;

// Debiased 95% intervals for the first slope, n = 400, p = 10, standard
// stratification, cross-validated λ.
TEST(Coverage, DebiasedIntervalsN400P10) {
  const Eigen::VectorXd t0 = paper_theta0(10);
  const StratificationScheme sch = StratificationScheme::standard(100);
  int covered = 0, used = 0;
  for (std::uint64_t r = 0; r < 1000; ++r) {
    const std::uint64_t seed = derive_seed(424242, r);
    const Population pop = generate_population(10000, 10, 0.5, t0, derive_seed(seed, 1));
    const Dataset ds = draw_sample(pop, sch, derive_seed(seed, 2));
    CvSpec spec;
    spec.seed = derive_seed(seed, 3);
    const LassoFit fit = cv_select_lambda(ds, logit(), spec).fit;
    const InferenceResult w = db_wald(ds, logit(), fit, coordinate_function(1), Eigen::VectorXd::Constant(1, 1.0));
    covered += w.ci_lower <= 1.0 && 1.0 <= w.ci_upper;
    ++used;
  }
  const double rate = 100.0 * covered / used;
  RecordProperty("coverage", std::to_string(rate));
  EXPECT_GE(rate, 92.0);
  EXPECT_LE(rate, 98.0);
}
