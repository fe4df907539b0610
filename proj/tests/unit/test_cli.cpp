#include <gtest/gtest.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include <nlohmann/json.hpp>
#include <svylasso/errors.hpp>
#include <svylasso/glm.hpp>
#include <svylasso/lasso.hpp>

#include "fixtures.hpp"
#include "svylasso_app/commands.hpp"
#include "svylasso_app/config.hpp"
#include "svylasso_app/csv.hpp"
#include "svylasso_app/errors.hpp"

using namespace svylasso;
using namespace svylasso::app;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() / ("svylasso_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Binary covariates x1..x5, y from a logit with a strong x1 effect, weights w.
void write_fixture(const std::string& path, std::uint64_t seed, Index n = 200, double beta1 = 1.5) {
  Eigen::VectorXd t0 = Eigen::VectorXd::Zero(6);
  t0[0] = 0.2;
  t0[1] = beta1;
  t0[2] = -1.0;
  const Dataset ds = fixtures::logit_sample(n, t0, seed, true);
  std::vector<std::vector<std::string>> rows;
  for (Index i = 0; i < ds.n(); ++i) {
    std::vector<std::string> r{format_number(ds.y[i]), format_number(ds.w[i])};
    for (Index j = 1; j <= 5; ++j) r.push_back(format_number(ds.X(i, j)));
    rows.push_back(r);
  }
  std::ofstream out(path);
  write_csv(out, {"y", "w", "x1", "x2", "x3", "x4", "x5"}, rows);
}

FitSpec fit_spec(const std::string& path) {
  FitSpec s;
  s.data.path = path;
  s.data.outcome = "y";
  s.data.weights = "w";
  return s;
}

const std::vector<std::string>& row_of(const TextTable& t, const std::string& name) {
  for (const auto& r : t.rows)
    if (r[0] == name) return r;
  throw std::runtime_error("no row " + name);
}

std::size_t col_of(const TextTable& t, const std::string& name) {
  for (std::size_t k = 0; k < t.header.size(); ++k)
    if (t.header[k] == name) return k;
  throw std::runtime_error("no column " + name);
}

}  // namespace

TEST(Csv, RoundTripFifteenDigits) {
  svylasso::Rng rng(1);
  for (int k = 0; k < 2000; ++k) {
    const double v = (rng.uniform() - 0.5) * std::pow(10.0, static_cast<int>(rng.below(40)) - 20);
    const std::string text = format_number(v);
    std::istringstream in("a\n" + text + "\n");
    const double back = parse_csv(in).values(0, 0);
    char a[32], b[32];
    std::snprintf(a, sizeof a, "%.14e", v);
    std::snprintf(b, sizeof b, "%.14e", back);
    EXPECT_STREQ(a, b);
  }
}

TEST(Csv, ParsesHeaderQuotesAndCrlf) {
  std::istringstream in("\xEF\xBB\xBF\"y\",x\r\n1,2.5\r\n\r\n0,-3e-2\r\n");
  const CsvFrame f = parse_csv(in);
  ASSERT_EQ(f.columns.size(), 2u);
  EXPECT_EQ(f.columns[0], "y");
  EXPECT_EQ(f.values.rows(), 2);
  EXPECT_EQ(f.values(1, 1), -0.03);
}

TEST(Csv, MissingAndBadCellsNameTheirPosition) {
  std::istringstream missing("y,x\n1,2\n0,\n");
  try {
    parse_csv(missing, "d.csv");
    FAIL();
  } catch (const UserError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("'x'"), std::string::npos) << e.what();
  }
  std::istringstream bad("y,x\n1,abc\n");
  EXPECT_THROW(parse_csv(bad), UserError);
  std::istringstream ragged("y,x\n1,2,3\n");
  EXPECT_THROW(parse_csv(ragged), UserError);
}

TEST(Config, ParsesAndValidates) {
  const ConfigMap m = parse_config("# comment\nscheme = exogenous\nprob = 0.4 # trailing\np = 2, 5\n");
  const StudyPlan plan = plan_from_config(m);
  EXPECT_EQ(plan.base.scheme, SchemeKind::exogenous);
  EXPECT_EQ(plan.base.prob, 0.4);
  EXPECT_EQ(plan.p_values, (std::vector<Index>{2, 5}));
  EXPECT_THROW(plan_from_config({{"colour", "red"}}), UserError);
  EXPECT_THROW(plan_from_config({{"level", "1.5"}}), UserError);
  EXPECT_THROW(plan_from_config({{"p", "1"}}), UserError);
  EXPECT_THROW(parse_config("novalue\n"), UserError);
}

TEST(Config, ShippedTableConfigsParse) {
  for (const char* name : {"table1.conf", "table1_n400.conf", "table1_p100.conf", "table2.conf", "smoke.conf"}) {
    const std::string path = std::string(SVYLASSO_SOURCE_DIR) + "/configs/" + name;
    ASSERT_TRUE(fs::exists(path)) << path;
    EXPECT_NO_THROW(plan_from_config(read_config(path))) << name;
  }
  const StudyPlan t1 = plan_from_config(read_config(std::string(SVYLASSO_SOURCE_DIR) + "/configs/table1.conf"));
  EXPECT_EQ(t1.base.scheme, SchemeKind::standard);
  EXPECT_EQ(t1.base.per_stratum, 50);
  EXPECT_EQ(t1.base.replications, 1000);
}

TEST(Fit, JsonRoundTrip) {
  TempDir dir;
  write_fixture(dir.file("d.csv"), 2);
  FitSpec spec = fit_spec(dir.file("d.csv"));
  spec.lambda = "0.02";
  std::ostringstream out, err;
  ASSERT_EQ(cmd_fit(spec, dir.file("fit.json"), out, err), kExitOk) << err.str();
  const nlohmann::json j = nlohmann::json::parse(slurp(dir.file("fit.json")));
  const Dataset ds = load_dataset(spec.data);
  const LassoFit direct = fit_penalized(ds, logit(), 0.02);
  const std::vector<double> theta = j.at("theta");
  ASSERT_EQ(theta.size(), 6u);
  for (std::size_t k = 0; k < 6; ++k) EXPECT_EQ(theta[k], direct.theta[static_cast<Index>(k)]);
  EXPECT_EQ(j.at("names")[1], "x1");
  EXPECT_EQ(j.at("lambda"), 0.02);
  EXPECT_TRUE(j.at("kkt").at("satisfied").get<bool>());
  EXPECT_EQ(j.at("active").get<std::vector<Index>>(), direct.active);
}

TEST(Fit, CrossValidatedFitReportsPath) {
  TempDir dir;
  write_fixture(dir.file("d.csv"), 3);
  const FitOutcome fo = run_fit(fit_spec(dir.file("d.csv")));
  ASSERT_TRUE(fo.cv.has_value());
  EXPECT_EQ(fo.fit.lambda, fo.cv->lambda);
  EXPECT_TRUE(fo.kkt.satisfied);
}

TEST(Fit, EmptyCovariatesGiveInterceptOnly) {
  TempDir dir;
  write_fixture(dir.file("d.csv"), 4);
  FitSpec spec = fit_spec(dir.file("d.csv"));
  spec.data.covariates = std::vector<std::string>{};
  const FitOutcome fo = run_fit(spec);
  EXPECT_EQ(fo.data.p(), 0);
  const double ybar = fo.data.w.dot(fo.data.y) / fo.data.w.sum();
  EXPECT_NEAR(fixtures::lgt(fo.fit.theta[0]), ybar, 1e-9);
}

TEST(Fit, DefaultsToUnitWeights) {
  TempDir dir;
  write_fixture(dir.file("d.csv"), 5);
  FitSpec spec = fit_spec(dir.file("d.csv"));
  spec.data.weights.clear();
  spec.data.covariates = std::vector<std::string>{"x1", "x2"};
  const Dataset ds = load_dataset(spec.data);
  EXPECT_TRUE((ds.w.array() == 1.0).all());
  EXPECT_EQ(ds.p(), 2);
}

TEST(Fit, UserErrors) {
  TempDir dir;
  write_fixture(dir.file("d.csv"), 6);
  std::ostringstream out, err;
  FitSpec spec = fit_spec(dir.file("missing.csv"));
  EXPECT_EQ(cmd_fit(spec, "", out, err), kExitUser);
  spec = fit_spec(dir.file("d.csv"));
  spec.data.outcome = "nope";
  EXPECT_EQ(cmd_fit(spec, "", out, err), kExitUser);
  spec = fit_spec(dir.file("d.csv"));
  spec.data.outcome = "w";  // not binary
  spec.data.weights.clear();
  EXPECT_EQ(cmd_fit(spec, "", out, err), kExitUser);
  spec = fit_spec(dir.file("d.csv"));
  spec.lambda = "-1";
  EXPECT_EQ(cmd_fit(spec, "", out, err), kExitUser);
  EXPECT_NE(err.str().find("error"), std::string::npos);
}

TEST(Exit, CodesByErrorKind) {
  std::ostringstream err;
  EXPECT_EQ(guarded([] { return kExitOk; }, err), kExitOk);
  EXPECT_EQ(guarded([]() -> int { throw UserError("x"); }, err), kExitUser);
  EXPECT_EQ(guarded([]() -> int { throw DataError("x"); }, err), kExitUser);
  EXPECT_EQ(guarded([]() -> int { throw NumericError("x"); }, err), kExitNumeric);
  EXPECT_EQ(guarded([]() -> int { throw ConvergenceError("x", Eigen::VectorXd()); }, err), kExitNumeric);
  EXPECT_EQ(guarded([]() -> int { throw std::logic_error("x"); }, err), kExitInternal);
  EXPECT_NE(kExitUser, kExitNumeric);
}

TEST(Infer, TableLayoutAndNotSelected) {
  TempDir dir;
  write_fixture(dir.file("d.csv"), 7, 300);
  InferSpec spec;
  spec.fit = fit_spec(dir.file("d.csv"));
  spec.fit.lambda = "0.05";
  const InferReport rep = run_infer(spec);
  const std::vector<std::string> head{"variable", "GLM", "Lasso", "DB", "SI", "p_tsvy", "p_DB", "p_Calpha", "p_SI"};
  for (std::size_t k = 0; k < head.size(); ++k) EXPECT_EQ(rep.coefficients.header[k], head[k]);
  ASSERT_EQ(rep.coefficients.rows.size(), 5u);
  const FitOutcome fo = run_fit(spec.fit);
  int unselected = 0;
  for (Index j = 1; j <= 5; ++j) {
    const auto& row = rep.coefficients.rows[static_cast<std::size_t>(j - 1)];
    if (fo.fit.theta[j] == 0.0) {
      ++unselected;
      EXPECT_EQ(row[col_of(rep.coefficients, "SI")], "-");
      EXPECT_EQ(row[col_of(rep.coefficients, "p_SI")], "-");
      EXPECT_NE(row[col_of(rep.coefficients, "p_DB")], "-");
    }
  }
  EXPECT_GT(unselected, 0);
}

TEST(Infer, StrongSignalRejectedByUnconditionalTests) {
  TempDir dir;
  write_fixture(dir.file("d.csv"), 8, 400, 2.5);
  InferSpec spec;
  spec.fit = fit_spec(dir.file("d.csv"));
  spec.ame = true;
  const InferReport rep = run_infer(spec);
  const auto& row = row_of(rep.coefficients, "x1");
  for (const char* c : {"p_tsvy", "p_DB", "p_Calpha"}) {
    EXPECT_LT(std::stod(row[col_of(rep.coefficients, c)]), 0.01) << c;
  }
  const auto& arow = row_of(rep.ame, "x1");
  for (const char* c : {"p_tsvy", "p_DB", "p_Calpha"}) {
    EXPECT_LT(std::stod(arow[col_of(rep.ame, c)]), 0.01) << c;
  }
  // SI may have little power on this fixture.
  for (const char* c : {"p_SI"}) {
    const double v = std::stod(row[col_of(rep.coefficients, c)]);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
  for (const char* c : {"p_SI", "p_SI2"}) {
    const double v = std::stod(arow[col_of(rep.ame, c)]);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(Infer, WiderLevelGivesNarrowerIntervals) {
  TempDir dir;
  write_fixture(dir.file("d.csv"), 9, 300);
  InferSpec spec;
  spec.fit = fit_spec(dir.file("d.csv"));
  spec.fit.lambda = "0.02";
  spec.level = 0.05;
  const InferReport a = run_infer(spec);
  spec.level = 0.5;
  const InferReport b = run_infer(spec);
  for (std::size_t r = 0; r < a.coefficients.rows.size(); ++r) {
    for (const auto& [lo, hi] : {std::pair{"DB_lower", "DB_upper"}, std::pair{"SI_lower", "SI_upper"}}) {
      const std::string& l1 = a.coefficients.rows[r][col_of(a.coefficients, lo)];
      if (l1 == "-") continue;
      const double wa = std::stod(a.coefficients.rows[r][col_of(a.coefficients, hi)]) - std::stod(l1);
      const double wb = std::stod(b.coefficients.rows[r][col_of(b.coefficients, hi)]) -
                        std::stod(b.coefficients.rows[r][col_of(b.coefficients, lo)]);
      EXPECT_LT(wb, wa) << r << " " << lo;
    }
  }
}

TEST(Infer, MethodSubset) {
  EXPECT_EQ(parse_methods("db, si"), (std::vector<Method>{Method::db, Method::si}));
  EXPECT_THROW(parse_methods("db,xyz"), UserError);
  EXPECT_THROW(parse_methods(""), UserError);
  TempDir dir;
  write_fixture(dir.file("d.csv"), 10);
  InferSpec spec;
  spec.fit = fit_spec(dir.file("d.csv"));
  spec.fit.lambda = "0.02";
  spec.methods = {Method::db};
  const InferReport rep = run_infer(spec);
  for (const auto& row : rep.coefficients.rows) {
    EXPECT_EQ(row[col_of(rep.coefficients, "p_tsvy")], "-");
    EXPECT_EQ(row[col_of(rep.coefficients, "p_SI")], "-");
    EXPECT_NE(row[col_of(rep.coefficients, "p_DB")], "-");
  }
}

TEST(Simulate, SmokeRunIsFastAndReproducible) {
  TempDir a, b, c;
  ConfigMap cfg{{"replications", "10"}, {"p", "2"}, {"seed", "77"}, {"threads", "1"}};
  std::ostringstream err;
  const auto t0 = std::chrono::steady_clock::now();
  ASSERT_EQ(cmd_simulate(cfg, a.file("out"), err, true), kExitOk) << err.str();
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 60.0);
  ASSERT_EQ(cmd_simulate(cfg, b.file("out"), err, true), kExitOk);
  cfg["threads"] = "8";
  ASSERT_EQ(cmd_simulate(cfg, c.file("out"), err, true), kExitOk);
  for (const char* f : {"rejection.csv", "diagnostics.csv", "study.json"}) {
    const std::string first = slurp(a.file("out/") + f);
    EXPECT_FALSE(first.empty()) << f;
    EXPECT_EQ(first, slurp(b.file("out/") + f)) << f;
    EXPECT_EQ(first, slurp(c.file("out/") + f)) << f;
  }
  std::istringstream in(slurp(a.file("out/rejection.csv")));
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "hypothesis,test,p=2");
}

TEST(Binary, ExitCodes) {
  TempDir dir;
  write_fixture(dir.file("d.csv"), 11);
  const std::string exe = SVYLASSO_CLI;
  auto run = [&](const std::string& args) {
    const int status = std::system((exe + " " + args + " >/dev/null 2>&1").c_str());
    return WEXITSTATUS(status);
  };
  EXPECT_EQ(run("fit --data " + dir.file("d.csv") + " --outcome y --weights w --lambda 0.03"), 0);
  EXPECT_EQ(run("infer --data " + dir.file("d.csv") + " --outcome y --lambda 0.03 --methods db,tsvy"), 0);
  EXPECT_EQ(run("fit --data " + dir.file("none.csv") + " --outcome y"), 2);
  EXPECT_EQ(run("infer --data " + dir.file("d.csv") + " --outcome y --methods nope"), 2);
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_EQ(run("simulate --out " + dir.file("s") + " --replications 0 --level 7"), 2);
}
