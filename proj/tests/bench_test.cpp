#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "pce/bench.hpp"
#include "pce/errors.hpp"

using namespace pce;
using namespace pce::bench;

namespace {

ExperimentConfig configure(Experiment e, const std::string& text) {
  ExperimentConfig cfg = default_config(e);
  std::istringstream in(text);
  apply_config(cfg, in);
  validate(cfg);
  return cfg;
}

std::string table_text(const ExperimentConfig& cfg, const ResultTable& t) {
  std::ostringstream os;
  write_table(os, cfg, t);
  return os.str();
}

}  // namespace

TEST(Config, Defaults) {
  const ExperimentConfig r = default_config(Experiment::Recovery);
  EXPECT_EQ(r.d, 15);
  EXPECT_EQ(r.p, 2);
  EXPECT_EQ(r.replications, 60u);
  EXPECT_EQ(r.n_over_p, (std::vector<double>{1.25, 1.5, 2, 3, 5, 10}));
  const ExperimentConfig d = default_config(Experiment::Duffing);
  EXPECT_EQ(d.n, (std::vector<std::size_t>{242, 440, 660}));
  const ExperimentConfig b = default_config(Experiment::Battery);
  EXPECT_EQ(b.tp, (std::vector<double>{0, 200, 400, 600}));
  EXPECT_EQ(b.d, 7);
}

TEST(Config, Errors) {
  ExperimentConfig cfg = default_config(Experiment::Recovery);
  std::istringstream unknown("p = 3\nbogus = 1\n");
  try {
    apply_config(cfg, unknown);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  EXPECT_THROW(configure(Experiment::Recovery, "replications = 0"), ConfigError);
  EXPECT_THROW(configure(Experiment::Recovery, "strategies = standard, magic"), ConfigError);
  EXPECT_THROW(configure(Experiment::Recovery, "n_over_p = 1, -2"), ConfigError);
  EXPECT_THROW(configure(Experiment::Recovery, "p = two"), ConfigError);
  EXPECT_THROW(configure(Experiment::Recovery, "experiment = duffing"), ConfigError);
  EXPECT_THROW(configure(Experiment::Duffing, "d = 4"), ConfigError);
  EXPECT_THROW(parse_experiment("weather"), ConfigError);
}

TEST(Config, CommentsAndEcho) {
  const ExperimentConfig cfg = configure(Experiment::Recovery, "# comment\n  p = 3 \nseed = 42\nworkers = 4\n");
  EXPECT_EQ(cfg.p, 3);
  EXPECT_EQ(cfg.seed, 42u);
  bool has_p = false;
  for (const auto& [k, v] : describe(cfg)) {
    EXPECT_NE(k, "workers");
    if (k == "p") has_p = v == "3";
  }
  EXPECT_TRUE(has_p);
}

TEST(Seeds, DistinctPerRow) {
  const ExperimentConfig cfg = default_config(Experiment::Recovery);
  EXPECT_EQ(row_seed(cfg, "standard", 2, 170, 0), row_seed(cfg, "standard", 2, 170, 0));
  EXPECT_NE(row_seed(cfg, "standard", 2, 170, 0), row_seed(cfg, "standard", 2, 170, 1));
  EXPECT_NE(row_seed(cfg, "standard", 2, 170, 0), row_seed(cfg, "lhs", 2, 170, 0));
  EXPECT_NE(row_seed(cfg, "standard", 2, 170, 0), row_seed(cfg, "standard", 2, 204, 0));
}

TEST(Recovery, NoiseFreeSquareDesignsRecover) {
  const ExperimentConfig cfg = configure(Experiment::Recovery,
                                         "d = 2\np = 3\nnoise_rel = 0\nn = 10\nreplications = 5\n"
                                         "strategies = standard, lhs, coh-opt, d-coh-opt\nn_validation = 500\n");
  const ResultTable t = run_recovery(cfg);
  ASSERT_EQ(t.rows.size(), 20u);
  EXPECT_EQ(t.failures(), 0u);
  for (const auto& r : t.rows) {
    EXPECT_TRUE(r.recovered) << r.strategy << " " << r.relative_error;
    EXPECT_GE(r.relative_error, 0.0);
    if (r.delta_hat < 1.0) EXPECT_LE(r.condition, (1.0 + r.delta_hat) / (1.0 - r.delta_hat));
  }
}

TEST(Recovery, ForwardsRowFailures) {
  const ExperimentConfig cfg = configure(Experiment::Recovery,
                                         "d = 2\np = 2\nn = 5\nreplications = 2\nstrategies = rand-quad\nquad_level = 2\n");
  const ResultTable t = run_recovery(cfg);
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.failures(), 2u);
  EXPECT_NE(t.rows[0].status, "ok");
}

TEST(Determinism, WorkerCountDoesNotChangeOutput) {
  const std::string base =
      "d = 3\np = 2\nn_over_p = 1.5, 3\nreplications = 3\nn_validation = 300\n"
      "strategies = standard, lhs, asymptotic, coh-opt, d-coh-opt, a-coh-opt, d-opt, qmc, rand-quad\n";
  const ExperimentConfig one = configure(Experiment::Recovery, base + "workers = 1\n");
  const ExperimentConfig three = configure(Experiment::Recovery, base + "workers = 3\n");
  const std::string a = table_text(one, run_recovery(one));
  EXPECT_EQ(a, table_text(three, run_recovery(three)));
  EXPECT_EQ(a, table_text(one, run_recovery(one)));
  const ExperimentConfig other = configure(Experiment::Recovery, base + "seed = 2\n");
  EXPECT_NE(a, table_text(other, run_recovery(other)));
}

TEST(Duffing, SmallRunAndSweep) {
  const ExperimentConfig cfg = configure(Experiment::Duffing,
                                         "p = 3\nn = 40\nreplications = 2\nn_validation = 200\ntimes = 1, 4\n"
                                         "strategies = standard, d-coh-opt\np_sweep = 1, 2\n");
  const ResultTable t = run_duffing(cfg);
  EXPECT_EQ(t.failures(), 0u);
  std::size_t sweep = 0, main = 0;
  for (const auto& r : t.rows) {
    if (r.strategy == "p-sweep") {
      ++sweep;
      EXPECT_EQ(r.n, 20 * basis_cardinality(3, r.p));
    } else {
      ++main;
    }
    EXPECT_TRUE(std::isfinite(r.relative_error));
    // low orders cannot follow the response at t = 4
    if (r.time == 1.0) EXPECT_LT(r.relative_error, r.p == 1 ? 0.4 : 0.15);
  }
  EXPECT_EQ(main, 2u * 1u * 2u * 2u);
  EXPECT_EQ(sweep, 2u * 2u * 2u);
}

TEST(Battery, DefaultSampleSizes) {
  ExperimentConfig cfg = default_config(Experiment::Battery);
  for (auto [p, n] : std::vector<std::pair<int, std::size_t>>{{2, 37}, {3, 121}}) {
    cfg.p = p;
    EXPECT_EQ(experiment_basis(cfg, p).size() + 1, n);
  }
}

TEST(Battery, ZeroVarianceGivesZeroError) {
  const ExperimentConfig cfg = configure(Experiment::Battery,
                                         "p = 1\nreplications = 1\nn_validation = 20\ntp = 0, 300\n"
                                         "current_low = 20\ncurrent_high = 20\nstate_cov = 0\nnoise_sd = 0, 0, 0\n"
                                         "strategies = standard\n");
  const ResultTable t = run_battery(cfg);
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[0].n, 9u);
  for (const auto& r : t.rows) {
    EXPECT_EQ(r.status, "ok");
    EXPECT_LT(r.relative_error, 1e-10);
  }
}

TEST(Ks, Examples) {
  EXPECT_DOUBLE_EQ(ks_distance({1, 2, 3}, {1, 2, 3}), 0.0);
  EXPECT_DOUBLE_EQ(ks_distance({1, 2}, {3, 4}), 1.0);
  EXPECT_DOUBLE_EQ(ks_distance({1, 2, 3, 4}, {3, 4, 5, 6}), 0.5);
  EXPECT_THROW(ks_distance({}, {1.0}), UndefinedError);
}

TEST(Output, CsvLayout) {
  const ExperimentConfig cfg = configure(Experiment::Recovery, "d = 2\np = 2\nn = 9\nreplications = 2\nstrategies = standard\n");
  const ResultTable t = run_recovery(cfg);
  const std::string text = table_text(cfg, t);
  EXPECT_NE(text.find("strategy,p,N,replicate,time,relative_error,recovered,delta_hat,condition,status"), std::string::npos);
  EXPECT_NE(text.find(std::string(kVersion)), std::string::npos);
  std::ostringstream agg;
  write_aggregate(agg, t);
  EXPECT_NE(agg.str().find("standard"), std::string::npos);
}
