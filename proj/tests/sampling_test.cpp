#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "pce/errors.hpp"
#include "pce/sampling.hpp"

using namespace pce;

namespace {

BasisSpec legendre(int d, int p) { return BasisSpec::isotropic(PolyFamily::legendre(), d, p); }
BasisSpec hermite(int d, int p) { return BasisSpec::isotropic(PolyFamily::hermite(), d, p); }

double row_sum(const BasisSpec& spec, const SampleSet& s, Eigen::Index i) {
  std::vector<double> x(static_cast<std::size_t>(s.dimension()));
  for (int k = 0; k < s.dimension(); ++k) x[static_cast<std::size_t>(k)] = s.points(i, k);
  return (s.weights(i) * spec.eval_row(x)).squaredNorm();
}

}  // namespace

TEST(Standard, SupportAndUnitWeights) {
  const SampleSet s = sample_standard(legendre(2, 3), 500, 1);
  EXPECT_EQ(s.points.cols(), 2);
  EXPECT_TRUE((s.points.array().abs() <= 1.0).all());
  EXPECT_TRUE((s.weights.array() == 1.0).all());
}

TEST(Standard, UniformMean) {
  const SampleSet s = sample_standard(legendre(1, 1), 100000, 2);
  EXPECT_LT(std::abs(s.points.mean()), 3.0 * std::sqrt(1.0 / 3.0 / 100000.0));
}

TEST(Standard, BetaCurrentMean) {
  const BasisSpec spec({PolyFamily::beta_distribution(21.2, 31.8)}, 1);
  const std::size_t n = 100000;
  const SampleSet s = sample_standard(spec, n, 3);
  const Eigen::ArrayXd y = 0.5 * (s.points.col(0).array() + 1.0);
  const double a = 21.2, b = 31.8;
  const double sd = std::sqrt(a * b / ((a + b) * (a + b) * (a + b + 1.0)));
  EXPECT_NEAR(y.mean(), 0.4, 3.0 * sd / std::sqrt(static_cast<double>(n)));
}

TEST(Standard, SeedReproducible) {
  const auto spec = hermite(3, 2);
  EXPECT_TRUE(sample_standard(spec, 50, 9).points == sample_standard(spec, 50, 9).points);
  EXPECT_FALSE(sample_standard(spec, 50, 9).points == sample_standard(spec, 50, 10).points);
}

TEST(Lhs, FourQuarterStrata) {
  const SampleSet s = sample_lhs(legendre(1, 1), 4, 5);
  std::set<int> strata;
  for (int i = 0; i < 4; ++i) strata.insert(static_cast<int>(std::floor(4.0 * family_cdf(PolyFamily::legendre(), s.points(i, 0)))));
  EXPECT_EQ(strata, (std::set<int>{0, 1, 2, 3}));
}

TEST(Lhs, StratificationEveryDimension) {
  const BasisSpec spec({PolyFamily::hermite(), PolyFamily::legendre(), PolyFamily::beta_distribution(2.0, 3.0)}, 2);
  const std::size_t n = 100;
  const SampleSet s = sample_lhs(spec, n, 6);
  for (int k = 0; k < 3; ++k) {
    std::vector<int> strata;
    for (Eigen::Index i = 0; i < s.points.rows(); ++i)
      strata.push_back(static_cast<int>(std::floor(static_cast<double>(n) * family_cdf(spec.families()[static_cast<std::size_t>(k)], s.points(i, k)))));
    std::sort(strata.begin(), strata.end());
    for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(strata[i], static_cast<int>(i));
  }
  EXPECT_TRUE((s.weights.array() == 1.0).all());
}

TEST(Lhs, GaussianScoresIncreaseWithStratum) {
  const SampleSet s = sample_lhs(hermite(1, 1), 100, 7);
  std::vector<double> z(s.points.col(0).data(), s.points.col(0).data() + 100);
  std::sort(z.begin(), z.end());
  for (std::size_t i = 1; i < z.size(); ++i) EXPECT_LT(z[i - 1], z[i]);
  EXPECT_EQ(sample_lhs(hermite(2, 1), 1, 8).size(), 1u);
}

TEST(Asymptotic, ChebyshevWeights) {
  const SampleSet s = sample_asymptotic(legendre(2, 3), 200, 11);
  EXPECT_EQ(s.strategy, Strategy::AsymptoticChebyshev);
  for (Eigen::Index i = 0; i < s.points.rows(); ++i) {
    double w = 1.0;
    for (int k = 0; k < 2; ++k) w *= std::pow(1.0 - s.points(i, k) * s.points(i, k), 0.25);
    EXPECT_NEAR(s.weights(i), w, 1e-14);
    EXPECT_LT(s.points.row(i).cwiseAbs().maxCoeff(), 1.0);
  }
  EXPECT_NEAR(std::pow(1.0 - 0.36, 0.25), 0.89442719099991586, 1e-15);
}

TEST(Asymptotic, HermiteBall) {
  const SampleSet s = sample_asymptotic(hermite(2, 4), 5000, 12);
  EXPECT_EQ(s.strategy, Strategy::AsymptoticBall);
  const double radius = std::sqrt(2.0) * 3.0;
  for (Eigen::Index i = 0; i < s.points.rows(); ++i) {
    const double r2 = s.points.row(i).squaredNorm();
    EXPECT_LE(std::sqrt(r2), radius + 1e-12);
    EXPECT_NEAR(s.weights(i), std::exp(-r2 / 4.0), 1e-14);
  }
}

TEST(Asymptotic, MixedFamiliesRejected) {
  const BasisSpec spec({PolyFamily::legendre(), PolyFamily::hermite()}, 2);
  EXPECT_THROW(sample_asymptotic(spec, 10, 1), UnsupportedStrategyError);
}

TEST(BValue, Examples) {
  const double x1[] = {1.0};
  const double x0[] = {0.0};
  EXPECT_NEAR(b_value(legendre(1, 0), x1), 1.0, 1e-15);
  EXPECT_NEAR(b_value(legendre(1, 1), x1), 2.0, 1e-14);
  EXPECT_NEAR(b_value(legendre(1, 2), x0), 1.5, 1e-14);
}

TEST(CoherenceOptimal, RowNormIdentity) {
  for (const auto& spec : {legendre(4, 4), hermite(4, 4), legendre(2, 15), hermite(2, 15)}) {
    const SampleSet s = sample_coherence_optimal(spec, 300, 21);
    const double P = static_cast<double>(spec.size());
    for (Eigen::Index i = 0; i < s.points.rows(); ++i) EXPECT_NEAR(row_sum(spec, s, i), P, 1e-8 * P);
    EXPECT_TRUE((s.weights.array() > 0.0).all());
    EXPECT_TRUE(s.metadata.count("acceptance_rate"));
  }
}

TEST(CoherenceOptimal, OrderZeroIsStandard) {
  const SampleSet s = sample_coherence_optimal(legendre(3, 0), 50, 22);
  EXPECT_TRUE((s.weights.array() == 1.0).all());
}

TEST(CoherenceOptimal, RepeatedPointsAreRare) {
  const BasisSpec spec({PolyFamily::beta_distribution(21.2, 31.8), PolyFamily::hermite(), PolyFamily::hermite(),
                        PolyFamily::hermite(), PolyFamily::hermite(), PolyFamily::hermite(), PolyFamily::hermite()},
                       3);
  std::size_t repeats = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const SampleSet s = sample_coherence_optimal(spec, 121, seed);
    std::set<std::vector<double>> rows;
    for (Eigen::Index i = 0; i < s.points.rows(); ++i) rows.insert(std::vector<double>(s.points.row(i).begin(), s.points.row(i).end()));
    repeats += 121 - rows.size();
  }
  EXPECT_LE(repeats, 10u);
}

TEST(CoherenceOptimal, InformationMatrixIsUnbiased) {
  // Hermite with the orthogonality proposal has the stickiest chain; E[M] = I still holds.
  const BasisSpec spec = BasisSpec::isotropic(PolyFamily::hermite(), 2, 3);
  McmcOptions opts;
  opts.proposal = McmcOptions::Proposal::Orthogonality;
  const SampleSet s = sample_coherence_optimal(spec, 50000, 25, opts);
  const Eigen::MatrixXd x = s.weights.asDiagonal() * spec.eval_matrix(s.points);
  const Eigen::MatrixXd m = x.transpose() * x / static_cast<double>(s.size());
  EXPECT_LT((m - Eigen::MatrixXd::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff(), 0.03);
}

TEST(CoherenceOptimal, EndpointMassMatchesTargetDensity) {
  // Target density f B^2 / P on [-1, 1], integrated over |x| > 0.9 by Gauss quadrature.
  const BasisSpec spec = legendre(1, 15);
  const QuadratureRule q = gauss_rule(PolyFamily::legendre(), 200);
  auto mass = [&](double lo, double hi) {
    double s = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      // map the rule onto [lo, hi]
      const double x = lo + (hi - lo) * 0.5 * (q.nodes[i] + 1.0);
      const double xs[] = {x};
      const double b = b_value(spec, xs);
      s += q.weights[i] * (hi - lo) * 0.5 * b * b / static_cast<double>(spec.size());
    }
    return s;
  };
  const double tail = mass(-1.0, -0.9) + mass(0.9, 1.0);
  ASSERT_GT(tail, 0.1);  // uniform would give 0.1

  const std::size_t n = 100000;
  const SampleSet s = sample_coherence_optimal(spec, n, 24);
  const double freq = static_cast<double>((s.points.col(0).array().abs() > 0.9).count()) / static_cast<double>(n);
  EXPECT_GT(freq, 0.1);
  EXPECT_NEAR(freq, tail, 0.02);
}

TEST(RandomizedQuadrature, FullGridAndMembership) {
  const BasisSpec spec1 = legendre(1, 3);
  const SampleSet all = sample_randomized_quadrature(spec1, 6, 6, 31);
  const QuadratureRule q6 = gauss_rule(PolyFamily::legendre(), 6);
  std::vector<double> got(all.points.col(0).data(), all.points.col(0).data() + 6);
  std::sort(got.begin(), got.end());
  for (std::size_t i = 0; i < 6; ++i) EXPECT_DOUBLE_EQ(got[i], q6.nodes[i]);

  const SampleSet grid = sample_randomized_quadrature(legendre(2, 2), 9, 3, 32);
  std::set<std::pair<double, double>> pts;
  for (Eigen::Index i = 0; i < 9; ++i) pts.insert({grid.points(i, 0), grid.points(i, 1)});
  EXPECT_EQ(pts.size(), 9u);

  const SampleSet sub = sample_randomized_quadrature(hermite(2, 2), 10, 5, 33);
  const QuadratureRule h5 = gauss_rule(PolyFamily::hermite(), 5);
  std::set<std::pair<double, double>> distinct;
  for (Eigen::Index i = 0; i < 10; ++i) {
    for (int k = 0; k < 2; ++k)
      EXPECT_NE(std::find(h5.nodes.begin(), h5.nodes.end(), sub.points(i, k)), h5.nodes.end());
    distinct.insert({sub.points(i, 0), sub.points(i, 1)});
  }
  EXPECT_EQ(distinct.size(), 10u);
  EXPECT_TRUE((sub.weights.array() == 1.0).all());
}

TEST(RandomizedQuadrature, Errors) {
  EXPECT_THROW(sample_randomized_quadrature(legendre(2, 2), 10, 3, 1), InsufficientGridError);
  EXPECT_THROW(sample_randomized_quadrature(legendre(40, 1), 10, 5000, 1), OverflowError);
}

TEST(Halton, VanDerCorput) {
  const SampleSet s = sample_qmc(legendre(2, 1), 4, 0);
  const double expected[] = {0.5, 0.25, 0.75, 0.125};
  for (int i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(s.points(i, 0), 2.0 * expected[i] - 1.0);
  EXPECT_DOUBLE_EQ(s.points(0, 1), 2.0 / 3.0 - 1.0);
  EXPECT_DOUBLE_EQ(radical_inverse(6, 2), 0.375);
  EXPECT_EQ(halton_bases(5)[4], 11u);
  EXPECT_EQ(halton_bases(50)[49], 229u);
}

TEST(Halton, DeterministicSkipAndEmpty) {
  const auto spec = legendre(3, 2);
  EXPECT_TRUE(sample_qmc(spec, 20, 7).points == sample_qmc(spec, 20, 7).points);
  EXPECT_TRUE(sample_qmc(spec, 5, 3).points.row(0) == sample_qmc(spec, 5, 0).points.row(3));
  EXPECT_EQ(sample_qmc(spec, 0, 0).size(), 0u);
  EXPECT_THROW(sample_qmc(hermite(2, 2), 5, 0), UnsupportedStrategyError);
}

TEST(Halton, LowerDiscrepancyThanMonteCarlo) {
  const auto spec = legendre(2, 1);
  const Eigen::MatrixXd h = (sample_qmc(spec, 16, 0).points.array() + 1.0) / 2.0;
  const Eigen::MatrixXd m = (sample_standard(spec, 16, 41).points.array() + 1.0) / 2.0;
  EXPECT_LT(compute_star_discrepancy(h).star_discrepancy, compute_star_discrepancy(m).star_discrepancy);
}

TEST(Discrepancy, OneDimensionalExamples) {
  Eigen::MatrixXd one(1, 1);
  one << 0.5;
  const auto r = compute_star_discrepancy(one);
  EXPECT_TRUE(r.exact);
  EXPECT_DOUBLE_EQ(r.star_discrepancy, 0.5);
  for (int n : {1, 4, 10}) {
    Eigen::MatrixXd eq(n, 1);
    for (int i = 0; i < n; ++i) eq(i, 0) = (2.0 * (i + 1) - 1.0) / (2.0 * n);
    EXPECT_NEAR(compute_star_discrepancy(eq).star_discrepancy, 1.0 / (2.0 * n), 1e-15);
  }
}

TEST(Discrepancy, TwoDimensionalMatchesEnumeration) {
  Rng rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd pts(7, 2);
    for (Eigen::Index i = 0; i < pts.size(); ++i) pts(i) = std::floor(u(rng) * 8.0) / 8.0;  // ties on purpose
    const auto r = compute_star_discrepancy(pts);
    EXPECT_TRUE(r.exact);
    EXPECT_NEAR(r.star_discrepancy, oracle::star_discrepancy_bruteforce(pts), 1e-15);
  }
}

TEST(Discrepancy, HigherDimensionIsLowerBound) {
  Rng rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd pts(5, 3);
  for (Eigen::Index i = 0; i < pts.size(); ++i) pts(i) = u(rng);
  const double exact = oracle::star_discrepancy_bruteforce(pts);
  const auto r = compute_star_discrepancy(pts, 1, 100000);
  EXPECT_FALSE(r.exact);
  EXPECT_LE(r.star_discrepancy, exact + 1e-15);
  EXPECT_NEAR(r.star_discrepancy, exact, 1e-15);  // 6^3 corner boxes, all hit
  EXPECT_GE(r.star_discrepancy, 0.0);
  EXPECT_LE(r.star_discrepancy, 1.0);
}

TEST(Coherence, OptimalEqualsP) {
  const auto spec = legendre(2, 5);
  const auto est = estimate_coherence(spec, Strategy::CoherenceOptimal, 2000, 51);
  EXPECT_NEAR(est.mu_hat, static_cast<double>(spec.size()), 1e-8);
  EXPECT_EQ(est.n_probe, 2000u);
}

TEST(Coherence, StandardLegendreBound) {
  const auto est = estimate_coherence(legendre(1, 3), Strategy::Standard, 100000, 52);
  EXPECT_LE(est.mu_hat_per_basis, std::exp(6.0));
  EXPECT_LE(est.mu_hat_per_basis, est.mu_hat);
  EXPECT_THROW(estimate_coherence(legendre(1, 3), Strategy::Standard, 0, 1), std::invalid_argument);
}

TEST(Coherence, ChebyshevBound) {
  const auto est = estimate_coherence(legendre(3, 6), Strategy::AsymptoticChebyshev, 100000, 53);
  EXPECT_LE(est.mu_hat_per_basis, 27.0);
}

TEST(Csv, RoundTrip) {
  const SampleSet s = sample_coherence_optimal(hermite(2, 3), 25, 61);
  std::stringstream ss;
  write_csv(ss, s);
  const std::string text = ss.str();
  EXPECT_EQ(text.rfind("# strategy=coh-opt; seed=61", 0), 0u);
  const SampleSet back = read_sample_csv(ss);
  EXPECT_EQ(back.strategy, Strategy::CoherenceOptimal);
  EXPECT_EQ(back.seed, 61u);
  EXPECT_TRUE(back.points == s.points);
  EXPECT_TRUE(back.weights == s.weights);
  EXPECT_EQ(back.metadata.at("burn_in"), "1000");
}

TEST(Dispatch, AllStrategiesAreSeedPure) {
  const auto spec = legendre(2, 3);
  for (Strategy st : {Strategy::Standard, Strategy::LHS, Strategy::AsymptoticChebyshev, Strategy::CoherenceOptimal,
                      Strategy::RandQuadrature, Strategy::HaltonQMC}) {
    const SampleSet a = draw_samples(st, spec, 12, 99);
    const SampleSet b = draw_samples(st, spec, 12, 99);
    EXPECT_TRUE(a.points == b.points) << to_string(st);
    EXPECT_TRUE(a.weights == b.weights) << to_string(st);
    EXPECT_EQ(parse_strategy(to_string(st)), st);
  }
}
