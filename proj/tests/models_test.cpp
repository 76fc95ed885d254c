#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "pce/errors.hpp"
#include "pce/models.hpp"
#include "pce/sampling.hpp"
#include "pce/solver.hpp"

using namespace pce;

TEST(Manufactured, NoiseFreeRecoveryAtNEqualsP) {
  const BasisSpec spec = BasisSpec::isotropic(PolyFamily::legendre(), 3, 3);
  const ManufacturedModel m = ManufacturedModel::draw(spec.size(), 1, 0.0);
  const SampleSet s = sample_standard(spec, spec.size(), 2);
  const Eigen::MatrixXd psi = spec.eval_matrix(s.points);
  const FitResult f = fit(psi, nullptr, m.observe(psi, 3));
  EXPECT_LE((f.coefficients - m.coefficients).norm(), 1e-8 * m.coefficients.norm());
}

TEST(Manufactured, ConstantModelAndNoiseLevel) {
  const BasisSpec spec = BasisSpec::isotropic(PolyFamily::hermite(), 2, 2);
  ManufacturedModel m{Eigen::VectorXd::Unit(static_cast<Eigen::Index>(spec.size()), 0), 0.03};
  const std::size_t n = 100000;
  const SampleSet s = sample_standard(spec, n, 4);
  const Eigen::VectorXd u = m.observe(spec.eval_matrix(s.points), 5);
  EXPECT_NEAR(u.mean(), 1.0, 4.0 * 0.03 / std::sqrt(static_cast<double>(n)));
  const double sd = std::sqrt((u.array() - u.mean()).square().sum() / static_cast<double>(n - 1));
  EXPECT_NEAR(sd, 0.03, 0.001);
  const double xi[] = {0.7, -2.0};
  EXPECT_DOUBLE_EQ(m.exact(spec, xi), 1.0);
  EXPECT_EQ(m.eval(spec, xi, 9), m.eval(spec, xi, 9));
}

TEST(Manufactured, CoefficientsAreStandardNormal) {
  const ManufacturedModel m = ManufacturedModel::draw(20000, 6);
  EXPECT_NEAR(m.coefficients.mean(), 0.0, 0.03);
  EXPECT_NEAR(m.coefficients.squaredNorm() / 20000.0, 1.0, 0.05);
  EXPECT_DOUBLE_EQ(m.noise_rel, 0.03);
}

TEST(Duffing, Parameters) {
  const double xi[] = {0.5, -1.0, 1.0};
  const DuffingParams p = DuffingParams::from_xi(xi);
  EXPECT_DOUBLE_EQ(p.omega1, 2.0 * std::numbers::pi * 1.1);
  EXPECT_DOUBLE_EQ(p.omega2, 0.05 * 0.95);
  EXPECT_DOUBLE_EQ(p.omega3, -0.5 * 1.5);
}

TEST(Duffing, InitialCondition) {
  const double xi[] = {0.3, 0.2, -0.4};
  EXPECT_EQ(duffing_solve(xi, 0.0), 1.0);
}

TEST(Duffing, LinearCaseMatchesClosedForm) {
  const double xi[] = {0.0, 0.0, -2.0};
  const double w1 = 2.0 * std::numbers::pi, zeta = 0.05, wd = w1 * std::sqrt(1.0 - zeta * zeta), t = 4.0;
  const double exact = std::exp(-zeta * w1 * t) * (std::cos(wd * t) + zeta * w1 / wd * std::sin(wd * t));
  EXPECT_NEAR(duffing_solve(xi, t), exact, 1e-6);
}

TEST(Duffing, StepHalving) {
  const double xi[] = {0.0, 0.0, 0.0};
  EXPECT_LT(std::abs(duffing_solve(xi, 4.0, 1e-3) - duffing_solve(xi, 4.0, 5e-4)), 1e-8);
}

TEST(Duffing, TrajectoryMatchesPointSolves) {
  const double xi[] = {-0.6, 0.9, 0.1};
  const std::vector<double> times{0.5, 1.0, 4.0};
  const auto traj = duffing_trajectory(xi, times);
  for (std::size_t i = 0; i < times.size(); ++i) EXPECT_NEAR(traj[i], duffing_solve(xi, times[i]), 1e-12);
}

TEST(Duffing, EnvelopeNonIncreasing) {
  for (const auto& xi : std::vector<std::array<double, 3>>{{-1, -1, -1}, {1, 1, 1}, {0, 0, 0}, {0.5, -0.5, 1}}) {
    std::vector<double> times;
    for (int k = 1; k <= 4000; ++k) times.push_back(k * 1e-3);
    const auto u = duffing_trajectory(xi, times);
    double last_peak = 1.0;
    for (std::size_t i = 1; i + 1 < u.size(); ++i)
      if (u[i] > u[i - 1] && u[i] >= u[i + 1]) {
        EXPECT_LE(u[i], last_peak + 1e-9);
        last_peak = u[i];
      }
  }
}

TEST(Battery, HandEvaluations) {
  const BatteryModel m;
  EXPECT_NEAR(m.r_sp(1.0), 0.0272, 5e-7);
  const BatteryState full = m.full_charge();
  EXPECT_DOUBLE_EQ(full.q_b, 31100.0);
  EXPECT_DOUBLE_EQ(m.soc(full.q_b), 1.0 - (31100.0 - 31100.0) / 30807.0);
  EXPECT_NEAR(m.c_b(1.0), 1563.1, 1e-9);
  EXPECT_NEAR(m.voltage(full), 31100.0 / 1563.1, 1e-12);
  EXPECT_NEAR(m.voltage(full), 19.90, 0.005);
}

TEST(Battery, InputMap) {
  const BatteryModel m;
  const BatteryState nominal{30000.0, 12.0, 0.0};
  const auto fams = m.input_families();
  ASSERT_EQ(fams.size(), 7u);
  EXPECT_EQ(fams[0].kind(), FamilyKind::Jacobi);
  for (std::size_t k = 1; k < 7; ++k) EXPECT_EQ(fams[k].kind(), FamilyKind::Hermite);

  // Beta mean 0.4 on [0,1] is x = -0.2 on [-1,1]
  const std::array<double, 7> mode{-0.2, 0, 0, 0, 0, 0, 0};
  const BatteryInputs in = m.map_inputs(mode, nominal);
  EXPECT_NEAR(in.current, m.mean_current(), 1e-12);
  EXPECT_DOUBLE_EQ(in.state.q_b, nominal.q_b);
  EXPECT_DOUBLE_EQ(in.state.q_sp, nominal.q_sp);
  EXPECT_DOUBLE_EQ(in.state.q_s, 0.0);
  for (double v : in.noise) EXPECT_EQ(v, 0.0);

  const std::array<double, 7> ones{-0.2, 1, 1, 1, 1, 1, 1};
  const BatteryInputs one = m.map_inputs(ones, nominal);
  EXPECT_DOUBLE_EQ(one.state.q_b, 30000.0 * 1.1);
  EXPECT_DOUBLE_EQ(one.state.q_sp, 12.0 * 1.1);
  EXPECT_DOUBLE_EQ(one.state.q_s, 0.1);
  EXPECT_DOUBLE_EQ(one.noise[0], std::sqrt(0.1));
  EXPECT_DOUBLE_EQ(one.noise[1], 1e-2);
  EXPECT_DOUBLE_EQ(one.noise[2], 1e-3);
}

TEST(Battery, ProcessNoiseVariance) {
  const BatteryModel m;
  const BasisSpec spec(m.input_families(), 1);
  const SampleSet s = sample_standard(spec, 1000000, 7);
  double sum = 0.0, sq = 0.0;
  for (Eigen::Index i = 0; i < s.points.rows(); ++i) {
    const std::vector<double> xi(s.points.row(i).begin(), s.points.row(i).end());
    const double v = m.map_inputs(xi, m.full_charge()).noise[0];
    sum += v;
    sq += v * v;
  }
  const double n = static_cast<double>(s.size());
  EXPECT_NEAR(sq / n - (sum / n) * (sum / n), 0.1, 0.002);
}

TEST(Battery, LargerCurrentShortensLife) {
  const BatteryModel m;
  BatteryInputs in{20.0, m.full_charge(), {0.0, 0.0, 0.0}};
  const double r1 = m.rul(in, 0.0, 0.1).rul;
  in.current = 30.0;
  const double r2 = m.rul(in, 0.0, 0.1).rul;
  EXPECT_GT(r1, 0.0);
  EXPECT_LT(r2, r1);
}

TEST(Battery, EventConsistency) {
  const BatteryModel m;
  const BatteryInputs in{25.0, m.full_charge(), {0.05, 0.0, 0.0}};
  const RULResult r = m.rul(in, 100.0, 0.1, true);
  EXPECT_NEAR(r.rul, r.end_of_life - 100.0, 1e-9);
  ASSERT_GE(r.trajectory.size(), 2u);
  const auto& after = r.trajectory.back();
  const auto& before = r.trajectory[r.trajectory.size() - 2];
  EXPECT_LT(after.second, m.params().v_cutoff);
  EXPECT_GE(before.second, m.params().v_cutoff);
  EXPECT_GE(r.end_of_life, before.first);
  EXPECT_LE(r.end_of_life, after.first);
  const double v_at_e = before.second + (after.second - before.second) * (r.end_of_life - before.first) / (after.first - before.first);
  EXPECT_NEAR(v_at_e, m.params().v_cutoff, 1e-9);
  for (std::size_t i = 0; i + 1 < r.trajectory.size(); ++i) EXPECT_GE(r.trajectory[i].second, m.params().v_cutoff);
  // SoC stays at most 1 along the discharge
  EXPECT_LE(r.trajectory.front().second, m.voltage(m.full_charge()) + 1e-12);
}

TEST(Battery, ChargeConservationWithoutLeak) {
  BatteryParams p;
  p.r_p = std::numeric_limits<double>::infinity();
  const BatteryModel m(p);
  BatteryState s = m.full_charge();
  s.q_sp = 3.0;
  s.q_s = 1.0;
  EXPECT_DOUBLE_EQ(m.derivative(s, 17.5, {0.0, 0.0, 0.0}).q_b, -17.5);
  const BatteryState nominal = m.nominal_state(100.0, 0.1);
  EXPECT_NEAR(nominal.q_b, 31100.0 - 100.0 * m.mean_current(), 1e-6);
}

TEST(Battery, HorizonExceeded) {
  BatteryParams p;
  p.horizon = 50.0;
  const BatteryModel m(p);
  try {
    m.rul({20.0, m.full_charge(), {0.0, 0.0, 0.0}}, 0.0, 0.1);
    FAIL() << "expected HorizonExceededError";
  } catch (const HorizonExceededError& e) {
    EXPECT_EQ(e.horizon(), 50.0);
  }
}

TEST(Battery, OracleIsDeterministic) {
  const RulOracle o(BatteryModel{}, 200.0);
  const std::array<double, 7> xi{0.1, 0.3, -0.2, 0.5, 0.4, -1.0, 0.2};
  EXPECT_EQ(o(xi), o(xi));
  EXPECT_GT(o(xi), 0.0);
}
