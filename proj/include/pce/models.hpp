#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pce/orthopoly.hpp"

namespace pce {

/// u(xi) = sum_j c_j psi_j(xi), c_j ~ N(0, 1), observed as u (1 + noise_rel * eta).
struct ManufacturedModel {
  Eigen::VectorXd coefficients;
  double noise_rel = 0.03;

  static ManufacturedModel draw(std::size_t basis_size, std::uint64_t seed, double noise_rel = 0.03);

  double exact(const BasisSpec& spec, std::span<const double> xi) const;
  double eval(const BasisSpec& spec, std::span<const double> xi, std::uint64_t noise_seed) const;
  /// Noisy observations at the rows of Psi; row i draws its noise from derive_seed(noise_seed, {i}).
  Eigen::VectorXd observe(const Eigen::MatrixXd& psi, std::uint64_t noise_seed) const;
};

/// omega_1 = 2 pi (1 + 0.2 xi_1), omega_2 = 0.05 (1 + 0.05 xi_2), omega_3 = -0.5 (1 + 0.5 xi_3).
struct DuffingParams {
  double omega1;
  double omega2;
  double omega3;

  static DuffingParams from_xi(std::span<const double> xi);
};

/// u(t) of u'' + 2 w1 w2 u' + w1^2 (u + w3 u^3) = 0, u(0) = 1, u'(0) = 0, by classical RK4
/// with the largest step <= dt that divides t evenly.
double duffing_solve(std::span<const double> xi, double t, double dt = 1e-3);

/// u at each of the ascending `times`; each interval is split into equal steps <= dt.
std::vector<double> duffing_trajectory(std::span<const double> xi, std::span<const double> times, double dt = 1e-3);

struct BatteryParams {
  double r_sp0 = 0.0272;
  double r_sp1 = 1.087e-16;
  double r_sp2 = 34.64;
  double r_s = 0.0067;
  double r_p = 1e4;
  std::array<double, 4> c_b{19.8, 1745.0, -1.5, -200.2};
  double c_s = 115.28;
  double c_sp = 316.69;
  double q_max = 31100.0;
  double c_max = 30807.0;
  double v_cutoff = 16.0;

  // input distribution
  double beta_alpha = 21.2;
  double beta_beta = 31.8;
  double current_low = 0.0;
  double current_high = 50.0;
  double state_cov = 0.1;
  std::array<double, 3> noise_sd{0.31622776601683794, 1e-2, 1e-3};
  double horizon = 1e5;
};

struct BatteryState {
  double q_b;
  double q_sp;
  double q_s;
};

struct BatteryInputs {
  double current;
  BatteryState state;
  std::array<double, 3> noise;
};

struct RULResult {
  double end_of_life;
  double rul;
  std::vector<std::pair<double, double>> trajectory;  // (t, V), filled on request
};

class BatteryModel {
 public:
  explicit BatteryModel(BatteryParams params = {});

  const BatteryParams& params() const noexcept { return params_; }

  double soc(double q_b) const;
  double r_sp(double soc) const;
  double c_b(double soc) const;
  double voltage(const BatteryState& s) const;
  BatteryState derivative(const BatteryState& s, double current, const std::array<double, 3>& noise) const;

  BatteryState full_charge() const;
  double mean_current() const;
  /// Noise-free state at time t after discharging from full charge at the mean current.
  BatteryState nominal_state(double t, double dt) const;

  /// Families of the 7 standardized inputs: a Beta current followed by six standard normals.
  std::vector<PolyFamily> input_families() const;
  BatteryInputs map_inputs(std::span<const double> xi, const BatteryState& nominal) const;

  /// End of discharge after t_p: first crossing of the cut-off voltage, linearly interpolated.
  /// Throws HorizonExceededError if the voltage stays above the cut-off up to params().horizon.
  RULResult rul(const BatteryInputs& in, double t_p, double dt, bool keep_trajectory = false) const;

 private:
  BatteryParams params_;
};

/// xi -> R(t_p) with the nominal state at t_p computed once.
class RulOracle {
 public:
  RulOracle(BatteryModel model, double t_p, double dt = 0.1);
  double operator()(std::span<const double> xi) const;
  const BatteryModel& model() const noexcept { return model_; }
  const BatteryState& nominal() const noexcept { return nominal_; }
  double t_p() const noexcept { return t_p_; }

 private:
  BatteryModel model_;
  double t_p_;
  double dt_;
  BatteryState nominal_;
};

}  // namespace pce
