#include "pce/models.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "pce/errors.hpp"
#include "pce/random.hpp"

namespace pce {

ManufacturedModel ManufacturedModel::draw(std::size_t basis_size, std::uint64_t seed, double noise_rel) {
  if (noise_rel < 0.0) throw std::invalid_argument("noise level must be nonnegative");
  ManufacturedModel m;
  m.noise_rel = noise_rel;
  m.coefficients.resize(static_cast<Eigen::Index>(basis_size));
  Rng rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (Eigen::Index j = 0; j < m.coefficients.size(); ++j) m.coefficients(j) = gauss(rng);
  return m;
}

double ManufacturedModel::exact(const BasisSpec& spec, std::span<const double> xi) const {
  if (static_cast<Eigen::Index>(spec.size()) != coefficients.size())
    throw std::invalid_argument("basis size does not match manufactured coefficients");
  return spec.eval_row(xi).dot(coefficients);
}

namespace {

double noise_factor(double noise_rel, std::uint64_t seed) {
  if (noise_rel == 0.0) return 1.0;
  Rng rng(seed);
  return 1.0 + noise_rel * std::normal_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace

double ManufacturedModel::eval(const BasisSpec& spec, std::span<const double> xi, std::uint64_t noise_seed) const {
  return exact(spec, xi) * noise_factor(noise_rel, noise_seed);
}

Eigen::VectorXd ManufacturedModel::observe(const Eigen::MatrixXd& psi, std::uint64_t noise_seed) const {
  if (psi.cols() != coefficients.size()) throw std::invalid_argument("basis size does not match manufactured coefficients");
  Eigen::VectorXd u = psi * coefficients;
  for (Eigen::Index i = 0; i < u.size(); ++i)
    u(i) *= noise_factor(noise_rel, derive_seed(noise_seed, {static_cast<std::uint64_t>(i)}));
  return u;
}

DuffingParams DuffingParams::from_xi(std::span<const double> xi) {
  if (xi.size() != 3) throw std::invalid_argument("Duffing model takes three inputs");
  return {2.0 * std::numbers::pi * (1.0 + 0.2 * xi[0]), 0.05 * (1.0 + 0.05 * xi[1]), -0.5 * (1.0 + 0.5 * xi[2])};
}

std::vector<double> duffing_trajectory(std::span<const double> xi, std::span<const double> times, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  const DuffingParams prm = DuffingParams::from_xi(xi);
  const double c1 = 2.0 * prm.omega1 * prm.omega2;
  const double k = prm.omega1 * prm.omega1;
  auto acc = [&](double u, double v) { return -c1 * v - k * (u + prm.omega3 * u * u * u); };

  std::vector<double> out;
  out.reserve(times.size());
  double u = 1.0, v = 0.0, now = 0.0;
  for (double target : times) {
    if (target < now) throw std::invalid_argument("Duffing output times must be ascending and nonnegative");
    const double span = target - now;
    const auto steps = static_cast<long>(std::ceil(span / dt));
    if (steps > 0) {
      const double h = span / static_cast<double>(steps);
      for (long s = 0; s < steps; ++s) {
        const double k1u = v, k1v = acc(u, v);
        const double k2u = v + 0.5 * h * k1v, k2v = acc(u + 0.5 * h * k1u, v + 0.5 * h * k1v);
        const double k3u = v + 0.5 * h * k2v, k3v = acc(u + 0.5 * h * k2u, v + 0.5 * h * k2v);
        const double k4u = v + h * k3v, k4v = acc(u + h * k3u, v + h * k3v);
        u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
      }
    }
    now = target;
    out.push_back(u);
  }
  return out;
}

double duffing_solve(std::span<const double> xi, double t, double dt) {
  if (t < 0.0) throw std::invalid_argument("time must be nonnegative");
  const double times[1] = {t};
  return duffing_trajectory(xi, times, dt)[0];
}

BatteryModel::BatteryModel(BatteryParams params) : params_(params) {
  if (!(params_.current_high >= params_.current_low)) throw std::invalid_argument("current range is inverted");
  if (!(params_.horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
}

double BatteryModel::soc(double q_b) const { return 1.0 - (params_.q_max - q_b) / params_.c_max; }

double BatteryModel::r_sp(double s) const {
  return params_.r_sp0 + params_.r_sp1 * std::exp(params_.r_sp2 * (1.0 - s));
}

double BatteryModel::c_b(double s) const {
  const auto& c = params_.c_b;
  return c[0] + s * (c[1] + s * (c[2] + s * c[3]));
}

double BatteryModel::voltage(const BatteryState& st) const {
  const double s = soc(st.q_b);
  return st.q_b / c_b(s) - st.q_sp / params_.c_sp - st.q_s / params_.c_s;
}

BatteryState BatteryModel::derivative(const BatteryState& st, double current, const std::array<double, 3>& noise) const {
  const double s = soc(st.q_b);
  const double v_b = st.q_b / c_b(s);
  const double v_sp = st.q_sp / params_.c_sp;
  const double v_s = st.q_s / params_.c_s;
  const double v_p = v_b - v_sp - v_s;
  const double i_b = v_p / params_.r_p + current;
  const double i_sp = i_b - v_sp / r_sp(s);
  const double i_s = i_b - v_s / params_.r_s;
  return {-i_b + noise[0], i_sp + noise[1], i_s + noise[2]};
}

BatteryState BatteryModel::full_charge() const { return {params_.q_max, 0.0, 0.0}; }

double BatteryModel::mean_current() const {
  const double mean_y = params_.beta_alpha / (params_.beta_alpha + params_.beta_beta);
  return params_.current_low + (params_.current_high - params_.current_low) * mean_y;
}

namespace {

BatteryState rk4_step(const BatteryModel& m, const BatteryState& s, double current, const std::array<double, 3>& noise,
                      double h) {
  auto axpy = [](const BatteryState& a, double t, const BatteryState& d) {
    return BatteryState{a.q_b + t * d.q_b, a.q_sp + t * d.q_sp, a.q_s + t * d.q_s};
  };
  const BatteryState k1 = m.derivative(s, current, noise);
  const BatteryState k2 = m.derivative(axpy(s, 0.5 * h, k1), current, noise);
  const BatteryState k3 = m.derivative(axpy(s, 0.5 * h, k2), current, noise);
  const BatteryState k4 = m.derivative(axpy(s, h, k3), current, noise);
  return {s.q_b + h / 6.0 * (k1.q_b + 2.0 * k2.q_b + 2.0 * k3.q_b + k4.q_b),
          s.q_sp + h / 6.0 * (k1.q_sp + 2.0 * k2.q_sp + 2.0 * k3.q_sp + k4.q_sp),
          s.q_s + h / 6.0 * (k1.q_s + 2.0 * k2.q_s + 2.0 * k3.q_s + k4.q_s)};
}

}  // namespace

BatteryState BatteryModel::nominal_state(double t, double dt) const {
  if (t < 0.0) throw std::invalid_argument("time must be nonnegative");
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  BatteryState s = full_charge();
  const auto steps = static_cast<long>(std::ceil(t / dt));
  if (steps == 0) return s;
  const double h = t / static_cast<double>(steps);
  const double current = mean_current();
  for (long k = 0; k < steps; ++k) s = rk4_step(*this, s, current, {0.0, 0.0, 0.0}, h);
  return s;
}

std::vector<PolyFamily> BatteryModel::input_families() const {
  std::vector<PolyFamily> f;
  f.push_back(PolyFamily::beta_distribution(params_.beta_alpha, params_.beta_beta));
  for (int k = 0; k < 6; ++k) f.push_back(PolyFamily::hermite());
  return f;
}

BatteryInputs BatteryModel::map_inputs(std::span<const double> xi, const BatteryState& nominal) const {
  if (xi.size() != 7) throw std::invalid_argument("battery model takes seven inputs");
  auto perturb = [&](double nominal_value, double z) {
    return nominal_value != 0.0 ? nominal_value * (1.0 + params_.state_cov * z) : params_.state_cov * z;
  };
  BatteryInputs in;
  const double y = 0.5 * (1.0 + xi[0]);
  in.current = params_.current_low + (params_.current_high - params_.current_low) * y;
  in.state = {perturb(nominal.q_b, xi[1]), perturb(nominal.q_sp, xi[2]), perturb(nominal.q_s, xi[3])};
  for (int k = 0; k < 3; ++k) in.noise[static_cast<std::size_t>(k)] = params_.noise_sd[static_cast<std::size_t>(k)] * xi[static_cast<std::size_t>(4 + k)];
  return in;
}

RULResult BatteryModel::rul(const BatteryInputs& in, double t_p, double dt, bool keep_trajectory) const {
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  RULResult out{t_p, 0.0, {}};
  BatteryState s = in.state;
  double t = t_p;
  double v = voltage(s);
  if (keep_trajectory) out.trajectory.emplace_back(t, v);
  if (v < params_.v_cutoff) return out;
  while (t < params_.horizon) {
    const double h = std::min(dt, params_.horizon - t);
    s = rk4_step(*this, s, in.current, in.noise, h);
    const double t_next = t + h;
    const double v_next = voltage(s);
    if (!std::isfinite(v_next)) throw NumericalError("battery voltage became non-finite");
    if (keep_trajectory) out.trajectory.emplace_back(t_next, v_next);
    if (v_next < params_.v_cutoff) {
      const double frac = (v - params_.v_cutoff) / (v - v_next);
      out.end_of_life = t + frac * h;
      out.rul = out.end_of_life - t_p;
      return out;
    }
    t = t_next;
    v = v_next;
  }
  throw HorizonExceededError(params_.horizon);
}

RulOracle::RulOracle(BatteryModel model, double t_p, double dt)
    : model_(std::move(model)), t_p_(t_p), dt_(dt), nominal_(model_.nominal_state(t_p, dt)) {}

double RulOracle::operator()(std::span<const double> xi) const {
  return model_.rul(model_.map_inputs(xi, nominal_), t_p_, dt_).rul;
}

}  // namespace pce
