#include "pce/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "pce/design.hpp"
#include "pce/errors.hpp"
#include "pce/random.hpp"
#include "pce/solver.hpp"

namespace pce::bench {

namespace {

constexpr double kRecoveryThreshold = 0.02;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint64_t bits_of(double x) {
  std::uint64_t b = 0;
  std::memcpy(&b, &x, sizeof b);
  return b;
}

// Runs fn(i) for i in [0, count) on up to `workers` threads.
template <class F>
void parallel_for(std::size_t count, std::size_t workers, F&& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::string sanitize(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

Criterion hybrid_criterion(const std::string& strategy) {
  return parse_criterion(strategy.substr(0, 1));
}

bool is_hybrid(const std::string& strategy) {
  return strategy.size() == 9 && strategy.substr(1) == "-coh-opt";
}

McmcOptions mcmc_of(const ExperimentConfig& cfg) {
  McmcOptions m;
  m.burn_in = cfg.mcmc_burn_in;
  m.thinning = cfg.mcmc_thinning;
  return m;
}

std::vector<std::size_t> sample_sizes(const ExperimentConfig& cfg, std::size_t basis_size) {
  if (!cfg.n.empty()) return cfg.n;
  std::vector<std::size_t> out;
  for (double r : cfg.n_over_p)
    out.push_back(std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(r * static_cast<double>(basis_size)))));
  if (out.empty()) out.push_back(basis_size + 1);
  return out;
}

struct Task {
  std::string strategy;      // row label
  std::string sampler;       // strategy used to draw the training set
  int p;
  std::size_t n;
  std::size_t replicate;
};

std::vector<Task> make_tasks(const ExperimentConfig& cfg, const std::vector<std::pair<int, std::vector<std::size_t>>>& grid) {
  std::vector<Task> tasks;
  for (const auto& s : cfg.strategies)
    for (const auto& [p, sizes] : grid)
      for (std::size_t n : sizes)
        for (std::size_t r = 0; r < cfg.replications; ++r) tasks.push_back({s, s, p, n, r});
  return tasks;
}

ResultRow failed_row(const Task& t, double time, const std::exception& e) {
  ResultRow row;
  row.strategy = t.strategy;
  row.p = t.p;
  row.n = t.n;
  row.replicate = t.replicate;
  row.time = time;
  row.relative_error = kNaN;
  row.delta_hat = kNaN;
  row.condition = kNaN;
  row.status = "error: " + sanitize(e.what());
  return row;
}

ResultRow fitted_row(const Task& t, double time, const FitResult& f, double err) {
  ResultRow row;
  row.strategy = t.strategy;
  row.p = t.p;
  row.n = t.n;
  row.replicate = t.replicate;
  row.time = time;
  row.relative_error = err;
  row.recovered = err <= kRecoveryThreshold;
  row.delta_hat = f.stability.dist_identity;
  row.condition = f.stability.condition;
  return row;
}

ResultTable collect(std::vector<std::vector<ResultRow>>&& per_task) {
  ResultTable table;
  for (auto& rows : per_task)
    for (auto& r : rows) table.rows.push_back(std::move(r));
  return table;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Evaluates a vector-valued oracle on every row of `points`; failed rows come back as NaN.
template <class F>
std::vector<std::vector<double>> evaluate_all(const Eigen::MatrixXd& points, std::size_t outputs, std::size_t workers,
                                              F&& oracle) {
  std::vector<std::vector<double>> out(static_cast<std::size_t>(points.rows()));
  parallel_for(out.size(), workers, [&](std::size_t i) {
    std::vector<double> xi(points.cols());
    for (Eigen::Index k = 0; k < points.cols(); ++k) xi[static_cast<std::size_t>(k)] = points(static_cast<Eigen::Index>(i), k);
    try {
      out[i] = oracle(xi);
    } catch (const Error&) {
      out[i].assign(outputs, kNaN);
    }
  });
  return out;
}

struct Validation {
  Eigen::MatrixXd psi;
  Eigen::VectorXd u;
};

// Drops validation points whose response is NaN and adds their count to `dropped`.
Validation keep_finite(const Eigen::MatrixXd& psi, const std::vector<std::vector<double>>& values, std::size_t column,
                       std::size_t& dropped) {
  std::vector<Eigen::Index> keep;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (std::isfinite(values[i][column])) keep.push_back(static_cast<Eigen::Index>(i));
  dropped += values.size() - keep.size();
  Validation v{Eigen::MatrixXd(static_cast<Eigen::Index>(keep.size()), psi.cols()),
               Eigen::VectorXd(static_cast<Eigen::Index>(keep.size()))};
  for (std::size_t r = 0; r < keep.size(); ++r) {
    v.psi.row(static_cast<Eigen::Index>(r)) = psi.row(keep[r]);
    v.u(static_cast<Eigen::Index>(r)) = values[static_cast<std::size_t>(keep[r])][column];
  }
  return v;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

std::size_t ResultTable::failures() const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [](const ResultRow& r) { return r.status != "ok"; }));
}

std::uint64_t row_seed(const ExperimentConfig& cfg, const std::string& strategy, int p, std::size_t n,
                       std::size_t replicate) {
  return derive_seed(cfg.seed, {fnv1a(to_string(cfg.experiment)), fnv1a(strategy), static_cast<std::uint64_t>(p),
                                static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(replicate)});
}

std::size_t candidate_count(const ExperimentConfig& cfg, std::size_t basis_size, std::size_t n) {
  if (cfg.nc_rule == CandidateRule::FourN) return 4 * n;
  return std::max(default_candidate_count(basis_size), n);
}

BasisSpec experiment_basis(const ExperimentConfig& cfg, int p) {
  switch (cfg.experiment) {
    case Experiment::Recovery:
      return BasisSpec::isotropic(cfg.family == "hermite" ? PolyFamily::hermite() : PolyFamily::legendre(), cfg.d, p);
    case Experiment::Duffing:
      return BasisSpec::isotropic(PolyFamily::legendre(), 3, p);
    case Experiment::Battery:
      return BasisSpec(BatteryModel(cfg.battery).input_families(), p);
  }
  throw ConfigError("unknown experiment");
}

SampleSet generate_samples(const ExperimentConfig& cfg, const BasisSpec& spec, const std::string& strategy,
                           std::size_t n, std::uint64_t seed, std::size_t replicate) {
  const McmcOptions mcmc = mcmc_of(cfg);
  if (strategy == "standard") return sample_standard(spec, n, seed);
  if (strategy == "lhs") return sample_lhs(spec, n, seed);
  if (strategy == "asymptotic") return sample_asymptotic(spec, n, seed);
  if (strategy == "coh-opt") return sample_coherence_optimal(spec, n, seed, mcmc);
  if (strategy == "qmc") return sample_qmc(spec, n, static_cast<std::uint64_t>(replicate) * n);
  if (strategy == "rand-quad") {
    int level = cfg.quad_level;
    if (level == 0) {
      level = spec.order() + 1;
      while (std::pow(static_cast<double>(level), spec.dimension()) < static_cast<double>(n)) ++level;
    }
    return sample_randomized_quadrature(spec, n, level, seed);
  }
  const std::size_t nc = candidate_count(cfg, spec.size(), n);
  if (is_hybrid(strategy)) return hybrid_design(spec, n, nc, hybrid_criterion(strategy), seed, mcmc).samples;
  if (strategy == "d-opt") {
    DesignResult design = design_from_candidates(spec, sample_standard(spec, nc, seed), n, Criterion::D);
    const Eigen::MatrixXd psi_c = spec.eval_matrix(design.candidates.points);
    const DesignState ex =
        fedorov_exchange(design.state, psi_c, &design.candidates.weights, 1e-6, cfg.fedorov_max_iter);
    SampleSet out = design.samples;
    for (std::size_t r = 0; r < n; ++r) {
      out.points.row(static_cast<Eigen::Index>(r)) = design.candidates.points.row(static_cast<Eigen::Index>(ex.selected[r]));
      out.weights(static_cast<Eigen::Index>(r)) = design.candidates.weights(static_cast<Eigen::Index>(ex.selected[r]));
    }
    out.metadata["exchanges"] = std::to_string(ex.exchanges);
    return out;
  }
  throw ConfigError("unknown strategy '" + strategy + "'");
}

ResultTable run_recovery(const ExperimentConfig& cfg) {
  validate(cfg);
  const BasisSpec spec = experiment_basis(cfg, cfg.p);
  const std::size_t P = spec.size();
  const SampleSet val = sample_standard(spec, cfg.n_validation, derive_seed(cfg.seed, {fnv1a("validation")}));
  const Eigen::MatrixXd psi_v = spec.eval_matrix(val.points);

  const auto tasks = make_tasks(cfg, {{cfg.p, sample_sizes(cfg, P)}});
  std::vector<std::vector<ResultRow>> rows(tasks.size());
  parallel_for(tasks.size(), cfg.workers, [&](std::size_t i) {
    const Task& t = tasks[i];
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const ManufacturedModel model = ManufacturedModel::draw(
          P, derive_seed(cfg.seed, {fnv1a("coefficients"), static_cast<std::uint64_t>(t.replicate)}), cfg.noise_rel);
      const std::uint64_t seed = row_seed(cfg, t.sampler, t.p, t.n, t.replicate);
      const SampleSet s = generate_samples(cfg, spec, t.sampler, t.n, seed, t.replicate);
      const Eigen::MatrixXd psi = spec.eval_matrix(s.points);
      const Eigen::VectorXd u = model.observe(psi, derive_seed(seed, {fnv1a("noise")}));
      const FitResult f = fit(psi, &s.weights, u);
      const Eigen::VectorXd u_v = psi_v * model.coefficients;
      rows[i].push_back(fitted_row(t, 0.0, f, validation_error(f.coefficients, psi_v, u_v)));
    } catch (const std::exception& e) {
      rows[i].push_back(failed_row(t, 0.0, e));
    }
    rows[i].back().wall_seconds = seconds_since(t0);
  });
  ResultTable table = collect(std::move(rows));
  table.notes["P"] = std::to_string(P);
  table.notes["validation"] = "noise-free manufactured response at n_validation standard-MC points";
  return table;
}

ResultTable run_duffing(const ExperimentConfig& cfg) {
  validate(cfg);
  const std::size_t nt = cfg.times.size();
  const SampleSet val = sample_standard(experiment_basis(cfg, 0), cfg.n_validation,
                                        derive_seed(cfg.seed, {fnv1a("validation")}));
  auto oracle = [&](const std::vector<double>& xi) { return duffing_trajectory(xi, cfg.times, cfg.dt); };
  const auto u_val = evaluate_all(val.points, nt, cfg.workers, oracle);

  std::vector<int> orders{cfg.p};
  for (int p : cfg.p_sweep)
    if (std::find(orders.begin(), orders.end(), p) == orders.end()) orders.push_back(p);
  std::map<int, BasisSpec> specs;
  std::map<int, std::vector<Validation>> validation;
  std::size_t dropped = 0;
  for (int p : orders) {
    specs.emplace(p, experiment_basis(cfg, p));
    const Eigen::MatrixXd psi_v = specs.at(p).eval_matrix(val.points);
    // every order sees the same responses, so count the drops once
    std::size_t scratch = 0;
    for (std::size_t k = 0; k < nt; ++k)
      validation[p].push_back(keep_finite(psi_v, u_val, k, p == orders.front() ? dropped : scratch));
  }

  auto tasks = make_tasks(cfg, {{cfg.p, sample_sizes(cfg, specs.at(cfg.p).size())}});
  for (int p : cfg.p_sweep)
    for (std::size_t r = 0; r < cfg.replications; ++r)
      tasks.push_back({"p-sweep", "standard", p, 20 * specs.at(p).size(), r});

  std::vector<std::vector<ResultRow>> rows(tasks.size());
  parallel_for(tasks.size(), cfg.workers, [&](std::size_t i) {
    const Task& t = tasks[i];
    const BasisSpec& spec = specs.at(t.p);
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const std::uint64_t seed = row_seed(cfg, t.strategy, t.p, t.n, t.replicate);
      const SampleSet s = generate_samples(cfg, spec, t.sampler, t.n, seed, t.replicate);
      const Eigen::MatrixXd psi = spec.eval_matrix(s.points);
      Eigen::MatrixXd u(psi.rows(), static_cast<Eigen::Index>(nt));
      std::vector<double> xi(3);
      for (Eigen::Index r = 0; r < psi.rows(); ++r) {
        for (int k = 0; k < 3; ++k) xi[static_cast<std::size_t>(k)] = s.points(r, k);
        const auto traj = duffing_trajectory(xi, cfg.times, cfg.dt);
        for (std::size_t k = 0; k < nt; ++k) u(r, static_cast<Eigen::Index>(k)) = traj[k];
      }
      for (std::size_t k = 0; k < nt; ++k) {
        try {
          const FitResult f = fit(psi, &s.weights, u.col(static_cast<Eigen::Index>(k)));
          const Validation& v = validation.at(t.p)[k];
          rows[i].push_back(fitted_row(t, cfg.times[k], f, validation_error(f.coefficients, v.psi, v.u)));
        } catch (const std::exception& e) {
          rows[i].push_back(failed_row(t, cfg.times[k], e));
        }
      }
    } catch (const std::exception& e) {
      for (double time : cfg.times) rows[i].push_back(failed_row(t, time, e));
    }
    const double wall = seconds_since(t0);
    for (auto& r : rows[i]) r.wall_seconds = wall;
  });
  ResultTable table = collect(std::move(rows));
  table.notes["P"] = std::to_string(specs.at(cfg.p).size());
  table.notes["validation_failures"] = std::to_string(dropped);
  return table;
}

ResultTable run_battery(const ExperimentConfig& cfg) {
  validate(cfg);
  const BasisSpec spec = experiment_basis(cfg, cfg.p);
  const std::size_t P = spec.size();
  const std::size_t nt = cfg.tp.size();
  const BatteryModel model(cfg.battery);
  std::vector<RulOracle> oracles;
  for (double tp : cfg.tp) oracles.emplace_back(model, tp, cfg.dt);
  auto oracle = [&](const std::vector<double>& xi) {
    std::vector<double> out(nt);
    for (std::size_t k = 0; k < nt; ++k) {
      try {
        out[k] = oracles[k](xi);
      } catch (const Error&) {
        out[k] = kNaN;
      }
    }
    return out;
  };

  const SampleSet val = sample_standard(spec, cfg.n_validation, derive_seed(cfg.seed, {fnv1a("validation")}));
  const Eigen::MatrixXd psi_v = spec.eval_matrix(val.points);
  const auto u_val = evaluate_all(val.points, nt, cfg.workers, oracle);
  std::vector<Validation> validation;
  std::size_t dropped_total = 0;
  for (std::size_t k = 0; k < nt; ++k) {
    std::size_t dropped = 0;
    validation.push_back(keep_finite(psi_v, u_val, k, dropped));
    dropped_total += dropped;
  }

  std::vector<std::size_t> sizes = cfg.n;
  if (sizes.empty() && !cfg.n_over_p.empty()) sizes = sample_sizes(cfg, P);
  if (sizes.empty()) sizes = {P + 1};
  const auto tasks = make_tasks(cfg, {{cfg.p, sizes}});

  std::vector<std::vector<ResultRow>> rows(tasks.size());
  parallel_for(tasks.size(), cfg.workers, [&](std::size_t i) {
    const Task& t = tasks[i];
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const std::uint64_t seed = row_seed(cfg, t.strategy, t.p, t.n, t.replicate);
      const SampleSet s = generate_samples(cfg, spec, t.sampler, t.n, seed, t.replicate);
      const Eigen::MatrixXd psi = spec.eval_matrix(s.points);
      std::vector<double> xi(7);
      for (std::size_t k = 0; k < nt; ++k) {
        try {
          Eigen::VectorXd u(psi.rows());
          for (Eigen::Index r = 0; r < psi.rows(); ++r) {
            for (int c = 0; c < 7; ++c) xi[static_cast<std::size_t>(c)] = s.points(r, c);
            u(r) = oracles[k](xi);
          }
          const FitResult f = fit(psi, &s.weights, u);
          rows[i].push_back(
              fitted_row(t, cfg.tp[k], f, validation_error(f.coefficients, validation[k].psi, validation[k].u)));
        } catch (const std::exception& e) {
          rows[i].push_back(failed_row(t, cfg.tp[k], e));
        }
      }
    } catch (const std::exception& e) {
      for (double tp : cfg.tp) rows[i].push_back(failed_row(t, tp, e));
    }
    const double wall = seconds_since(t0);
    for (auto& r : rows[i]) r.wall_seconds = wall;
  });
  ResultTable table = collect(std::move(rows));
  table.notes["P"] = std::to_string(P);
  table.notes["validation_failures"] = std::to_string(dropped_total);
  for (std::size_t k = 0; k < nt; ++k) {
    const BatteryState& s = oracles[k].nominal();
    table.notes["nominal_state_tp_" + fmt(cfg.tp[k])] = fmt(s.q_b) + " " + fmt(s.q_sp) + " " + fmt(s.q_s);
  }
  return table;
}

ResultTable run(const ExperimentConfig& cfg) {
  switch (cfg.experiment) {
    case Experiment::Recovery:
      return run_recovery(cfg);
    case Experiment::Duffing:
      return run_duffing(cfg);
    case Experiment::Battery:
      return run_battery(cfg);
  }
  throw ConfigError("unknown experiment");
}

double ks_distance(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw UndefinedError("KS distance of an empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

PdfComparison battery_pdf(const ExperimentConfig& cfg, const std::string& strategy, double t_p) {
  validate(cfg);
  const BasisSpec spec = experiment_basis(cfg, cfg.p);
  const std::size_t P = spec.size();
  const std::size_t n = cfg.n.empty() ? P + 1 : cfg.n.front();
  const RulOracle oracle(BatteryModel(cfg.battery), t_p, cfg.dt);

  PdfComparison out;
  out.t_p = t_p;
  out.strategy = strategy;
  out.n = n;
  const std::uint64_t seed = row_seed(cfg, strategy, cfg.p, n, 0);
  const SampleSet s = generate_samples(cfg, spec, strategy, n, seed, 0);
  Eigen::VectorXd u(static_cast<Eigen::Index>(n));
  std::vector<double> xi(7);
  for (Eigen::Index r = 0; r < u.size(); ++r) {
    for (int c = 0; c < 7; ++c) xi[static_cast<std::size_t>(c)] = s.points(r, c);
    u(r) = oracle(xi);
  }
  const FitResult f = fit(spec.eval_matrix(s.points), &s.weights, u);

  const SampleSet sur = sample_standard(spec, cfg.pdf_draws, derive_seed(cfg.seed, {fnv1a("pdf-surrogate"), bits_of(t_p)}));
  out.surrogate.resize(cfg.pdf_draws);
  parallel_for(out.surrogate.size(), cfg.workers, [&](std::size_t i) {
    std::vector<double> x(7), row(P);
    for (int c = 0; c < 7; ++c) x[static_cast<std::size_t>(c)] = sur.points(static_cast<Eigen::Index>(i), c);
    spec.eval_row(x, row);
    out.surrogate[i] = Eigen::Map<const Eigen::VectorXd>(row.data(), static_cast<Eigen::Index>(P)).dot(f.coefficients);
  });

  const SampleSet mc = sample_standard(spec, cfg.pdf_draws, derive_seed(cfg.seed, {fnv1a("pdf-direct"), bits_of(t_p)}));
  const auto direct = evaluate_all(mc.points, 1, cfg.workers, [&](const std::vector<double>& x) {
    return std::vector<double>{oracle(x)};
  });
  for (const auto& v : direct)
    if (std::isfinite(v[0])) out.direct.push_back(v[0]);
  out.ks_distance = ks_distance(out.surrogate, out.direct);
  return out;
}

void write_table(std::ostream& os, const ExperimentConfig& cfg, const ResultTable& table) {
  os << "# " << kVersion << "\n";
  for (const auto& [k, v] : describe(cfg)) os << "# " << k << " = " << v << "\n";
  os << "# seed_rule = derive_seed(seed, {fnv1a(experiment), fnv1a(strategy), p, N, replicate}) with "
        "derive_seed(s, tags): h = mix64(s), h = mix64(h ^ tag) per tag; mix64 = SplitMix64 finalizer\n";
  for (const auto& [k, v] : table.notes) os << "# " << k << " = " << v << "\n";
  os << "strategy,p,N,replicate,time,relative_error,recovered,delta_hat,condition,status\n";
  os << std::setprecision(17);
  for (const auto& r : table.rows) {
    os << r.strategy << "," << r.p << "," << r.n << "," << r.replicate << "," << r.time << "," << r.relative_error
       << "," << (r.recovered ? 1 : 0) << "," << r.delta_hat << "," << r.condition << "," << r.status << "\n";
  }
}

void write_aggregate(std::ostream& os, const ResultTable& table) {
  struct Group {
    std::string strategy;
    int p;
    std::size_t n;
    double time;
    std::vector<const ResultRow*> rows;
  };
  std::vector<Group> groups;
  for (const auto& r : table.rows) {
    auto it = std::find_if(groups.begin(), groups.end(), [&](const Group& g) {
      return g.strategy == r.strategy && g.p == r.p && g.n == r.n && g.time == r.time;
    });
    if (it == groups.end()) {
      groups.push_back({r.strategy, r.p, r.n, r.time, {}});
      it = std::prev(groups.end());
    }
    it->rows.push_back(&r);
  }
  os << "strategy,p,N,time,count,ok,mean_error,std_error,recovery_probability,mean_delta_hat,mean_condition\n";
  os << std::setprecision(10);
  for (const auto& g : groups) {
    double sum = 0.0, sum2 = 0.0, rec = 0.0, dh = 0.0, cond = 0.0;
    std::size_t ok = 0;
    for (const auto* r : g.rows) {
      if (r->status != "ok") continue;
      ++ok;
      sum += r->relative_error;
      sum2 += r->relative_error * r->relative_error;
      rec += r->recovered ? 1.0 : 0.0;
      dh += r->delta_hat;
      cond += r->condition;
    }
    const double k = static_cast<double>(ok);
    const double mean = ok ? sum / k : kNaN;
    const double var = ok > 1 ? std::max(0.0, (sum2 - k * mean * mean) / (k - 1.0)) : 0.0;
    os << g.strategy << "," << g.p << "," << g.n << "," << g.time << "," << g.rows.size() << "," << ok << "," << mean
       << "," << std::sqrt(var) << "," << (ok ? rec / static_cast<double>(g.rows.size()) : 0.0) << ","
       << (ok ? dh / k : kNaN) << "," << (ok ? cond / k : kNaN) << "\n";
  }
}

void write_pdf(std::ostream& os, const PdfComparison& pdf, std::size_t bins) {
  if (bins == 0) throw ConfigError("pdf_bins must be positive");
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto* v : {&pdf.surrogate, &pdf.direct})
    for (double x : *v) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
  if (!(hi > lo)) hi = lo + 1.0;
  const double width = (hi - lo) / static_cast<double>(bins);
  std::vector<double> hs(bins, 0.0), hd(bins, 0.0);
  auto fill = [&](const std::vector<double>& xs, std::vector<double>& h) {
    for (double x : xs) h[std::min(bins - 1, static_cast<std::size_t>((x - lo) / width))] += 1.0;
    for (double& c : h) c /= static_cast<double>(xs.size()) * width;
  };
  fill(pdf.surrogate, hs);
  fill(pdf.direct, hd);
  os << std::setprecision(10);
  os << "# tp = " << pdf.t_p << "; strategy = " << pdf.strategy << "; N = " << pdf.n
     << "; surrogate_draws = " << pdf.surrogate.size() << "; direct_draws = " << pdf.direct.size()
     << "; ks_distance = " << pdf.ks_distance << "\n";
  for (std::size_t b = 0; b < bins; ++b)
    os << pdf.t_p << "," << lo + (static_cast<double>(b) + 0.5) * width << "," << hs[b] << "," << hd[b] << "\n";
}

void write_results(const std::filesystem::path& dir, const ExperimentConfig& cfg, const ResultTable& table) {
  std::filesystem::create_directories(dir);
  const std::string name(to_string(cfg.experiment));
  auto open = [&](const std::string& file) {
    std::ofstream os(dir / file);
    if (!os) throw Error("cannot write " + (dir / file).string());
    return os;
  };
  {
    auto os = open(name + ".csv");
    write_table(os, cfg, table);
  }
  {
    auto os = open(name + "_timing.csv");
    os << "strategy,p,N,replicate,time,wall_seconds\n" << std::setprecision(6);
    for (const auto& r : table.rows)
      os << r.strategy << "," << r.p << "," << r.n << "," << r.replicate << "," << r.time << "," << r.wall_seconds << "\n";
  }
  if (cfg.aggregate) {
    auto os = open(name + "_aggregate.csv");
    write_aggregate(os, table);
  }
}

}  // namespace pce::bench
