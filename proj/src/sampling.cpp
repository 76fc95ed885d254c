#include "pce/sampling.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/normal.hpp>

#include "pce/errors.hpp"

namespace pce {

namespace {

constexpr std::array<std::pair<Strategy, std::string_view>, 7> kStrategyNames{{
    {Strategy::Standard, "standard"},
    {Strategy::LHS, "lhs"},
    {Strategy::AsymptoticChebyshev, "asymptotic-chebyshev"},
    {Strategy::AsymptoticBall, "asymptotic-ball"},
    {Strategy::CoherenceOptimal, "coh-opt"},
    {Strategy::RandQuadrature, "rand-quad"},
    {Strategy::HaltonQMC, "qmc"},
}};

SampleSet make_set(std::size_t n, int d, Strategy strategy, std::uint64_t seed) {
  SampleSet s;
  s.points.resize(static_cast<Eigen::Index>(n), d);
  s.weights = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n));
  s.strategy = strategy;
  s.seed = seed;
  return s;
}

void require_points(std::size_t n) {
  if (n == 0) throw std::invalid_argument("sample size must be positive");
}

// Uniform on the open interval (0, 1).
double open_uniform(Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double v = u(rng);
  while (v <= 0.0) v = u(rng);
  return v;
}

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

std::string_view to_string(Strategy s) {
  for (const auto& [k, name] : kStrategyNames)
    if (k == s) return name;
  return "unknown";
}

Strategy parse_strategy(std::string_view name) {
  for (const auto& [k, n] : kStrategyNames)
    if (n == name) return k;
  throw std::invalid_argument("unknown sampling strategy '" + std::string(name) + "'");
}

double family_cdf(const PolyFamily& family, double x) {
  switch (family.kind()) {
    case FamilyKind::Legendre:
      return std::clamp(0.5 * (x + 1.0), 0.0, 1.0);
    case FamilyKind::Hermite:
      return boost::math::cdf(boost::math::normal_distribution<double>(0.0, 1.0), x);
    case FamilyKind::Jacobi: {
      if (x <= -1.0) return 0.0;
      if (x >= 1.0) return 1.0;
      return boost::math::cdf(boost::math::beta_distribution<double>(family.b() + 1.0, family.a() + 1.0),
                              0.5 * (x + 1.0));
    }
    case FamilyKind::Laguerre:
      if (x <= 0.0) return 0.0;
      return boost::math::cdf(boost::math::gamma_distribution<double>(family.a() + 1.0, 1.0), x);
  }
  return 0.0;
}

double family_quantile(const PolyFamily& family, double u) {
  if (!(u > 0.0 && u < 1.0)) throw std::domain_error("quantile argument must lie in (0, 1)");
  switch (family.kind()) {
    case FamilyKind::Legendre:
      return 2.0 * u - 1.0;
    case FamilyKind::Hermite:
      return boost::math::quantile(boost::math::normal_distribution<double>(0.0, 1.0), u);
    case FamilyKind::Jacobi:
      return 2.0 * boost::math::quantile(
                       boost::math::beta_distribution<double>(family.b() + 1.0, family.a() + 1.0), u) -
             1.0;
    case FamilyKind::Laguerre:
      return boost::math::quantile(boost::math::gamma_distribution<double>(family.a() + 1.0, 1.0), u);
  }
  return 0.0;
}

double draw_from_family(const PolyFamily& family, Rng& rng) {
  switch (family.kind()) {
    case FamilyKind::Legendre:
      return std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
    case FamilyKind::Hermite:
      return std::normal_distribution<double>(0.0, 1.0)(rng);
    case FamilyKind::Jacobi: {
      // y ~ Beta(b + 1, a + 1) via the gamma ratio, x = 2y - 1
      const double g1 = std::gamma_distribution<double>(family.b() + 1.0, 1.0)(rng);
      const double g2 = std::gamma_distribution<double>(family.a() + 1.0, 1.0)(rng);
      return 2.0 * g1 / (g1 + g2) - 1.0;
    }
    case FamilyKind::Laguerre:
      return std::gamma_distribution<double>(family.a() + 1.0, 1.0)(rng);
  }
  return 0.0;
}

SampleSet sample_standard(const BasisSpec& spec, std::size_t n, std::uint64_t seed) {
  require_points(n);
  const int d = spec.dimension();
  SampleSet s = make_set(n, d, Strategy::Standard, seed);
  Rng rng(seed);
  for (Eigen::Index i = 0; i < s.points.rows(); ++i)
    for (int k = 0; k < d; ++k) s.points(i, k) = draw_from_family(spec.families()[static_cast<std::size_t>(k)], rng);
  return s;
}

SampleSet sample_lhs(const BasisSpec& spec, std::size_t n, std::uint64_t seed) {
  require_points(n);
  const int d = spec.dimension();
  SampleSet s = make_set(n, d, Strategy::LHS, seed);
  Rng rng(seed);
  std::uniform_real_distribution<double> zeta(0.0, 1.0);
  std::vector<std::size_t> perm(n);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (int k = 0; k < d; ++k) {
    const auto& fam = spec.families()[static_cast<std::size_t>(k)];
    std::vector<double> column(n);
    for (std::size_t i = 0; i < n; ++i) {
      double z = (static_cast<double>(i) + zeta(rng)) * inv_n;
      // keep z inside its stratum and strictly inside (0, 1)
      z = std::clamp(z, std::nextafter(static_cast<double>(i) * inv_n, 1.0),
                     std::nextafter(static_cast<double>(i + 1) * inv_n, 0.0));
      column[i] = family_quantile(fam, z);
    }
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    for (std::size_t r = 0; r < n; ++r) s.points(static_cast<Eigen::Index>(r), k) = column[perm[r]];
  }
  return s;
}

SampleSet sample_asymptotic(const BasisSpec& spec, std::size_t n, std::uint64_t seed) {
  require_points(n);
  const int d = spec.dimension();
  Rng rng(seed);
  if (spec.all_of(FamilyKind::Legendre)) {
    SampleSet s = make_set(n, d, Strategy::AsymptoticChebyshev, seed);
    for (Eigen::Index i = 0; i < s.points.rows(); ++i) {
      double w = 1.0;
      for (int k = 0; k < d; ++k) {
        double x = 1.0;
        while (std::abs(x) >= 1.0) x = std::cos(std::numbers::pi * open_uniform(rng));
        s.points(i, k) = x;
        w *= std::pow(1.0 - x * x, 0.25);
      }
      s.weights(i) = w;
    }
    return s;
  }
  if (spec.all_of(FamilyKind::Hermite)) {
    SampleSet s = make_set(n, d, Strategy::AsymptoticBall, seed);
    const double radius = std::sqrt(2.0) * std::sqrt(2.0 * spec.order() + 1.0);
    s.metadata["radius"] = format_double(radius);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> dir(static_cast<std::size_t>(d));
    for (Eigen::Index i = 0; i < s.points.rows(); ++i) {
      double norm2 = 0.0;
      while (norm2 == 0.0) {
        norm2 = 0.0;
        for (auto& v : dir) {
          v = gauss(rng);
          norm2 += v * v;
        }
      }
      const double r = radius * std::pow(open_uniform(rng), 1.0 / d) / std::sqrt(norm2);
      double sq = 0.0;
      for (int k = 0; k < d; ++k) {
        const double x = std::min(dir[static_cast<std::size_t>(k)] * r, radius);
        s.points(i, k) = x;
        sq += x * x;
      }
      s.weights(i) = std::exp(-sq / 4.0);
    }
    return s;
  }
  throw UnsupportedStrategyError("asymptotic sampling requires an all-Legendre or all-Hermite basis");
}

double b_value(const BasisSpec& spec, std::span<const double> xi) {
  thread_local std::vector<double> row;
  row.resize(spec.size());
  spec.eval_row(xi, row);
  double s = 0.0;
  for (double v : row) s += v * v;
  return std::sqrt(s);
}

namespace {

enum class ProposalKind { Orthogonality, Chebyshev, Ball };

constexpr std::size_t kMaxGap = 10000;
constexpr double kIdleTarget = 0.002;
constexpr std::size_t kPilot = 10000;

struct Chain {
  const BasisSpec& spec;
  ProposalKind kind;
  double radius = 0.0;
  Rng& rng;

  void propose(std::span<double> x) {
    const int d = spec.dimension();
    switch (kind) {
      case ProposalKind::Orthogonality:
        for (int k = 0; k < d; ++k) x[static_cast<std::size_t>(k)] = draw_from_family(spec.families()[static_cast<std::size_t>(k)], rng);
        return;
      case ProposalKind::Chebyshev:
        for (int k = 0; k < d; ++k) {
          double v = 1.0;
          while (std::abs(v) >= 1.0) v = std::cos(std::numbers::pi * open_uniform(rng));
          x[static_cast<std::size_t>(k)] = v;
        }
        return;
      case ProposalKind::Ball: {
        std::normal_distribution<double> gauss(0.0, 1.0);
        double norm2 = 0.0;
        while (norm2 == 0.0) {
          norm2 = 0.0;
          for (int k = 0; k < d; ++k) {
            x[static_cast<std::size_t>(k)] = gauss(rng);
            norm2 += x[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(k)];
          }
        }
        const double r = radius * std::pow(open_uniform(rng), 1.0 / d) / std::sqrt(norm2);
        for (int k = 0; k < d; ++k) x[static_cast<std::size_t>(k)] *= r;
        return;
      }
    }
  }

  // log of target / proposal, up to a constant; also returns B(x).
  double log_ratio(std::span<const double> x, double& b) const {
    b = b_value(spec, x);
    double r = 2.0 * std::log(b);
    switch (kind) {
      case ProposalKind::Orthogonality:
        break;
      case ProposalKind::Chebyshev:
        for (double v : x) r += 0.5 * std::log1p(-v * v);
        break;
      case ProposalKind::Ball: {
        double sq = 0.0;
        for (double v : x) sq += v * v;
        r -= 0.5 * sq;
        break;
      }
    }
    return r;
  }
};

}  // namespace

SampleSet sample_coherence_optimal(const BasisSpec& spec, std::size_t n, std::uint64_t seed, const McmcOptions& mcmc) {
  require_points(n);
  const int d = spec.dimension();
  const int p = spec.order();
  if (mcmc.burn_in < 0 || mcmc.thinning < 0) throw std::invalid_argument("MCMC burn-in and thinning must be nonnegative");
  const int thinning = mcmc.thinning > 0 ? mcmc.thinning : std::max(1, d);

  ProposalKind kind = ProposalKind::Orthogonality;
  const bool asymptotic_available = spec.all_of(FamilyKind::Legendre) || spec.all_of(FamilyKind::Hermite);
  const bool want_asymptotic = mcmc.proposal == McmcOptions::Proposal::Asymptotic ||
                               (mcmc.proposal == McmcOptions::Proposal::Auto && p > d);
  if (want_asymptotic && asymptotic_available)
    kind = spec.all_of(FamilyKind::Legendre) ? ProposalKind::Chebyshev : ProposalKind::Ball;
  else if (mcmc.proposal == McmcOptions::Proposal::Asymptotic)
    throw UnsupportedStrategyError("asymptotic proposal requires an all-Legendre or all-Hermite basis");

  SampleSet s = make_set(n, d, Strategy::CoherenceOptimal, seed);
  Rng rng(seed);
  Chain chain{spec, kind, std::sqrt(2.0) * std::sqrt(2.0 * p + 1.0), rng};
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  std::vector<double> current(static_cast<std::size_t>(d));
  std::vector<double> candidate(static_cast<std::size_t>(d));
  chain.propose(current);
  double b_cur = 0.0;
  double lr_cur = chain.log_ratio(current, b_cur);

  std::size_t accepted = 0;
  std::size_t iterations = 0;
  auto step = [&]() {
    chain.propose(candidate);
    double b_cand = 0.0;
    const double lr_cand = chain.log_ratio(candidate, b_cand);
    ++iterations;
    const double log_alpha = lr_cand - lr_cur;
    if (log_alpha >= 0.0 || unif(rng) < std::exp(log_alpha)) {
      current.swap(candidate);
      lr_cur = lr_cand;
      b_cur = b_cand;
      ++accepted;
      return true;
    }
    return false;
  };

  for (int i = 0; i < mcmc.burn_in; ++i) step();
  const double rate = mcmc.burn_in > 0 ? std::max(static_cast<double>(accepted) / mcmc.burn_in, 1e-3) : 1.0;

  // Pilot run: lengths of the stretches without an accepted move.
  std::vector<std::size_t> stays;
  std::size_t run = 0;
  for (std::size_t i = 0; i < kPilot; ++i) {
    if (step()) {
      if (run) stays.push_back(run);
      run = 0;
    } else {
      ++run;
    }
  }
  if (run) stays.push_back(run);

  // The chain is read every `gap` iterations: the larger of thinning / acceptance rate and the
  // shortest window that held no accepted move in at most kIdleTarget of the pilot windows.
  // Repeated points are then rare without conditioning the reads on the chain having moved.
  std::size_t gap = std::clamp<std::size_t>(static_cast<std::size_t>(std::lround(thinning / rate)), 1, kMaxGap);
  auto idle_fraction = [&](std::size_t g) {
    std::size_t idle = 0;
    for (std::size_t len : stays) idle += len >= g ? len - g + 1 : 0;
    return static_cast<double>(idle) / static_cast<double>(kPilot - g + 1);
  };
  while (gap < kMaxGap && idle_fraction(gap) > kIdleTarget) ++gap;
  const std::size_t burn_accepted = accepted;
  const std::size_t burn_iterations = iterations;

  const double sqrt_p = std::sqrt(static_cast<double>(spec.size()));
  for (Eigen::Index i = 0; i < s.points.rows(); ++i) {
    for (std::size_t g = 0; g < gap; ++g) step();
    for (int k = 0; k < d; ++k) s.points(i, k) = current[static_cast<std::size_t>(k)];
    s.weights(i) = sqrt_p / b_cur;
  }

  const std::size_t sample_iterations = iterations - burn_iterations;
  const double acceptance =
      sample_iterations > 0 ? static_cast<double>(accepted - burn_accepted) / static_cast<double>(sample_iterations) : 1.0;
  s.metadata["burn_in"] = std::to_string(mcmc.burn_in);
  s.metadata["thinning"] = std::to_string(thinning);
  s.metadata["gap"] = std::to_string(gap);
  s.metadata["proposal"] =
      kind == ProposalKind::Orthogonality ? "orthogonality" : (kind == ProposalKind::Chebyshev ? "chebyshev" : "ball");
  s.metadata["acceptance_rate"] = format_double(acceptance);
  if (acceptance < 0.05 || acceptance > 0.95)
    s.metadata["warning"] = "acceptance rate " + format_double(acceptance) + " outside [0.05,0.95]";
  return s;
}

SampleSet sample_randomized_quadrature(const BasisSpec& spec, std::size_t n, int level, std::uint64_t seed) {
  require_points(n);
  if (level < 1) throw std::invalid_argument("quadrature level must be positive");
  const int d = spec.dimension();
  unsigned __int128 total = 1;
  for (int k = 0; k < d; ++k) {
    total *= static_cast<unsigned>(level);
    if (total > std::numeric_limits<std::uint64_t>::max())
      throw OverflowError("tensor grid size level^d exceeds 64-bit range");
  }
  const auto grid_size = static_cast<std::uint64_t>(total);
  if (grid_size < n)
    throw InsufficientGridError("tensor grid has " + std::to_string(grid_size) + " points, fewer than " +
                                std::to_string(n) + " requested");

  std::vector<QuadratureRule> rules;
  rules.reserve(static_cast<std::size_t>(d));
  for (const auto& fam : spec.families()) rules.push_back(gauss_rule(fam, level));

  // Floyd's algorithm: n distinct integers from [0, grid_size).
  Rng rng(seed);
  std::vector<std::uint64_t> chosen;
  chosen.reserve(n);
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(2 * n);
  for (std::uint64_t j = grid_size - n; j < grid_size; ++j) {
    const std::uint64_t t = std::uniform_int_distribution<std::uint64_t>(0, j)(rng);
    const std::uint64_t pick = seen.contains(t) ? j : t;
    seen.insert(pick);
    chosen.push_back(pick);
  }
  std::shuffle(chosen.begin(), chosen.end(), rng);

  SampleSet s = make_set(n, d, Strategy::RandQuadrature, seed);
  s.metadata["level"] = std::to_string(level);
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t code = chosen[i];
    for (int k = 0; k < d; ++k) {
      const auto node = static_cast<std::size_t>(code % static_cast<std::uint64_t>(level));
      code /= static_cast<std::uint64_t>(level);
      s.points(static_cast<Eigen::Index>(i), k) = rules[static_cast<std::size_t>(k)].nodes[node];
    }
  }
  return s;
}

std::span<const unsigned> halton_bases(int count) {
  static const std::array<unsigned, 50> primes = [] {
    std::array<unsigned, 50> out{};
    unsigned candidate = 2;
    for (std::size_t found = 0; found < out.size(); ++candidate) {
      bool prime = true;
      for (std::size_t j = 0; j < found && out[j] * out[j] <= candidate; ++j)
        if (candidate % out[j] == 0) {
          prime = false;
          break;
        }
      if (prime) out[found++] = candidate;
    }
    return out;
  }();
  if (count < 0 || count > static_cast<int>(primes.size())) throw std::out_of_range("Halton supports up to 50 dimensions");
  return {primes.data(), static_cast<std::size_t>(count)};
}

double radical_inverse(std::uint64_t index, unsigned base) {
  const double inv = 1.0 / base;
  double scale = inv;
  double result = 0.0;
  while (index > 0) {
    result += static_cast<double>(index % base) * scale;
    index /= base;
    scale *= inv;
  }
  return result;
}

SampleSet sample_qmc(const BasisSpec& spec, std::size_t n, std::uint64_t skip) {
  if (!spec.all_of(FamilyKind::Legendre))
    throw UnsupportedStrategyError("Halton sampling is only defined for uniform (Legendre) inputs");
  const int d = spec.dimension();
  const auto bases = halton_bases(d);
  SampleSet s = make_set(n, d, Strategy::HaltonQMC, skip);
  s.metadata["skip"] = std::to_string(skip);
  for (std::size_t i = 0; i < n; ++i)
    for (int k = 0; k < d; ++k)
      s.points(static_cast<Eigen::Index>(i), k) = 2.0 * radical_inverse(skip + i + 1, bases[static_cast<std::size_t>(k)]) - 1.0;
  return s;
}

SampleSet draw_samples(Strategy strategy, const BasisSpec& spec, std::size_t n, std::uint64_t seed) {
  switch (strategy) {
    case Strategy::Standard:
      return sample_standard(spec, n, seed);
    case Strategy::LHS:
      return sample_lhs(spec, n, seed);
    case Strategy::AsymptoticChebyshev:
    case Strategy::AsymptoticBall:
      return sample_asymptotic(spec, n, seed);
    case Strategy::CoherenceOptimal:
      return sample_coherence_optimal(spec, n, seed);
    case Strategy::RandQuadrature:
      return sample_randomized_quadrature(spec, n, spec.order() + 1, seed);
    case Strategy::HaltonQMC:
      return sample_qmc(spec, n, 0);
  }
  throw std::invalid_argument("unknown strategy");
}

CoherenceEstimate coherence_of(const BasisSpec& spec, const SampleSet& samples) {
  CoherenceEstimate est;
  est.n_probe = samples.size();
  std::vector<double> row(spec.size());
  std::vector<double> xi(static_cast<std::size_t>(spec.dimension()));
  for (Eigen::Index i = 0; i < samples.points.rows(); ++i) {
    for (int k = 0; k < spec.dimension(); ++k) xi[static_cast<std::size_t>(k)] = samples.points(i, k);
    spec.eval_row(xi, row);
    const double w2 = samples.weights(i) * samples.weights(i);
    double sum = 0.0;
    double peak = 0.0;
    for (double v : row) {
      const double t = w2 * v * v;
      sum += t;
      peak = std::max(peak, t);
    }
    est.mu_hat = std::max(est.mu_hat, sum);
    est.mu_hat_per_basis = std::max(est.mu_hat_per_basis, peak);
  }
  return est;
}

CoherenceEstimate estimate_coherence(const BasisSpec& spec, Strategy strategy, std::size_t n_probe, std::uint64_t seed) {
  if (n_probe == 0) throw std::invalid_argument("coherence estimate needs at least one probe");
  return coherence_of(spec, draw_samples(strategy, spec, n_probe, seed));
}

void write_csv(std::ostream& os, const SampleSet& samples) {
  os << "# strategy=" << to_string(samples.strategy) << "; seed=" << samples.seed;
  for (const auto& [key, value] : samples.metadata) {
    std::string v = value;
    std::replace(v.begin(), v.end(), ';', ',');
    std::replace(v.begin(), v.end(), '\n', ' ');
    os << "; " << key << "=" << v;
  }
  os << "\n";
  for (int k = 0; k < samples.dimension(); ++k) os << "xi_" << (k + 1) << ",";
  os << "w\n";
  os << std::setprecision(17);
  for (Eigen::Index i = 0; i < samples.points.rows(); ++i) {
    for (int k = 0; k < samples.dimension(); ++k) os << samples.points(i, k) << ",";
    os << samples.weights(i) << "\n";
  }
}

SampleSet read_sample_csv(std::istream& is) {
  SampleSet s;
  std::string line;
  if (!std::getline(is, line) || line.rfind("# ", 0) != 0) throw std::runtime_error("sample CSV: missing header comment");
  {
    std::string body = line.substr(2);
    std::size_t pos = 0;
    while (pos <= body.size()) {
      std::size_t end = body.find("; ", pos);
      if (end == std::string::npos) end = body.size();
      const std::string field = body.substr(pos, end - pos);
      const auto eq = field.find('=');
      if (eq != std::string::npos) {
        const std::string key = field.substr(0, eq);
        const std::string value = field.substr(eq + 1);
        if (key == "strategy")
          s.strategy = parse_strategy(value);
        else if (key == "seed")
          s.seed = std::stoull(value);
        else
          s.metadata[key] = value;
      }
      pos = end + 2;
    }
  }
  if (!std::getline(is, line)) throw std::runtime_error("sample CSV: missing column header");
  int d = 0;
  bool has_index = false;
  {
    std::istringstream cols(line);
    std::string c;
    while (std::getline(cols, c, ',')) {
      if (c.rfind("xi_", 0) == 0) ++d;
      if (c == "candidate_index") has_index = true;
    }
  }
  std::vector<std::vector<double>> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream cells(line);
    std::string c;
    std::vector<double> row;
    while (std::getline(cells, c, ',')) row.push_back(std::stod(c));
    if (row.size() != static_cast<std::size_t>(d + 1 + (has_index ? 1 : 0)))
      throw std::runtime_error("sample CSV: row has wrong number of columns");
    rows.push_back(std::move(row));
  }
  s.points.resize(static_cast<Eigen::Index>(rows.size()), d);
  s.weights.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (int k = 0; k < d; ++k) s.points(static_cast<Eigen::Index>(i), k) = rows[i][static_cast<std::size_t>(k)];
    s.weights(static_cast<Eigen::Index>(i)) = rows[i][static_cast<std::size_t>(d)];
  }
  return s;
}

}  // namespace pce
