#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "pce/orthopoly.hpp"
#include "pce/random.hpp"

namespace pce {

enum class Strategy {
  Standard,
  LHS,
  AsymptoticChebyshev,
  AsymptoticBall,
  CoherenceOptimal,
  RandQuadrature,
  HaltonQMC,
};

std::string_view to_string(Strategy s);
Strategy parse_strategy(std::string_view name);

/// N points in R^d with least-squares weights and the recipe that produced them.
struct SampleSet {
  Eigen::MatrixXd points;   // N x d
  Eigen::VectorXd weights;  // length N, strictly positive
  Strategy strategy = Strategy::Standard;
  std::uint64_t seed = 0;
  // Generator parameters and diagnostics (burn-in, acceptance rate, warnings, ...).
  std::map<std::string, std::string> metadata;

  std::size_t size() const noexcept { return static_cast<std::size_t>(points.rows()); }
  int dimension() const noexcept { return static_cast<int>(points.cols()); }
};

struct McmcOptions {
  int burn_in = 1000;
  int thinning = 0;  // 0 selects max(1, d)
  enum class Proposal { Auto, Orthogonality, Asymptotic } proposal = Proposal::Auto;
};

/// CDF and inverse CDF of a family's orthogonality density.
double family_cdf(const PolyFamily& family, double x);
double family_quantile(const PolyFamily& family, double u);

/// One draw from a family's orthogonality density.
double draw_from_family(const PolyFamily& family, Rng& rng);

/// i.i.d. draws from the orthogonality density of each dimension; unit weights.
SampleSet sample_standard(const BasisSpec& spec, std::size_t n, std::uint64_t seed);

/// Latin hypercube: one draw per equiprobable CDF stratum and dimension, randomly paired.
SampleSet sample_lhs(const BasisSpec& spec, std::size_t n, std::uint64_t seed);

/// Chebyshev draws (Legendre) or uniform draws in the ball of radius sqrt(2)sqrt(2p+1) (Hermite).
SampleSet sample_asymptotic(const BasisSpec& spec, std::size_t n, std::uint64_t seed);

/// sqrt(sum_j psi_j(xi)^2).
double b_value(const BasisSpec& spec, std::span<const double> xi);

/**
 * Draws from f(xi) B(xi)^2 / P with an independence Metropolis-Hastings chain and
 * stores w = sqrt(P) / B(xi), so that sum_j (w psi_j)^2 = P at every point.
 *
 * The proposal is the orthogonality density when d >= p and the asymptotic density
 * (Chebyshev / Hermite ball) when p > d and the basis is pure Legendre or Hermite.
 * After burn-in the chain is read every `gap` iterations, a schedule fixed before sampling:
 * gap is at least thinning / (burn-in acceptance rate), and is raised until at most 0.2% of
 * the windows of that length in a 10^4-step pilot run held no accepted move. Reads are never
 * conditioned on the chain having moved, so the rare repeated point is kept.
 * The Hermite ball proposal cannot reach the target mass outside the ball.
 * An acceptance rate outside [0.05, 0.95] is recorded as metadata["warning"].
 */
SampleSet sample_coherence_optimal(const BasisSpec& spec, std::size_t n, std::uint64_t seed,
                                   const McmcOptions& mcmc = {});

/// N distinct points of the tensor grid of `level` Gauss nodes per dimension.
SampleSet sample_randomized_quadrature(const BasisSpec& spec, std::size_t n, int level, std::uint64_t seed);

/// Halton points with indices skip+1 .. skip+N, mapped from [0,1)^d to [-1,1]^d.
SampleSet sample_qmc(const BasisSpec& spec, std::size_t n, std::uint64_t skip = 0);

/// Dispatches to the sampler for `strategy` with default parameters.
SampleSet draw_samples(Strategy strategy, const BasisSpec& spec, std::size_t n, std::uint64_t seed);

/// Radical inverse of `index` in the given base.
double radical_inverse(std::uint64_t index, unsigned base);

/// First `count` primes (count <= 50).
std::span<const unsigned> halton_bases(int count);

struct DiscrepancyReport {
  double star_discrepancy = 0.0;
  bool exact = false;
};

/// Star discrepancy of points in [0,1)^d: exact for d <= 2, otherwise a lower bound
/// from `random_boxes` anchored boxes whose corners are drawn from sample coordinates.
DiscrepancyReport compute_star_discrepancy(const Eigen::MatrixXd& points, std::uint64_t seed = 0,
                                           std::size_t random_boxes = 100000);

struct CoherenceEstimate {
  double mu_hat = 0.0;            // max over probes of sum_j |w psi_j|^2
  double mu_hat_per_basis = 0.0;  // max over probes and j of |w psi_j|^2
  std::size_t n_probe = 0;
};

CoherenceEstimate estimate_coherence(const BasisSpec& spec, Strategy strategy, std::size_t n_probe,
                                     std::uint64_t seed);

/// Coherence of an explicit sample set.
CoherenceEstimate coherence_of(const BasisSpec& spec, const SampleSet& samples);

/// CSV: a `#` header line with strategy, seed and metadata, a column header, then
/// one row per point (xi_1 .. xi_d, w). Values are printed with 17 significant digits.
void write_csv(std::ostream& os, const SampleSet& samples);
SampleSet read_sample_csv(std::istream& is);

}  // namespace pce
