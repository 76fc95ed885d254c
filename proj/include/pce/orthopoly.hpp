#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace pce {

enum class FamilyKind { Legendre, Hermite, Jacobi, Laguerre };

/// Highest univariate order accepted by the evaluators.
inline constexpr int kMaxUnivariateOrder = 64;

struct Interval {
  double lower;
  double upper;
};

/**
 * A univariate family of polynomials orthonormal under a probability density.
 *
 *  - Legendre:  U(-1, 1)
 *  - Hermite:   standard normal (probabilists' convention)
 *  - Jacobi:    density proportional to (1-x)^a (1+x)^b on [-1, 1], a, b > -1
 *  - Laguerre:  Gamma(a+1, 1), density proportional to x^a e^{-x} on [0, inf), a > -1
 *
 * Polynomials are evaluated from the monic recurrence coefficients
 * pi_{k+1} = (x - alpha_k) pi_k - beta_k pi_{k-1}, normalized at every step.
 */
class PolyFamily {
 public:
  static PolyFamily legendre();
  static PolyFamily hermite();
  static PolyFamily jacobi(double a, double b);
  static PolyFamily laguerre(double a);
  /// Beta(alpha, beta) on [0, 1], represented on [-1, 1] via x = 2y - 1.
  /// Yields the Jacobi family with a = beta - 1, b = alpha - 1.
  static PolyFamily beta_distribution(double alpha, double beta);

  FamilyKind kind() const noexcept { return kind_; }
  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }

  Interval support() const;
  double density(double x) const;
  std::string name() const;

  double recurrence_alpha(int k) const;
  /// beta_0 is the total mass (1); beta_k for k >= 1 is the usual monic coefficient.
  double recurrence_beta(int k) const;

  bool operator==(const PolyFamily&) const = default;

 private:
  PolyFamily(FamilyKind kind, double a, double b) : kind_(kind), a_(a), b_(b) {}

  FamilyKind kind_;
  double a_ = 0.0;
  double b_ = 0.0;
};

/// Orthonormal psi_order(x). Defined for every real x.
double eval_univariate(const PolyFamily& family, int order, double x);

/// Fills out[k] = psi_k(x) for k = 0 .. out.size() - 1.
void eval_univariate_all(const PolyFamily& family, double x, std::span<double> out);

using MultiIndex = std::vector<int>;

/// (p + d)! / (p! d!), throwing OverflowError if it does not fit in 64 bits.
std::uint64_t basis_cardinality(int d, int p);

/// All multi-indices with total degree <= p in graded-lexicographic order:
/// ascending total degree, then descending lexicographic order of (j_1, ..., j_d).
std::vector<MultiIndex> multi_index_set(int d, int p);

/// Total-degree tensor basis over independent inputs.
class BasisSpec {
 public:
  BasisSpec(std::vector<PolyFamily> families, int order);
  static BasisSpec isotropic(const PolyFamily& family, int d, int order);

  int dimension() const noexcept { return static_cast<int>(families_.size()); }
  int order() const noexcept { return order_; }
  std::size_t size() const noexcept { return indices_.size(); }
  const std::vector<PolyFamily>& families() const noexcept { return families_; }
  const std::vector<MultiIndex>& indices() const noexcept { return indices_; }

  /// True when every dimension uses the same family kind.
  bool all_of(FamilyKind kind) const noexcept;

  /// Row of the measurement matrix: r_j = prod_k psi_{j_k}(xi_k).
  Eigen::VectorXd eval_row(std::span<const double> xi) const;
  void eval_row(std::span<const double> xi, std::span<double> out) const;
  /// N x P measurement matrix for an N x d point matrix.
  Eigen::MatrixXd eval_matrix(const Eigen::MatrixXd& points) const;

 private:
  std::vector<PolyFamily> families_;
  int order_;
  std::vector<MultiIndex> indices_;
  // indices_ flattened row-major (P x d) for the hot loop
  std::vector<int> flat_;
};

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  PolyFamily family;

  std::size_t size() const noexcept { return nodes.size(); }
};

/// n-point Gauss rule for the family density (Golub-Welsch); weights sum to 1.
QuadratureRule gauss_rule(const PolyFamily& family, int n);

}  // namespace pce
