#include "pce/orthopoly.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "pce/errors.hpp"

namespace pce {

PolyFamily PolyFamily::legendre() { return {FamilyKind::Legendre, 0.0, 0.0}; }

PolyFamily PolyFamily::hermite() { return {FamilyKind::Hermite, 0.0, 0.0}; }

PolyFamily PolyFamily::jacobi(double a, double b) {
  if (!(a > -1.0) || !(b > -1.0)) throw std::invalid_argument("Jacobi exponents must exceed -1");
  return {FamilyKind::Jacobi, a, b};
}

PolyFamily PolyFamily::laguerre(double a) {
  if (!(a > -1.0)) throw std::invalid_argument("Laguerre parameter must exceed -1");
  return {FamilyKind::Laguerre, a, 0.0};
}

PolyFamily PolyFamily::beta_distribution(double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta > 0.0)) throw std::invalid_argument("Beta shape parameters must be positive");
  return jacobi(beta - 1.0, alpha - 1.0);
}

Interval PolyFamily::support() const {
  constexpr double inf = std::numeric_limits<double>::infinity();
  switch (kind_) {
    case FamilyKind::Legendre:
    case FamilyKind::Jacobi:
      return {-1.0, 1.0};
    case FamilyKind::Hermite:
      return {-inf, inf};
    case FamilyKind::Laguerre:
      return {0.0, inf};
  }
  return {-inf, inf};
}

double PolyFamily::density(double x) const {
  switch (kind_) {
    case FamilyKind::Legendre:
      return (x >= -1.0 && x <= 1.0) ? 0.5 : 0.0;
    case FamilyKind::Hermite:
      return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
    case FamilyKind::Jacobi: {
      if (x <= -1.0 || x >= 1.0) return 0.0;
      const double log_norm = (a_ + b_ + 1.0) * std::log(2.0) + std::lgamma(a_ + 1.0) + std::lgamma(b_ + 1.0) -
                              std::lgamma(a_ + b_ + 2.0);
      return std::exp(a_ * std::log1p(-x) + b_ * std::log1p(x) - log_norm);
    }
    case FamilyKind::Laguerre:
      if (x <= 0.0) return 0.0;
      return std::exp(a_ * std::log(x) - x - std::lgamma(a_ + 1.0));
  }
  return 0.0;
}

std::string PolyFamily::name() const {
  std::ostringstream os;
  switch (kind_) {
    case FamilyKind::Legendre:
      return "legendre";
    case FamilyKind::Hermite:
      return "hermite";
    case FamilyKind::Jacobi:
      os << "jacobi(" << a_ << "," << b_ << ")";
      return os.str();
    case FamilyKind::Laguerre:
      os << "laguerre(" << a_ << ")";
      return os.str();
  }
  return "unknown";
}

double PolyFamily::recurrence_alpha(int k) const {
  switch (kind_) {
    case FamilyKind::Legendre:
    case FamilyKind::Hermite:
      return 0.0;
    case FamilyKind::Laguerre:
      return 2.0 * k + a_ + 1.0;
    case FamilyKind::Jacobi: {
      const double s = a_ + b_;
      if (k == 0) return (b_ - a_) / (s + 2.0);
      const double t = 2.0 * k + s;
      return (b_ * b_ - a_ * a_) / (t * (t + 2.0));
    }
  }
  return 0.0;
}

double PolyFamily::recurrence_beta(int k) const {
  if (k == 0) return 1.0;
  const double kk = k;
  switch (kind_) {
    case FamilyKind::Legendre:
      return kk * kk / (4.0 * kk * kk - 1.0);
    case FamilyKind::Hermite:
      return kk;
    case FamilyKind::Laguerre:
      return kk * (kk + a_);
    case FamilyKind::Jacobi: {
      const double s = a_ + b_;
      if (k == 1) return 4.0 * (1.0 + a_) * (1.0 + b_) / ((2.0 + s) * (2.0 + s) * (3.0 + s));
      const double t = 2.0 * kk + s;
      return 4.0 * kk * (kk + a_) * (kk + b_) * (kk + s) / (t * t * (t + 1.0) * (t - 1.0));
    }
  }
  return 1.0;
}

void eval_univariate_all(const PolyFamily& family, double x, std::span<double> out) {
  if (out.empty()) return;
  out[0] = 1.0;
  if (out.size() == 1) return;
  double prev = 0.0;
  double cur = 1.0;
  double sqrt_beta = 0.0;  // sqrt(beta_k) multiplying psi_{k-1}
  for (std::size_t k = 0; k + 1 < out.size(); ++k) {
    const int ki = static_cast<int>(k);
    const double sqrt_next = std::sqrt(family.recurrence_beta(ki + 1));
    const double next = ((x - family.recurrence_alpha(ki)) * cur - sqrt_beta * prev) / sqrt_next;
    prev = cur;
    cur = next;
    sqrt_beta = sqrt_next;
    out[k + 1] = cur;
  }
}

double eval_univariate(const PolyFamily& family, int order, double x) {
  if (order < 0 || order > kMaxUnivariateOrder) throw std::out_of_range("univariate order out of range");
  double buf[kMaxUnivariateOrder + 1];
  eval_univariate_all(family, x, std::span<double>(buf, static_cast<std::size_t>(order) + 1));
  return buf[order];
}

std::uint64_t basis_cardinality(int d, int p) {
  if (d < 1 || p < 0) throw std::invalid_argument("basis cardinality requires d >= 1 and p >= 0");
  // C(p + d, k) with k = min(p, d), built incrementally so every partial value is itself binomial.
  const std::uint64_t n = static_cast<std::uint64_t>(p) + static_cast<std::uint64_t>(d);
  const std::uint64_t k = static_cast<std::uint64_t>(std::min(p, d));
  unsigned __int128 result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    result = result * (n - k + i) / i;
    if (result > std::numeric_limits<std::uint64_t>::max()) {
      throw OverflowError("basis cardinality for d=" + std::to_string(d) + ", p=" + std::to_string(p) +
                          " exceeds 64-bit range");
    }
  }
  return static_cast<std::uint64_t>(result);
}

namespace {

// Appends every composition of `remaining` into positions [pos, d) in descending lex order.
void compositions(int d, int pos, int remaining, MultiIndex& current, std::vector<MultiIndex>& out) {
  if (pos == d - 1) {
    current[pos] = remaining;
    out.push_back(current);
    return;
  }
  for (int v = remaining; v >= 0; --v) {
    current[pos] = v;
    compositions(d, pos + 1, remaining - v, current, out);
  }
}

}  // namespace

std::vector<MultiIndex> multi_index_set(int d, int p) {
  const std::uint64_t count = basis_cardinality(d, p);
  if (count > static_cast<std::uint64_t>(std::numeric_limits<std::ptrdiff_t>::max() / (8 * d))) {
    throw OverflowError("multi-index set too large to materialize");
  }
  std::vector<MultiIndex> out;
  out.reserve(static_cast<std::size_t>(count));
  MultiIndex current(static_cast<std::size_t>(d), 0);
  for (int degree = 0; degree <= p; ++degree) compositions(d, 0, degree, current, out);
  return out;
}

BasisSpec::BasisSpec(std::vector<PolyFamily> families, int order)
    : families_(std::move(families)), order_(order) {
  if (families_.empty()) throw std::invalid_argument("basis needs at least one dimension");
  if (order < 0 || order > kMaxUnivariateOrder) throw std::invalid_argument("basis order out of range");
  indices_ = multi_index_set(dimension(), order_);
  flat_.reserve(indices_.size() * families_.size());
  for (const auto& idx : indices_) flat_.insert(flat_.end(), idx.begin(), idx.end());
}

BasisSpec BasisSpec::isotropic(const PolyFamily& family, int d, int order) {
  if (d < 1) throw std::invalid_argument("basis dimension must be positive");
  return BasisSpec(std::vector<PolyFamily>(static_cast<std::size_t>(d), family), order);
}

bool BasisSpec::all_of(FamilyKind kind) const noexcept {
  for (const auto& f : families_)
    if (f.kind() != kind) return false;
  return true;
}

void BasisSpec::eval_row(std::span<const double> xi, std::span<double> out) const {
  const std::size_t d = families_.size();
  if (xi.size() != d) throw std::invalid_argument("point dimension does not match basis dimension");
  if (out.size() != indices_.size()) throw std::invalid_argument("output row has wrong length");
  const std::size_t stride = static_cast<std::size_t>(order_) + 1;
  thread_local std::vector<double> table;
  table.resize(d * stride);
  for (std::size_t k = 0; k < d; ++k)
    eval_univariate_all(families_[k], xi[k], std::span<double>(table.data() + k * stride, stride));

  const int* idx = flat_.data();
  for (std::size_t r = 0; r < indices_.size(); ++r, idx += d) {
    double v = 1.0;
    for (std::size_t k = 0; k < d; ++k) v *= table[k * stride + static_cast<std::size_t>(idx[k])];
    out[r] = v;
  }
}

Eigen::VectorXd BasisSpec::eval_row(std::span<const double> xi) const {
  Eigen::VectorXd row(static_cast<Eigen::Index>(size()));
  eval_row(xi, std::span<double>(row.data(), size()));
  return row;
}

Eigen::MatrixXd BasisSpec::eval_matrix(const Eigen::MatrixXd& points) const {
  if (points.cols() != dimension()) throw std::invalid_argument("point matrix has wrong column count");
  const Eigen::Index n = points.rows();
  // Row-major scratch so each basis row is contiguous.
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> psi(n, static_cast<Eigen::Index>(size()));
  std::vector<double> xi(static_cast<std::size_t>(dimension()));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int k = 0; k < dimension(); ++k) xi[static_cast<std::size_t>(k)] = points(i, k);
    eval_row(xi, std::span<double>(psi.row(i).data(), size()));
  }
  return psi;
}

QuadratureRule gauss_rule(const PolyFamily& family, int n) {
  if (n < 1) throw std::invalid_argument("quadrature needs at least one node");
  Eigen::VectorXd diag(n);
  Eigen::VectorXd sub(std::max(n - 1, 0));
  for (int k = 0; k < n; ++k) diag(k) = family.recurrence_alpha(k);
  for (int k = 1; k < n; ++k) sub(k - 1) = std::sqrt(family.recurrence_beta(k));

  QuadratureRule rule{{}, {}, family};
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  if (n == 1) {
    rule.nodes[0] = diag(0);
    rule.weights[0] = 1.0;
    return rule;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success) throw NumericalError("Golub-Welsch eigensolve failed for " + family.name());
  // Nodes are polished by Newton on psi_n; weights come from the Christoffel function
  // 1 / sum_k psi_k(x)^2, which keeps full relative accuracy for the tiny tail weights
  // that the eigenvector components lose.
  auto sweep = [&](double x, double& sum_sq, double& pn, double& dpn) {
    double prev = 0.0, cur = 1.0, dprev = 0.0, dcur = 0.0;
    sum_sq = 1.0;
    for (int k = 0; k < n; ++k) {
      const double bk = k > 0 ? std::sqrt(family.recurrence_beta(k)) : 0.0;
      const double bn = std::sqrt(family.recurrence_beta(k + 1));
      const double next = ((x - family.recurrence_alpha(k)) * cur - bk * prev) / bn;
      const double dnext = ((x - family.recurrence_alpha(k)) * dcur + cur - bk * dprev) / bn;
      prev = cur;
      cur = next;
      dprev = dcur;
      dcur = dnext;
      if (k + 1 < n) sum_sq += cur * cur;
    }
    pn = cur;
    dpn = dcur;
  };
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    double x = es.eigenvalues()(i), sum_sq = 0.0, pn = 0.0, dpn = 0.0;
    for (int it = 0; it < 2; ++it) {
      sweep(x, sum_sq, pn, dpn);
      if (dpn != 0.0 && std::isfinite(pn / dpn)) x -= pn / dpn;
    }
    sweep(x, sum_sq, pn, dpn);
    rule.nodes[static_cast<std::size_t>(i)] = x;
    rule.weights[static_cast<std::size_t>(i)] = 1.0 / sum_sq;
    total += 1.0 / sum_sq;
  }
  for (auto& w : rule.weights) w /= total;
  return rule;
}

}  // namespace pce
