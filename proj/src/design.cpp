#include "pce/design.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <string>

#include "pce/errors.hpp"

namespace pce {

namespace {

constexpr double kAlphaTol = 1e-10;    // |alpha| <= tol * |s| marks a singular square design
constexpr double kCholeskyTol = 1e-13;  // pivot^2 <= tol * max diag marks a singular M
constexpr std::size_t kRefreshEvery = 64;

struct Extremes {
  double lambda_min;
  double lambda_max;
};

// Extreme eigenvalues of diag(mu) + [0 z; z^T gamma] (bordered by one row and column).
// mu is ascending; deflated components keep their eigenvalue.
Extremes bordered_extremes(const Eigen::VectorXd& mu, const Eigen::VectorXd& z, double gamma) {
  const Eigen::Index m = mu.size();
  const double scale = std::max({mu.size() ? mu(m - 1) : 0.0, std::abs(gamma), 1e-300});
  const double ztol = 1e-14 * std::sqrt(scale);
  std::vector<double> live_mu, live_z2;
  double defl_min = kSingular, defl_max = -kSingular;
  for (Eigen::Index k = 0; k < m; ++k) {
    if (std::abs(z(k)) <= ztol) {
      defl_min = std::min(defl_min, mu(k));
      defl_max = std::max(defl_max, mu(k));
    } else {
      live_mu.push_back(mu(k));
      live_z2.push_back(z(k) * z(k));
    }
  }
  if (live_mu.empty()) return {std::min(defl_min, gamma), std::max(defl_max, gamma)};

  auto f = [&](double lambda) {
    double s = gamma - lambda;
    for (std::size_t k = 0; k < live_mu.size(); ++k) s -= live_z2[k] / (live_mu[k] - lambda);
    return s;
  };
  auto bisect = [&](double lo, double hi) {
    // f is decreasing on each pole-free interval
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (f(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };

  const double first = live_mu.front();
  double lo = std::min(0.0, first) - 1.0;
  while (f(lo) < 0.0) lo = 2.0 * lo - 1.0;
  const double small = bisect(lo, first);

  const double last = live_mu.back();
  double znorm2 = 0.0;
  for (double v : live_z2) znorm2 += v;
  double hi = last + std::abs(gamma) + std::sqrt(znorm2) + 1.0;
  while (f(hi) > 0.0) hi = 2.0 * hi + 1.0;
  const double large = bisect(last, hi);
  return {std::min(small, defl_min), std::max(large, defl_max)};
}

// Extreme eigenvalues of diag(mu) + a a^T with z = V^T a; mu ascending.
Extremes rank_one_extremes(const Eigen::VectorXd& mu, const Eigen::VectorXd& z) {
  const Eigen::Index m = mu.size();
  const double ztol = 1e-14 * std::sqrt(std::max(mu(m - 1), 1e-300));
  std::vector<double> live_mu, live_z2;
  double defl_min = kSingular, defl_max = -kSingular;
  for (Eigen::Index k = 0; k < m; ++k) {
    if (std::abs(z(k)) <= ztol) {
      defl_min = std::min(defl_min, mu(k));
      defl_max = std::max(defl_max, mu(k));
    } else {
      live_mu.push_back(mu(k));
      live_z2.push_back(z(k) * z(k));
    }
  }
  if (live_mu.empty()) return {defl_min, defl_max};

  auto g = [&](double lambda) {
    double s = 1.0;
    for (std::size_t k = 0; k < live_mu.size(); ++k) s += live_z2[k] / (live_mu[k] - lambda);
    return s;
  };
  auto bisect = [&](double lo, double hi) {
    // g is increasing on each pole-free interval
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (g(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  double znorm2 = 0.0;
  for (double v : live_z2) znorm2 += v;
  const double small =
      bisect(live_mu[0], live_mu.size() > 1 ? live_mu[1] : live_mu[0] + znorm2);
  const double large = bisect(live_mu.back(), live_mu.back() + znorm2);
  return {std::min(small, defl_min), std::max(large, defl_max)};
}

double extremes_criterion(Criterion c, Extremes e, double n) {
  if (!(e.lambda_min > 0.0) || e.lambda_min <= 1e-14 * e.lambda_max) return kSingular;
  if (c == Criterion::E) return n / e.lambda_min;
  return e.lambda_max / e.lambda_min;
}

Eigen::MatrixXd weighted(const Eigen::MatrixXd& candidates, const Eigen::VectorXd* weights) {
  if (!weights) return candidates;
  if (weights->size() != candidates.rows()) throw std::invalid_argument("weight vector length does not match candidates");
  return weights->asDiagonal() * candidates;
}

Eigen::MatrixXd gram_of(const Eigen::MatrixXd& x, const std::vector<std::size_t>& rows, Eigen::Index cols) {
  Eigen::MatrixXd s(static_cast<Eigen::Index>(rows.size()), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) s.row(static_cast<Eigen::Index>(r)) = x.row(static_cast<Eigen::Index>(rows[r])).head(cols);
  return s.transpose() * s;
}

// Ranks every remaining candidate; returns the index with the smallest value (lowest index on ties).
template <class Score>
std::size_t pick_best(const std::vector<char>& taken, Score&& score, double& best_value) {
  std::size_t best = taken.size();
  best_value = kSingular;
  for (std::size_t i = 0; i < taken.size(); ++i) {
    if (taken[i]) continue;
    const double v = score(i);
    if (v < best_value) {
      best_value = v;
      best = i;
    }
  }
  return best;
}

double log_det_chol(const Eigen::MatrixXd& a, bool& ok) {
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  ok = llt.info() == Eigen::Success;
  if (!ok) return -kSingular;
  const Eigen::VectorXd diag = llt.matrixLLT().diagonal();
  const double max_diag = a.diagonal().maxCoeff();
  if (!(max_diag > 0.0) || diag.array().square().minCoeff() <= kCholeskyTol * max_diag) {
    ok = false;
    return -kSingular;
  }
  return 2.0 * diag.array().log().sum();
}

}  // namespace

std::string_view to_string(Criterion c) {
  switch (c) {
    case Criterion::D:
      return "D";
    case Criterion::A:
      return "A";
    case Criterion::E:
      return "E";
    case Criterion::K:
      return "K";
  }
  return "?";
}

Criterion parse_criterion(std::string_view name) {
  if (name == "D" || name == "d") return Criterion::D;
  if (name == "A" || name == "a" || name == "I" || name == "i") return Criterion::A;
  if (name == "E" || name == "e") return Criterion::E;
  if (name == "K" || name == "k") return Criterion::K;
  throw std::invalid_argument("unknown optimality criterion '" + std::string(name) + "'");
}

double criterion_of_information(Criterion c, const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() == 0) throw std::invalid_argument("information matrix must be square and nonempty");
  if (!m.allFinite()) throw NumericalError("information matrix has non-finite entries");
  const double p = static_cast<double>(m.rows());
  switch (c) {
    case Criterion::D: {
      bool ok = false;
      const double logdet = log_det_chol(m, ok);
      if (!ok) return kSingular;
      return std::exp(-logdet / p);
    }
    case Criterion::A: {
      Eigen::LLT<Eigen::MatrixXd> llt(m);
      bool ok = false;
      log_det_chol(m, ok);
      if (!ok) return kSingular;
      const Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(m.rows(), m.cols()));
      return inv.trace();
    }
    case Criterion::E:
    case Criterion::K: {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
      if (es.info() != Eigen::Success) throw NumericalError("symmetric eigensolve failed");
      const double lmin = es.eigenvalues()(0);
      const double lmax = es.eigenvalues()(m.rows() - 1);
      if (!(lmin > 0.0) || lmin <= 1e-14 * lmax) return kSingular;
      return c == Criterion::E ? 1.0 / lmin : lmax / lmin;
    }
  }
  return kSingular;
}

double criterion_value(Criterion c, const Eigen::MatrixXd& psi, const Eigen::VectorXd* weights) {
  if (psi.rows() == 0) return kSingular;
  const Eigen::MatrixXd x = weighted(psi, weights);
  const Eigen::MatrixXd m = x.transpose() * x / static_cast<double>(psi.rows());
  return criterion_of_information(c, m);
}

double det_update_ratio(const Eigen::MatrixXd& a_inv, const Eigen::VectorXd& a, int sign) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("sign must be +1 or -1");
  return 1.0 + sign * a.dot(a_inv * a);
}

TraceUpdate trace_update(const Eigen::MatrixXd& a_inv, const Eigen::VectorXd& a, int sign) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("sign must be +1 or -1");
  const Eigen::VectorXd v = a_inv * a;
  const double denom = 1.0 + sign * a.dot(v);
  if (std::abs(denom) <= 1e-12) throw SingularUpdateError("rank-one update denominator is zero");
  TraceUpdate out{0.0, a_inv - (sign / denom) * v * v.transpose()};
  out.trace = a_inv.trace() - sign * v.squaredNorm() / denom;
  return out;
}

double fedorov_delta(const Eigen::MatrixXd& a_inv, const Eigen::VectorXd& xi, const Eigen::VectorXd& xj) {
  const Eigen::VectorXd yi = a_inv * xi;
  const double di = xi.dot(yi);
  const double dj = xj.dot(a_inv * xj);
  const double dij = xj.dot(yi);
  return dj - (di * dj - dij * dij) - di;
}

DesignState greedy_design(const Eigen::MatrixXd& candidates, const Eigen::VectorXd* weights, std::size_t n,
                          Criterion criterion, const GreedyOptions& options) {
  const auto nc = static_cast<std::size_t>(candidates.rows());
  const auto p = static_cast<std::size_t>(candidates.cols());
  if (p == 0) throw std::invalid_argument("candidate matrix has no columns");
  if (n < p) throw std::invalid_argument("design size must be at least the number of basis functions");
  if (n > nc) throw std::invalid_argument("design size exceeds the candidate count");
  const Eigen::MatrixXd x = weighted(candidates, weights);
  const auto P = static_cast<Eigen::Index>(p);

  DesignState state;
  state.criterion = criterion;
  state.selected.reserve(n);
  std::vector<char> taken(nc, 0);

  auto commit = [&](std::size_t step, std::size_t best, double value) {
    if (best == nc || !std::isfinite(value))
      throw DesignConstructionError(step, "every remaining candidate gives a singular design");
    taken[best] = 1;
    state.selected.push_back(best);
    state.criterion_value = value;
  };

  // Growth phase: square designs on the leading columns.
  for (std::size_t step = 1; step <= p; ++step) {
    const auto cols = static_cast<Eigen::Index>(step);
    const double nn = static_cast<double>(step);
    double value = kSingular;
    std::size_t best = nc;
    if (!options.use_updates) {
      std::vector<std::size_t> rows = state.selected;
      rows.push_back(0);
      best = pick_best(taken, [&](std::size_t i) {
        rows.back() = i;
        return criterion_of_information(criterion, gram_of(x, rows, cols) / nn);
      }, value);
      commit(step, best, value);
      continue;
    }

    const Eigen::Index m = cols - 1;
    const Eigen::MatrixXd xs = x.leftCols(cols);
    Eigen::VectorXd c = Eigen::VectorXd::Unit(cols, m);
    Eigen::MatrixXd y1(cols, m);
    Eigen::MatrixXd r(m, m);
    double log_r2 = 0.0;
    if (m > 0) {
      Eigen::MatrixXd qt(cols, m);
      for (Eigen::Index k = 0; k < m; ++k) qt.col(k) = xs.row(static_cast<Eigen::Index>(state.selected[static_cast<std::size_t>(k)])).transpose();
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(qt);
      if (criterion == Criterion::D) {
        c = qr.householderQ() * c;
      } else {
        const Eigen::MatrixXd full_q = qr.householderQ() * Eigen::MatrixXd::Identity(cols, cols);
        y1 = full_q.leftCols(m);
        c = full_q.col(m);
      }
      r = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
      log_r2 = 2.0 * r.diagonal().array().abs().log().sum();
    }
    const Eigen::VectorXd alpha = xs * c;
    const Eigen::VectorXd norms = xs.rowwise().norm();
    auto singular = [&](std::size_t i) {
      const auto ii = static_cast<Eigen::Index>(i);
      return !(std::abs(alpha(ii)) > kAlphaTol * norms(ii));
    };

    switch (criterion) {
      case Criterion::D:
        best = pick_best(taken, [&](std::size_t i) {
          if (singular(i)) return kSingular;
          const double a = alpha(static_cast<Eigen::Index>(i));
          const double logdet_m = std::log(a * a) + log_r2 - nn * std::log(nn);
          return std::exp(-logdet_m / nn);
        }, value);
        break;
      case Criterion::A: {
        double rinv_f2 = 0.0;
        Eigen::MatrixXd h(static_cast<Eigen::Index>(nc), m);
        if (m > 0) {
          const Eigen::MatrixXd rinv = r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(m, m));
          rinv_f2 = rinv.squaredNorm();
          h = xs * (y1 * rinv.transpose());
        }
        best = pick_best(taken, [&](std::size_t i) {
          if (singular(i)) return kSingular;
          const auto ii = static_cast<Eigen::Index>(i);
          const double a = alpha(ii);
          const double hh = m > 0 ? h.row(ii).squaredNorm() : 0.0;
          return nn * (rinv_f2 + (1.0 + hh) / (a * a));
        }, value);
        break;
      }
      case Criterion::E:
      case Criterion::K: {
        Eigen::VectorXd mu(m);
        Eigen::MatrixXd z(static_cast<Eigen::Index>(nc), m);
        if (m > 0) {
          Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(r.transpose() * r);
          if (es.info() != Eigen::Success) throw NumericalError("symmetric eigensolve failed");
          mu = es.eigenvalues();
          z = xs * (y1 * (r * es.eigenvectors()).eval());
        }
        best = pick_best(taken, [&](std::size_t i) {
          if (singular(i)) return kSingular;
          const auto ii = static_cast<Eigen::Index>(i);
          const Extremes e = bordered_extremes(mu, z.row(ii).transpose(), norms(ii) * norms(ii));
          return extremes_criterion(criterion, e, nn);
        }, value);
        break;
      }
    }
    commit(step, best, value);
  }

  // Full-rank phase: rank-one updates of A = X_I^T X_I.
  Eigen::MatrixXd a_inv;
  double logdet = 0.0;
  Eigen::VectorXd dq, eq;
  auto refresh = [&] {
    const Eigen::MatrixXd a = gram_of(x, state.selected, P);
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() != Eigen::Success) throw NumericalError("Cholesky of the design Gram matrix failed");
    a_inv = llt.solve(Eigen::MatrixXd::Identity(P, P));
    logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    const Eigen::MatrixXd y = x * a_inv;
    dq = (y.array() * x.array()).rowwise().sum();
    eq = y.rowwise().squaredNorm();
  };
  if (options.use_updates && n > p) refresh();

  for (std::size_t step = p + 1; step <= n; ++step) {
    const double nn = static_cast<double>(step);
    double value = kSingular;
    std::size_t best = nc;
    if (!options.use_updates) {
      std::vector<std::size_t> rows = state.selected;
      rows.push_back(0);
      best = pick_best(taken, [&](std::size_t i) {
        rows.back() = i;
        return criterion_of_information(criterion, gram_of(x, rows, P) / nn);
      }, value);
      commit(step, best, value);
      continue;
    }
    switch (criterion) {
      case Criterion::D:
        best = pick_best(taken, [&](std::size_t i) {
          const double logdet_m = logdet + std::log1p(dq(static_cast<Eigen::Index>(i))) - P * std::log(nn);
          return std::exp(-logdet_m / P);
        }, value);
        break;
      case Criterion::A: {
        const double tr = a_inv.trace();
        best = pick_best(taken, [&](std::size_t i) {
          const auto ii = static_cast<Eigen::Index>(i);
          return nn * (tr - eq(ii) / (1.0 + dq(ii)));
        }, value);
        break;
      }
      case Criterion::E:
      case Criterion::K: {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram_of(x, state.selected, P));
        if (es.info() != Eigen::Success) throw NumericalError("symmetric eigensolve failed");
        const Eigen::MatrixXd z = x * es.eigenvectors();
        best = pick_best(taken, [&](std::size_t i) {
          const Extremes e = rank_one_extremes(es.eigenvalues(), z.row(static_cast<Eigen::Index>(i)).transpose());
          return extremes_criterion(criterion, e, nn);
        }, value);
        break;
      }
    }
    commit(step, best, value);
    if (step == n) break;
    if ((step - p) % kRefreshEvery == 0) {
      refresh();
      continue;
    }
    // Sherman-Morrison on A^{-1} and the per-candidate quadratic forms.
    const Eigen::VectorXd b = x.row(static_cast<Eigen::Index>(best)).transpose();
    const Eigen::VectorXd v = a_inv * b;
    const double beta = 1.0 + b.dot(v);
    const Eigen::VectorXd t = x * v;
    const Eigen::VectorXd zv = a_inv * v;
    const Eigen::VectorXd s = x * zv;
    const double vv = v.squaredNorm();
    eq = eq.array() - 2.0 * t.array() * s.array() / beta + t.array().square() * (vv / (beta * beta));
    dq = dq.array() - t.array().square() / beta;
    a_inv -= (v * v.transpose()) / beta;
    logdet += std::log(beta);
  }

  state.active_columns.resize(p);
  for (std::size_t k = 0; k < p; ++k) state.active_columns[k] = k;
  const Eigen::MatrixXd m = gram_of(x, state.selected, P) / static_cast<double>(n);
  state.criterion_value = criterion_of_information(criterion, m);
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() == Eigen::Success) state.inverse_cache = llt.solve(Eigen::MatrixXd::Identity(P, P));
  bool ok = false;
  const double ld = log_det_chol(m * static_cast<double>(n), ok);
  state.logdet_history.push_back(ok ? ld : -kSingular);
  return state;
}

DesignState fedorov_exchange(const DesignState& design, const Eigen::MatrixXd& candidates, const Eigen::VectorXd* weights,
                             double tol, std::size_t max_iter) {
  if (design.criterion != Criterion::D) throw std::invalid_argument("Fedorov exchange is defined for the D criterion");
  const Eigen::MatrixXd x = weighted(candidates, weights);
  const auto nc = static_cast<std::size_t>(x.rows());
  const Eigen::Index P = x.cols();
  const std::size_t n = design.selected.size();
  DesignState state = design;
  if (state.logdet_history.empty()) state.logdet_history.push_back(-kSingular);

  auto factor = [&](Eigen::MatrixXd& a_inv, double& logdet) {
    const Eigen::MatrixXd a = gram_of(x, state.selected, P);
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    bool ok = false;
    logdet = log_det_chol(a, ok);
    if (!ok) throw SingularUpdateError("Fedorov exchange needs a nonsingular starting design");
    a_inv = llt.solve(Eigen::MatrixXd::Identity(P, P));
  };
  Eigen::MatrixXd a_inv;
  double logdet = 0.0;
  factor(a_inv, logdet);
  state.logdet_history.back() = logdet;

  std::vector<char> in(nc, 0);
  for (std::size_t i : state.selected) in[i] = 1;
  std::vector<std::size_t> outside;

  for (std::size_t iter = 0; iter < max_iter && std::isfinite(tol); ++iter) {
    outside.clear();
    for (std::size_t j = 0; j < nc; ++j)
      if (!in[j]) outside.push_back(j);
    if (outside.empty()) break;

    const Eigen::MatrixXd y = x * a_inv;  // row i: (A^{-1} x_i)^T
    const Eigen::VectorXd dq = (y.array() * x.array()).rowwise().sum();
    Eigen::MatrixXd yi(static_cast<Eigen::Index>(n), P), xo(static_cast<Eigen::Index>(outside.size()), P);
    for (std::size_t r = 0; r < n; ++r) yi.row(static_cast<Eigen::Index>(r)) = y.row(static_cast<Eigen::Index>(state.selected[r]));
    for (std::size_t r = 0; r < outside.size(); ++r) xo.row(static_cast<Eigen::Index>(r)) = x.row(static_cast<Eigen::Index>(outside[r]));
    const Eigen::MatrixXd dij = yi * xo.transpose();

    double best = -kSingular;
    std::size_t best_pos = 0, best_out = 0;
    for (std::size_t r = 0; r < n; ++r) {
      const double di = dq(static_cast<Eigen::Index>(state.selected[r]));
      for (std::size_t o = 0; o < outside.size(); ++o) {
        const double dj = dq(static_cast<Eigen::Index>(outside[o]));
        const double cross = dij(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(o));
        const double delta = dj - (di * dj - cross * cross) - di;
        if (delta > best) {
          best = delta;
          best_pos = r;
          best_out = outside[o];
        }
      }
    }
    if (!(best >= tol)) break;
    in[state.selected[best_pos]] = 0;
    in[best_out] = 1;
    state.selected[best_pos] = best_out;
    ++state.exchanges;
    factor(a_inv, logdet);
    state.logdet_history.push_back(logdet);
  }

  const Eigen::MatrixXd m = gram_of(x, state.selected, P) / static_cast<double>(n);
  state.criterion_value = criterion_of_information(Criterion::D, m);
  state.inverse_cache = a_inv * static_cast<double>(n);
  return state;
}

std::size_t default_candidate_count(std::size_t p) {
  const double pp = static_cast<double>(p);
  const auto nc = static_cast<std::size_t>(std::floor(1.5 * pp * std::log(std::max(pp, 1.0))));
  return std::max(nc, p);
}

DesignResult design_from_candidates(const BasisSpec& spec, SampleSet candidates, std::size_t n, Criterion criterion,
                                    const GreedyOptions& options) {
  const Eigen::MatrixXd psi = spec.eval_matrix(candidates.points);
  DesignResult out;
  out.state = greedy_design(psi, &candidates.weights, n, criterion, options);
  out.samples.points.resize(static_cast<Eigen::Index>(n), candidates.points.cols());
  out.samples.weights.resize(static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r) {
    const auto src = static_cast<Eigen::Index>(out.state.selected[r]);
    out.samples.points.row(static_cast<Eigen::Index>(r)) = candidates.points.row(src);
    out.samples.weights(static_cast<Eigen::Index>(r)) = candidates.weights(src);
  }
  out.samples.strategy = candidates.strategy;
  out.samples.seed = candidates.seed;
  out.samples.metadata = candidates.metadata;
  out.samples.metadata["criterion"] = std::string(to_string(criterion));
  out.samples.metadata["candidates"] = std::to_string(candidates.size());
  out.candidates = std::move(candidates);
  return out;
}

DesignResult hybrid_design(const BasisSpec& spec, std::size_t n, std::size_t n_candidates, Criterion criterion,
                           std::uint64_t seed, const McmcOptions& mcmc) {
  if (n_candidates < n) throw std::invalid_argument("candidate count must be at least the design size");
  return design_from_candidates(spec, sample_coherence_optimal(spec, n_candidates, seed, mcmc), n, criterion);
}

void write_design_csv(std::ostream& os, const DesignResult& design) {
  const SampleSet& s = design.samples;
  os << "# strategy=" << to_string(s.strategy) << "; seed=" << s.seed;
  for (const auto& [key, value] : s.metadata) {
    std::string v = value;
    std::replace(v.begin(), v.end(), ';', ',');
    std::replace(v.begin(), v.end(), '\n', ' ');
    os << "; " << key << "=" << v;
  }
  os << "; criterion_value=" << std::setprecision(17) << design.state.criterion_value << "\n";
  for (int k = 0; k < s.dimension(); ++k) os << "xi_" << (k + 1) << ",";
  os << "w,candidate_index\n";
  for (Eigen::Index i = 0; i < s.points.rows(); ++i) {
    for (int k = 0; k < s.dimension(); ++k) os << s.points(i, k) << ",";
    os << s.weights(i) << "," << design.state.selected[static_cast<std::size_t>(i)] << "\n";
  }
}

}  // namespace pce
