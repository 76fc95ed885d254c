#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "pce/sampling.hpp"

namespace pce {

namespace {

double discrepancy_1d(const Eigen::MatrixXd& points) {
  std::vector<double> x(points.col(0).data(), points.col(0).data() + points.rows());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    d = std::max(d, static_cast<double>(i + 1) / n - x[i]);
    d = std::max(d, x[i] - static_cast<double>(i) / n);
  }
  return d;
}

// Every anchored box [0,a) x [0,b) with a, b drawn from the coordinates or 1; the
// supremum is approached either by the open box or by its closure.
double discrepancy_2d(const Eigen::MatrixXd& points) {
  const auto n = static_cast<std::size_t>(points.rows());
  std::vector<std::size_t> by_x(n);
  for (std::size_t i = 0; i < n; ++i) by_x[i] = i;
  std::sort(by_x.begin(), by_x.end(),
            [&](std::size_t l, std::size_t r) { return points(static_cast<Eigen::Index>(l), 0) < points(static_cast<Eigen::Index>(r), 0); });

  std::vector<double> grid_x(n), grid_y(n);
  for (std::size_t i = 0; i < n; ++i) {
    grid_x[i] = points(static_cast<Eigen::Index>(i), 0);
    grid_y[i] = points(static_cast<Eigen::Index>(i), 1);
  }
  grid_x.push_back(1.0);
  grid_y.push_back(1.0);
  std::sort(grid_x.begin(), grid_x.end());
  grid_x.erase(std::unique(grid_x.begin(), grid_x.end()), grid_x.end());
  std::sort(grid_y.begin(), grid_y.end());
  grid_y.erase(std::unique(grid_y.begin(), grid_y.end()), grid_y.end());

  const double inv_n = 1.0 / static_cast<double>(n);
  double d = 0.0;
  std::vector<double> open_y, closed_y;
  std::size_t lo = 0;  // points with x < a are by_x[0 .. lo)
  for (double a : grid_x) {
    while (lo < n && points(static_cast<Eigen::Index>(by_x[lo]), 0) < a) ++lo;
    std::size_t hi = lo;
    while (hi < n && points(static_cast<Eigen::Index>(by_x[hi]), 0) <= a) ++hi;
    open_y.clear();
    closed_y.clear();
    for (std::size_t k = 0; k < hi; ++k) {
      const double y = points(static_cast<Eigen::Index>(by_x[k]), 1);
      closed_y.push_back(y);
      if (k < lo) open_y.push_back(y);
    }
    std::sort(open_y.begin(), open_y.end());
    std::sort(closed_y.begin(), closed_y.end());
    for (double b : grid_y) {
      const double vol = a * b;
      const auto open = std::lower_bound(open_y.begin(), open_y.end(), b) - open_y.begin();
      const auto closed = std::upper_bound(closed_y.begin(), closed_y.end(), b) - closed_y.begin();
      d = std::max(d, vol - static_cast<double>(open) * inv_n);
      d = std::max(d, static_cast<double>(closed) * inv_n - vol);
    }
  }
  return d;
}

double discrepancy_random(const Eigen::MatrixXd& points, std::uint64_t seed, std::size_t boxes) {
  const Eigen::Index n = points.rows();
  const Eigen::Index d = points.cols();
  Rng rng(seed);
  std::uniform_int_distribution<Eigen::Index> pick(0, n);  // n selects the upper face 1
  std::vector<double> corner(static_cast<std::size_t>(d));
  const double inv_n = 1.0 / static_cast<double>(n);
  double best = 0.0;
  for (std::size_t b = 0; b < boxes; ++b) {
    double vol = 1.0;
    for (Eigen::Index k = 0; k < d; ++k) {
      const Eigen::Index r = pick(rng);
      corner[static_cast<std::size_t>(k)] = r == n ? 1.0 : points(r, k);
      vol *= corner[static_cast<std::size_t>(k)];
    }
    Eigen::Index open = 0, closed = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      bool in_open = true, in_closed = true;
      for (Eigen::Index k = 0; k < d && in_closed; ++k) {
        const double x = points(i, k);
        const double c = corner[static_cast<std::size_t>(k)];
        if (x >= c) in_open = false;
        if (x > c) in_closed = false;
      }
      open += in_open;
      closed += in_closed;
    }
    best = std::max(best, vol - static_cast<double>(open) * inv_n);
    best = std::max(best, static_cast<double>(closed) * inv_n - vol);
  }
  return best;
}

}  // namespace

DiscrepancyReport compute_star_discrepancy(const Eigen::MatrixXd& points, std::uint64_t seed, std::size_t random_boxes) {
  if (points.rows() == 0 || points.cols() == 0) return {0.0, true};
  if ((points.array() < 0.0).any() || (points.array() >= 1.0).any())
    throw std::domain_error("star discrepancy needs coordinates in [0, 1)");
  DiscrepancyReport report;
  if (points.cols() == 1) {
    report = {discrepancy_1d(points), true};
  } else if (points.cols() == 2) {
    report = {discrepancy_2d(points), true};
  } else {
    report = {discrepancy_random(points, seed, random_boxes), false};
  }
  report.star_discrepancy = std::clamp(report.star_discrepancy, 0.0, 1.0);
  return report;
}

}  // namespace pce
