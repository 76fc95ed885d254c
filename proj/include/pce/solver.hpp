#pragma once

#include <cstddef>
#include <iosfwd>

#include <Eigen/Dense>

namespace pce {

struct StabilityReport {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double condition = 0.0;      // lambda_max / lambda_min (infinite when lambda_min <= 0)
  double dist_identity = 0.0;  // spectral norm of M - I
};

struct FitResult {
  Eigen::VectorXd coefficients;
  double residual_norm = 0.0;  // ||W u - W Psi c||_2
  StabilityReport stability;
  std::size_t n_samples = 0;
  Eigen::Index rank = 0;
};

/// M = (W Psi)^T (W Psi) / N. `weights` may be null for unit weights.
Eigen::MatrixXd info_matrix(const Eigen::MatrixXd& psi, const Eigen::VectorXd* weights = nullptr);

StabilityReport stability_report(const Eigen::MatrixXd& m);

/// Weighted least squares by column-pivoted QR of W Psi. Throws RankDeficiencyError when the
/// numerical rank (pivots above 1e-10 times the largest) is below P.
FitResult fit(const Eigen::MatrixXd& psi, const Eigen::VectorXd* weights, const Eigen::VectorXd& u);

/// ||u_v - Psi_v c|| / ||u_v||; UndefinedError when u_v is zero.
double validation_error(const Eigen::VectorXd& coefficients, const Eigen::MatrixXd& psi_v, const Eigen::VectorXd& u_v);

struct Moments {
  double mean;
  double variance;
};

/// Mean and variance of an orthonormal expansion whose first term is the constant.
Moments pce_moments(const Eigen::VectorXd& coefficients);

/// One coefficient per line (index,value) after a `#` summary line.
void write_csv(std::ostream& os, const FitResult& fit);

}  // namespace pce
