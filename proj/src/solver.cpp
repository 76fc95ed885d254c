#include "pce/solver.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "pce/errors.hpp"

namespace pce {

namespace {

constexpr double kRankThreshold = 1e-10;

void check_weights(const Eigen::MatrixXd& psi, const Eigen::VectorXd* weights) {
  if (weights && weights->size() != psi.rows()) throw std::invalid_argument("weight vector length does not match rows");
}

}  // namespace

Eigen::MatrixXd info_matrix(const Eigen::MatrixXd& psi, const Eigen::VectorXd* weights) {
  check_weights(psi, weights);
  if (psi.rows() == 0) throw std::invalid_argument("information matrix needs at least one row");
  const double n = static_cast<double>(psi.rows());
  if (!weights) return psi.transpose() * psi / n;
  const Eigen::MatrixXd wpsi = weights->asDiagonal() * psi;
  return wpsi.transpose() * wpsi / n;
}

StabilityReport stability_report(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() == 0) throw std::invalid_argument("stability report needs a square matrix");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("symmetric eigensolve failed");
  StabilityReport r;
  r.lambda_min = es.eigenvalues()(0);
  r.lambda_max = es.eigenvalues()(m.rows() - 1);
  r.condition = r.lambda_min > 0.0 ? r.lambda_max / r.lambda_min : std::numeric_limits<double>::infinity();
  r.dist_identity = std::max(std::abs(r.lambda_max - 1.0), std::abs(1.0 - r.lambda_min));
  return r;
}

FitResult fit(const Eigen::MatrixXd& psi, const Eigen::VectorXd* weights, const Eigen::VectorXd& u) {
  check_weights(psi, weights);
  if (u.size() != psi.rows()) throw std::invalid_argument("response length does not match rows");
  if (psi.rows() < psi.cols()) throw RankDeficiencyError(psi.rows(), psi.cols());
  if (weights && (weights->array() <= 0.0).any()) throw std::invalid_argument("weights must be positive");

  Eigen::MatrixXd wpsi = psi;
  Eigen::VectorXd wu = u;
  if (weights) {
    wpsi = weights->asDiagonal() * psi;
    wu = weights->asDiagonal() * u;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(wpsi);
  qr.setThreshold(kRankThreshold);
  if (qr.rank() < psi.cols()) throw RankDeficiencyError(qr.rank(), psi.cols());

  FitResult out;
  out.coefficients = qr.solve(wu);
  if (!out.coefficients.allFinite()) throw NumericalError("least-squares solution is not finite");
  out.residual_norm = (wu - wpsi * out.coefficients).norm();
  out.n_samples = static_cast<std::size_t>(psi.rows());
  out.rank = qr.rank();
  out.stability = stability_report(wpsi.transpose() * wpsi / static_cast<double>(psi.rows()));
  return out;
}

double validation_error(const Eigen::VectorXd& coefficients, const Eigen::MatrixXd& psi_v, const Eigen::VectorXd& u_v) {
  if (psi_v.cols() != coefficients.size()) throw std::invalid_argument("validation matrix has wrong column count");
  if (psi_v.rows() != u_v.size()) throw std::invalid_argument("validation response length does not match rows");
  const double denom = u_v.norm();
  if (denom == 0.0) throw UndefinedError("relative error against a zero validation response");
  return (u_v - psi_v * coefficients).norm() / denom;
}

Moments pce_moments(const Eigen::VectorXd& coefficients) {
  if (coefficients.size() == 0) throw std::invalid_argument("empty coefficient vector");
  return {coefficients(0), coefficients.tail(coefficients.size() - 1).squaredNorm()};
}

void write_csv(std::ostream& os, const FitResult& fit) {
  const auto& s = fit.stability;
  os << std::setprecision(17) << "# residual=" << fit.residual_norm << "; lambda_min=" << s.lambda_min
     << "; lambda_max=" << s.lambda_max << "; condition=" << s.condition << "; dist_identity=" << s.dist_identity
     << "; n_samples=" << fit.n_samples << "\n";
  os << "index,coefficient\n";
  for (Eigen::Index j = 0; j < fit.coefficients.size(); ++j) os << j << "," << fit.coefficients(j) << "\n";
}

}  // namespace pce
