#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pce/orthopoly.hpp"
#include "pce/sampling.hpp"

namespace pce {

/// Alphabetic criteria on the information matrix M; smaller is better for all of them.
///   D: |M^{-1}|^{1/P}   A: tr(M^{-1})   E: lambda_max(M^{-1})   K: cond(M)
/// I-optimality coincides with A for an orthonormal basis, so "I" parses to A.
enum class Criterion { D, A, E, K };

std::string_view to_string(Criterion c);
Criterion parse_criterion(std::string_view name);

inline constexpr double kSingular = std::numeric_limits<double>::infinity();

/// Criterion of M = (W Psi)^T (W Psi) / N; +infinity when M is singular.
double criterion_value(Criterion c, const Eigen::MatrixXd& psi, const Eigen::VectorXd* weights = nullptr);
/// Criterion of an explicit symmetric information matrix.
double criterion_of_information(Criterion c, const Eigen::MatrixXd& m);

struct DesignState {
  std::vector<std::size_t> selected;        // rows of the candidate matrix, in selection order
  std::vector<std::size_t> active_columns;  // leading columns in use: min(|selected|, P)
  Criterion criterion = Criterion::D;
  double criterion_value = kSingular;
  Eigen::MatrixXd inverse_cache;            // M^{-1} of the current design (empty while |selected| < P)
  std::size_t exchanges = 0;
  std::vector<double> logdet_history;       // log|Psi_I^T Psi_I| after construction and each exchange
};

struct GreedyOptions {
  // false evaluates every candidate from scratch; used to cross-check the update formulas
  bool use_updates = true;
};

/**
 * Sequential greedy construction: rows are added one at a time, each time the candidate
 * giving the smallest criterion of the augmented design. While fewer than P rows are
 * selected only the first n columns take part, so the design is square.
 * `weights` (optional) scales candidate rows before any evaluation.
 */
DesignState greedy_design(const Eigen::MatrixXd& candidates, const Eigen::VectorXd* weights, std::size_t n,
                          Criterion criterion, const GreedyOptions& options = {});

/// D-optimal exchange: swaps the (in, out) pair with the largest Fedorov delta until the
/// largest delta falls below `tol` or `max_iter` swaps were made.
DesignState fedorov_exchange(const DesignState& design, const Eigen::MatrixXd& candidates, const Eigen::VectorXd* weights,
                             double tol = 1e-6, std::size_t max_iter = 100);

/// Fedorov delta for removing x_i and adding x_j given A^{-1}; |A'| / |A| = 1 + delta.
double fedorov_delta(const Eigen::MatrixXd& a_inv, const Eigen::VectorXd& xi, const Eigen::VectorXd& xj);

/// |A + sign a a^T| / |A| = 1 + sign a^T A^{-1} a, with sign = +1 (add) or -1 (remove).
double det_update_ratio(const Eigen::MatrixXd& a_inv, const Eigen::VectorXd& a, int sign);

struct TraceUpdate {
  double trace;
  Eigen::MatrixXd inverse;
};

/// Sherman-Morrison inverse of A + sign a a^T and its trace. Throws SingularUpdateError
/// when |1 + sign a^T A^{-1} a| <= 1e-12.
TraceUpdate trace_update(const Eigen::MatrixXd& a_inv, const Eigen::VectorXd& a, int sign);

struct DesignResult {
  SampleSet samples;  // selected points with their candidate weights
  DesignState state;
  SampleSet candidates;
};

/// Default candidate-pool size floor(1.5 P ln P), at least P.
std::size_t default_candidate_count(std::size_t p);

/// Greedy design over an explicit weighted candidate set.
DesignResult design_from_candidates(const BasisSpec& spec, SampleSet candidates, std::size_t n, Criterion criterion,
                                    const GreedyOptions& options = {});

/// Coherence-optimal candidates followed by greedy alphabetic selection.
DesignResult hybrid_design(const BasisSpec& spec, std::size_t n, std::size_t n_candidates, Criterion criterion,
                           std::uint64_t seed, const McmcOptions& mcmc = {});

/// Sample CSV of the selected points with an extra candidate_index column.
void write_design_csv(std::ostream& os, const DesignResult& design);

}  // namespace pce
