#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pce/models.hpp"
#include "pce/orthopoly.hpp"
#include "pce/sampling.hpp"

namespace pce::bench {

enum class Experiment { Recovery, Duffing, Battery };

std::string_view to_string(Experiment e);
Experiment parse_experiment(std::string_view name);

enum class CandidateRule { FourN, PLogP };

struct ExperimentConfig {
  Experiment experiment = Experiment::Recovery;
  std::string family = "legendre";  // recovery only: legendre | hermite
  int d = 15;
  int p = 2;
  std::vector<std::string> strategies;
  std::vector<double> n_over_p;  // used when n is empty
  std::vector<std::size_t> n;
  CandidateRule nc_rule = CandidateRule::FourN;
  std::size_t replications = 60;
  std::size_t n_validation = 10000;
  std::uint64_t seed = 1;
  double noise_rel = 0.03;
  std::vector<double> times;  // duffing output instants
  std::vector<double> tp;     // battery prediction instants
  double dt = 0.0;            // 0 selects the model default
  int mcmc_burn_in = 1000;
  int mcmc_thinning = 0;
  int quad_level = 0;         // 0: smallest level >= p+1 whose grid holds N points
  std::size_t fedorov_max_iter = 50;
  BatteryParams battery;
  bool pdf = false;
  std::size_t pdf_draws = 100000;
  std::size_t pdf_bins = 60;
  std::vector<int> p_sweep;
  std::size_t workers = 1;
  bool aggregate = true;
};

/// Defaults for an experiment before any config file is applied.
ExperimentConfig default_config(Experiment e);

/// Applies `key = value` lines (`#` comments, comma-separated lists). Throws ConfigError on
/// unknown keys, malformed values or an experiment key that disagrees with `cfg.experiment`.
void apply_config(ExperimentConfig& cfg, std::istream& in);
void apply_config_file(ExperimentConfig& cfg, const std::filesystem::path& path);
/// Checks invariants (R >= 1, positive grids, known strategy names).
void validate(const ExperimentConfig& cfg);

/// Canonical `key = value` echo of every setting that affects results.
std::vector<std::pair<std::string, std::string>> describe(const ExperimentConfig& cfg);

const std::vector<std::string>& known_strategies();

struct ResultRow {
  std::string strategy;
  int p = 0;
  std::size_t n = 0;
  std::size_t replicate = 0;
  double time = 0.0;  // duffing t or battery t_p; 0 for recovery
  double relative_error = 0.0;
  bool recovered = false;
  double delta_hat = 0.0;
  double condition = 0.0;
  std::string status = "ok";
  double wall_seconds = 0.0;
};

struct ResultTable {
  std::vector<ResultRow> rows;  // sorted by (strategy order, p, N, replicate, time)
  std::map<std::string, std::string> notes;

  std::size_t failures() const;
};

/// Seed of one training set: derive_seed(master, {fnv1a(experiment), fnv1a(strategy), p, N, replicate}).
std::uint64_t row_seed(const ExperimentConfig& cfg, const std::string& strategy, int p, std::size_t n,
                       std::size_t replicate);

std::size_t candidate_count(const ExperimentConfig& cfg, std::size_t basis_size, std::size_t n);

/// Training set of size n for a named strategy.
SampleSet generate_samples(const ExperimentConfig& cfg, const BasisSpec& spec, const std::string& strategy,
                           std::size_t n, std::uint64_t seed, std::size_t replicate);

BasisSpec experiment_basis(const ExperimentConfig& cfg, int p);

ResultTable run_recovery(const ExperimentConfig& cfg);
ResultTable run_duffing(const ExperimentConfig& cfg);
ResultTable run_battery(const ExperimentConfig& cfg);
ResultTable run(const ExperimentConfig& cfg);

struct PdfComparison {
  std::vector<double> surrogate;
  std::vector<double> direct;
  double ks_distance = 0.0;
  double t_p = 0.0;
  std::string strategy;
  std::size_t n = 0;
};

/// Fits one surrogate of R(t_p) (first replicate of `strategy`) and compares it with direct runs
/// on an independent set of `pdf_draws` standard-MC inputs.
PdfComparison battery_pdf(const ExperimentConfig& cfg, const std::string& strategy, double t_p);

/// Two-sample Kolmogorov-Smirnov statistic.
double ks_distance(std::vector<double> a, std::vector<double> b);

/// Writes <experiment>.csv (deterministic), <experiment>_timing.csv and, when requested,
/// <experiment>_aggregate.csv into `dir`.
void write_results(const std::filesystem::path& dir, const ExperimentConfig& cfg, const ResultTable& table);
void write_table(std::ostream& os, const ExperimentConfig& cfg, const ResultTable& table);
void write_aggregate(std::ostream& os, const ResultTable& table);
void write_pdf(std::ostream& os, const PdfComparison& pdf, std::size_t bins);

inline constexpr std::string_view kVersion = "pce-bench 1.0.0";

}  // namespace pce::bench
