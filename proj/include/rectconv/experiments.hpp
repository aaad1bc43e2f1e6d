#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rectconv/ensemble.hpp"
#include "rectconv/quantiles.hpp"

namespace rectconv {

/// Pass thresholds, frozen at values calibrated on the Gaussian ensemble.
struct Thresholds {
  double c_rigid = 5.0;
  double ks_budget = 0.08;
  double c_deloc = 10.0;
  double c_avg = 10.0;
  double c_aniso = 10.0;
  double c_bbp = 5.0;
  double rank_frequency = 0.9;
  double tail_quantile = 0.95;
};

struct ExperimentConfig {
  Spectrum spec = zero_spectrum(1);
  ModelParams params;
  std::vector<NoiseKind> kinds{NoiseKind::gaussian};
  std::size_t trials = 100;
  std::uint64_t base_seed = 20240601;
  std::size_t k_max = 20;
  std::vector<ComplexPoint> z_grid;  // empty: default 12-point grid around the edge
  double vartheta = 0.1;
  double omega = 0.05;
  std::size_t ell = 10;
  double c_v = 0.0;  // <= 0: 0.5 * lambda_plus
  std::vector<double> spikes;  // planted atoms (bbp uses the first)
  Thresholds thresholds;
  SolverConfig solver;
  std::string save_trials_dir;  // non-empty: persist every trial there

  void validate() const;
};

struct TrialMetrics {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> seed_b;  // second ensemble in two-kind comparisons
  std::vector<std::pair<std::string, double>> values;
};

struct ExperimentReport {
  std::string name;
  std::vector<TrialMetrics> per_trial;
  std::map<std::string, double> summary;
  std::map<std::string, double> criteria;
  bool pass = false;
};

ExperimentReport rigidity_experiment(const ExperimentConfig& cfg);
ExperimentReport edge_universality_experiment(const ExperimentConfig& cfg);
ExperimentReport delocalization_experiment(const ExperimentConfig& cfg);
ExperimentReport local_law_experiment(const ExperimentConfig& cfg);
ExperimentReport bbp_experiment(const ExperimentConfig& cfg, double spike);
ExperimentReport t1_null_experiment(const ExperimentConfig& cfg);
ExperimentReport rank_sweep_experiment(const ExperimentConfig& cfg);

/// Names: rigidity, universality, delocalization, locallaw, bbp, t1-null, rank-sweep.
/// Throws std::invalid_argument for anything else.
ExperimentReport run_experiment(std::string_view name, const ExperimentConfig& cfg);
const std::vector<std::string>& experiment_names();

/// (mu_1 - mu_2) / (mu_2 - mu_3) for descending eigenvalues.
double t1_statistic(std::span<const double> eigenvalues);
double t1_statistic(const TrialRecord& trial);

struct RankEstimate {
  std::size_t rank = 0;
  bool flagged = false;  // no index in 1..ell qualified; rank = ell
};
/// Smallest i in 1..ell with mu_{i+1} / mu_{i+2} - 1 <= omega.
RankEstimate rank_estimator(std::span<const double> eigenvalues, double omega, std::size_t ell);
RankEstimate rank_estimator(const TrialRecord& trial, double omega, std::size_t ell);

/// Base spectrum with its smallest atoms replaced by the planted spikes.
Spectrum plant_spikes(const Spectrum& base, std::span<const double> spikes);

/// Default averaged/anisotropic local-law grid: four energies around
/// lambda_plus times three eta values from n^{-0.4} to 1.
std::vector<ComplexPoint> default_local_law_grid(const ModelParams& params, const EdgeData& edge);

/// Control parameter Psi(z) = sqrt(Im m / (n eta)) + 1 / (n eta).
double control_psi(const ModelParams& params, const ConvolutionPoint& cp);
/// varpi(z) of the Pi-norm bound.
double pi_scale(const ModelParams& params, const EdgeData& edge, ComplexPoint z);
/// Anisotropic error scale (t Psi + sqrt(t/n)) / varpi.
double aniso_error_scale(const ModelParams& params, const EdgeData& edge,
                         const ConvolutionPoint& cp);

}  // namespace rectconv
