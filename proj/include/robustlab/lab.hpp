#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "robustlab/config.hpp"
#include "robustlab/influence.hpp"
#include "robustlab/metrics.hpp"

namespace robustlab {

struct RatioRow {
  double probe = 0.0;
  int m_prefix = 0;
  double delta1 = 0.0;
  double delta2 = 0.0;
  double ratio = 0.0;
};

/**
 * Clean versus perturbed replications. Replication m draws N samples from P
 * and N from Q on seeds derived from (seed, m), solves both problems and
 * records f(x) at every probe.
 */
struct AllDataResult {
  std::vector<double> probes;
  /// f_P[k][m], f_Q[k][m]: estimator value at probe k in replication m.
  /// Aborted replications hold NaN.
  std::vector<std::vector<double>> f_p;
  std::vector<std::vector<double>> f_q;
  std::vector<int> aborted;       // replication indices, ascending
  std::vector<double> delta1;     // per probe, over all completed replications
  double delta2 = 0.0;
  std::vector<RatioRow> ratios;   // per probe, per M prefix

  int replications() const { return f_p.empty() ? 0 : static_cast<int>(f_p.front().size()); }
  /// Laws over the first `prefix` replications, aborted ones skipped.
  EmpiricalMeasure law_p(std::size_t probe, int prefix) const;
  EmpiricalMeasure law_q(std::size_t probe, int prefix) const;
};

/// Fails with Error when more than 1% of replications abort.
AllDataResult run_all_data(const ExperimentConfig& config);

/// Delta1 / Delta2 on growing prefixes of one replication stream. Prefixes
/// larger than the result's replication count are dropped.
std::vector<RatioRow> ratio_path(const AllDataResult& result, const std::vector<int>& m_prefixes);
std::vector<RatioRow> convergence_study(const ExperimentConfig& config, const std::vector<int>& m_prefixes);

struct BetaBandRow {
  double probe = 0.0;
  std::vector<double> ratios;  // one per beta
  double band = 0.0;           // max / min
};

/// Re-runs the all-data experiment for each perturbation magnitude.
std::vector<BetaBandRow> beta_band(const ExperimentConfig& config, const std::vector<double>& betas);

struct SingleDataRow {
  double x_tilde = 0.0;
  double y_tilde = 0.0;
  double lambda = 0.0;
  double if_norm = 0.0;
  double if_at_probe = 0.0;
  double upsilon = 0.0;
  double fd_error = 0.0;  // relative |IF - q(fd_t)|_k / |IF|_k
  std::string error;      // non-empty when the influence function is unavailable
};

struct SingleDataResult {
  double probe = 0.0;
  std::vector<SingleDataRow> rows;  // x_tilde major, lambda minor
};

/// Influence sweep over xtilde_grid x lambda_grid on one clean sample.
SingleDataResult run_single_data(const ExperimentConfig& config);
/// Same sweep restricted to one outlier input.
SingleDataResult run_influence(const ExperimentConfig& config, double x_tilde);

/// Clean training sample: the configured data file, else N draws from the
/// base model.
Dataset training_data(const ExperimentConfig& config);

/// Writers. Values use shortest round-trip formatting so files are
/// byte-stable for a given result.
void write_laws_csv(const std::filesystem::path& dir, const AllDataResult& result);
void write_ratios_csv(const std::filesystem::path& path, const std::vector<RatioRow>& rows);
void write_influence_csv(const std::filesystem::path& path, const SingleDataResult& result);
std::string probe_label(double probe);

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  bool steps = false;
};

/// Minimal SVG line/step chart.
void write_svg_plot(const std::filesystem::path& path, const std::string& title, const std::string& x_label,
                    const std::string& y_label, const std::vector<Series>& series);

}  // namespace robustlab
