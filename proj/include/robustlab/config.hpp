#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "robustlab/erm.hpp"
#include "robustlab/perturbations.hpp"

namespace robustlab {

/**
 * Experiment configuration, read from an INI file:
 *
 *   [model]         mu, sigma, response (square | square_plus_noise | cube)
 *   [perturbation]  kind (tail | identity), p, beta, same_stream
 *   [kernel]        kind, gamma, degree, offset, c, alpha
 *   [loss]          kind, nu, logloss_form (as_printed | margin)
 *   [solver]        lambda, lambda_grid, feasible (box | ball | unconstrained),
 *                   box_lower, box_upper, radius, tol, nonsmooth_tol, max_iter
 *   [experiment]    n, m, seed, probes, m_prefixes, betas, xtilde_grid,
 *                   outlier_response, probe_x0, fd_t, upsilon_t_grid, data,
 *                   out_dir, plots
 *
 * Lists are comma separated. Unknown sections or keys are rejected.
 */
struct ExperimentConfig {
  BaseModel model;
  TailPerturbation perturbation;
  bool same_stream = false;  // draw P and Q samples from one stream

  KernelSpec kernel = KernelSpec::polynomial(1.0, 2, 0.0);
  LossSpec loss;
  double lambda = 0.1;
  std::vector<double> lambda_grid{0.01, 0.1, 1.0};
  FeasibleSet feasible = FeasibleSet::box(-10.0, 10.0);
  SolverOptions solver;

  int n = 100;
  int m = 500;
  std::uint64_t seed = 0;
  std::vector<double> probes{-1.9, -1.0, -0.5, 0.5, 1.5};
  std::vector<int> m_prefixes{50, 100, 200, 300, 400, 500};
  std::vector<double> betas{0.25, 0.5, 1.0, 2.0};

  std::vector<double> xtilde_grid{2.0, 2.25, 2.5, 2.75, 3.0};
  Response outlier_response = Response::cube;
  double probe_x0 = 0.5;
  double fd_t = 1e-4;
  std::vector<double> upsilon_t_grid{0.0, 0.025, 0.05, 0.075, 0.1};

  std::filesystem::path data;  // optional dataset for `fit`
  std::filesystem::path out_dir = "out";
  bool plots = true;

  void validate() const;
};

ExperimentConfig parse_config(std::istream& in);
/// Relative `data` paths resolve against the config file's directory.
ExperimentConfig load_config(const std::filesystem::path& path);

/// Full echo of every field, for manifests.
nlohmann::json to_json(const ExperimentConfig& config);

}  // namespace robustlab
