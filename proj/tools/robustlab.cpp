// robustlab command-line driver.

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <omp.h>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "robustlab/errors.hpp"
#include "robustlab/lab.hpp"
#include "robustlab/random.hpp"

#ifndef ROBUSTLAB_VERSION
#define ROBUSTLAB_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace robustlab;

namespace {

struct Common {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  int threads = 0;
};

void add_common(CLI::App* cmd, Common& common) {
  cmd->add_option("--seed", common.seed, "Override the configured seed");
  cmd->add_option("--out-dir", common.out_dir, "Output directory");
  cmd->add_option("--threads", common.threads, "Worker threads (0 = OpenMP default)")->check(CLI::NonNegativeNumber);
}

ExperimentConfig configure(const std::string& path, const Common& common) {
  ExperimentConfig cfg = load_config(path);
  if (common.seed) cfg.seed = *common.seed;
  if (common.out_dir) cfg.out_dir = *common.out_dir;
  return cfg;
}

json versions() {
  return {{"robustlab", ROBUSTLAB_VERSION},
          {"eigen", fmt::format("{}.{}.{}", EIGEN_WORLD_VERSION, EIGEN_MAJOR_VERSION, EIGEN_MINOR_VERSION)},
          {"fmt", FMT_VERSION},
          {"compiler", __VERSION__}};
}

class Manifest {
 public:
  Manifest(std::string command, fs::path dir) : dir_(std::move(dir)), start_(std::chrono::steady_clock::now()) {
    doc_["command"] = std::move(command);
    doc_["versions"] = versions();
    doc_["threads"] = omp_get_max_threads();
    doc_["outputs"] = json::array();
  }

  json& operator[](const char* key) { return doc_[key]; }
  void output(const fs::path& file) { doc_["outputs"].push_back(file.filename().string()); }

  void write() {
    const std::chrono::duration<double> wall = std::chrono::steady_clock::now() - start_;
    doc_["wall_time_seconds"] = wall.count();
    fs::create_directories(dir_);
    std::ofstream out(dir_ / "manifest.json", std::ios::binary);
    out << doc_.dump(2) << "\n";
  }

 private:
  fs::path dir_;
  std::chrono::steady_clock::time_point start_;
  json doc_;
};

void start_manifest(Manifest& manifest, const ExperimentConfig& cfg) {
  manifest["config"] = to_json(cfg);
  manifest["seed"] = cfg.seed;
}

int cmd_fit(const std::string& config_path, const Common& common) {
  const ExperimentConfig cfg = configure(config_path, common);
  Manifest manifest("fit", cfg.out_dir);
  start_manifest(manifest, cfg);

  const Dataset data = training_data(cfg);
  const ErmProblem problem(data, cfg.kernel, cfg.loss, cfg.lambda, cfg.feasible);
  const ErmSolution sol = solve_erm(problem, derive_seed(cfg.seed, 1), cfg.solver);

  fs::create_directories(cfg.out_dir);
  write_dataset_csv(cfg.out_dir / "data.csv", data);
  manifest.output("data.csv");
  {
    std::ofstream out(cfg.out_dir / "coefficients.csv", std::ios::binary);
    for (Eigen::Index j = 0; j < data.dim(); ++j) out << "x_" << j + 1 << ",";
    out << "coefficient\n";
    for (Eigen::Index i = 0; i < data.size(); ++i) {
      for (Eigen::Index j = 0; j < data.dim(); ++j) out << fmt::format("{},", data.x(i, j));
      out << fmt::format("{}\n", sol.f.coeffs()[i]);
    }
    manifest.output("coefficients.csv");
  }
  if (data.dim() == 1) {
    std::ofstream out(cfg.out_dir / "probes.csv", std::ios::binary);
    out << "probe,value\n";
    for (double x : cfg.probes) out << fmt::format("{},{}\n", x, rkhs_eval(sol.f, Point::Constant(1, x)));
    manifest.output("probes.csv");
  }
  manifest["solution"] = {{"objective", sol.objective},
                          {"residual", sol.residual},
                          {"iterations", sol.iterations},
                          {"rkhs_norm", rkhs_norm(sol.f)},
                          {"method", std::string(to_string(sol.method))}};
  manifest.write();
  std::cout << fmt::format("objective {} residual {} iterations {}\n", sol.objective, sol.residual, sol.iterations);
  return 0;
}

int cmd_metric(const std::string& file_a, const std::string& file_b, double p, const Common& common) {
  const fs::path dir = common.out_dir.value_or("out");
  Manifest manifest("metric", dir);
  manifest["inputs"] = {file_a, file_b};
  manifest["p"] = p;
  if (common.seed) manifest["seed"] = *common.seed;

  const EmpiricalMeasure a = empirical_measure(read_dataset_csv(fs::path(file_a)));
  const EmpiricalMeasure b = empirical_measure(read_dataset_csv(fs::path(file_b)));
  const MetricResult kant = kantorovich_ot(a, b);
  const FmBounds fm = fm_bounds(a, b, p);

  fs::create_directories(dir);
  {
    std::ofstream out(dir / "metric.csv", std::ios::binary);
    out << "metric,value\n";
    out << fmt::format("kantorovich,{}\n", kant.value);
    out << fmt::format("fm_lower,{}\n", fm.lower.value);
    out << fmt::format("fm_upper,{}\n", fm.upper.value);
    manifest.output("metric.csv");
  }
  write_plan_csv(dir / "plan.csv", *fm.upper.certificate);
  manifest.output("plan.csv");
  manifest["values"] = {{"kantorovich", kant.value}, {"fm_lower", fm.lower.value}, {"fm_upper", fm.upper.value}};
  manifest.write();
  std::cout << fmt::format("kantorovich {}\nfm_lower {}\nfm_upper {}\n", kant.value, fm.lower.value, fm.upper.value);
  return 0;
}

int cmd_all_data(const std::string& config_path, const Common& common, bool band) {
  const ExperimentConfig cfg = configure(config_path, common);
  Manifest manifest("all-data", cfg.out_dir);
  start_manifest(manifest, cfg);

  const AllDataResult result = run_all_data(cfg);
  write_laws_csv(cfg.out_dir, result);
  for (double x : result.probes) manifest.output("laws_" + probe_label(x) + ".csv");
  write_ratios_csv(cfg.out_dir / "ratios.csv", result.ratios);
  manifest.output("ratios.csv");
  manifest["aborted_replications"] = result.aborted;
  manifest["delta2"] = result.delta2;

  if (band) {
    const auto rows = beta_band(cfg, cfg.betas);
    std::ofstream out(cfg.out_dir / "band.csv", std::ios::binary);
    out << "probe,beta,ratio\n";
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < cfg.betas.size(); ++i) out << fmt::format("{},{},{}\n", row.probe, cfg.betas[i], row.ratios[i]);
    }
    manifest.output("band.csv");
  }

  if (cfg.plots) {
    std::vector<Series> paths;
    for (std::size_t k = 0; k < result.probes.size(); ++k) {
      Series s{"x = " + probe_label(result.probes[k]), {}, {}};
      for (const auto& r : result.ratios) {
        if (r.probe != result.probes[k]) continue;
        s.x.push_back(r.m_prefix);
        s.y.push_back(r.ratio);
      }
      paths.push_back(std::move(s));
    }
    write_svg_plot(cfg.out_dir / "ratios.svg", "Delta1 / Delta2 by replication count", "M", "ratio", paths);
    manifest.output("ratios.svg");
    for (std::size_t k = 0; k < result.probes.size(); ++k) {
      std::vector<Series> laws;
      for (const auto& [name, law] : {std::pair{"P", result.law_p(k, result.replications())},
                                      std::pair{"Q", result.law_q(k, result.replications())}}) {
        Series s{name, {}, {}, true};
        double acc = 0.0;
        for (Eigen::Index i = 0; i < law.size(); ++i) {
          acc += law.weights()[i];
          s.x.push_back(law.atoms()(i, 0));
          s.y.push_back(acc);
        }
        laws.push_back(std::move(s));
      }
      const std::string file = "laws_" + probe_label(result.probes[k]) + ".svg";
      write_svg_plot(cfg.out_dir / file, "CDF of f(x) at x = " + probe_label(result.probes[k]), "f(x)", "CDF", laws);
      manifest.output(file);
    }
  }
  manifest.write();
  for (std::size_t k = 0; k < result.probes.size(); ++k) {
    std::cout << fmt::format("probe {}: delta1 {} delta2 {}\n", result.probes[k], result.delta1[k], result.delta2);
  }
  return 0;
}

int write_sweep(const char* command, const ExperimentConfig& cfg, const SingleDataResult& result) {
  Manifest manifest(command, cfg.out_dir);
  start_manifest(manifest, cfg);
  write_influence_csv(cfg.out_dir / "influence.csv", result);
  manifest.output("influence.csv");
  {
    std::ofstream out(cfg.out_dir / "fd_check.csv", std::ios::binary);
    out << "x_tilde,lambda,t,fd_error\n";
    for (const auto& r : result.rows) out << fmt::format("{},{},{},{}\n", r.x_tilde, r.lambda, cfg.fd_t, r.fd_error);
    manifest.output("fd_check.csv");
  }
  json errors = json::array();
  for (const auto& r : result.rows) {
    if (!r.error.empty()) errors.push_back({{"x_tilde", r.x_tilde}, {"lambda", r.lambda}, {"error", r.error}});
  }
  manifest["grid_errors"] = errors;
  if (cfg.plots && result.rows.size() > cfg.lambda_grid.size()) {
    std::vector<Series> series;
    for (double lambda : cfg.lambda_grid) {
      Series s{"lambda = " + fmt::format("{}", lambda), {}, {}};
      for (const auto& r : result.rows) {
        if (r.lambda != lambda) continue;
        s.x.push_back(r.x_tilde);
        s.y.push_back(r.if_at_probe);
      }
      series.push_back(std::move(s));
    }
    write_svg_plot(cfg.out_dir / "influence.svg", "Influence function at x0 = " + fmt::format("{}", result.probe),
                   "x_tilde", "IF(x0)", series);
    manifest.output("influence.svg");
  }
  manifest.write();
  for (const auto& r : result.rows) {
    std::cout << fmt::format("x_tilde {} lambda {}: |IF| {} IF(x0) {} upsilon {}{}\n", r.x_tilde, r.lambda, r.if_norm,
                             r.if_at_probe, r.upsilon, r.error.empty() ? "" : " (" + r.error + ")");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Statistical robustness experiments for kernel learning estimators"};
  app.require_subcommand(1);

  Common common;
  std::string config_path, file_a, file_b;
  double p = 1.0;
  double x_tilde = 0.0;
  bool band = false;

  CLI::App* fit = app.add_subcommand("fit", "Solve the regularized ERM problem on the configured data");
  fit->add_option("config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  add_common(fit, common);

  CLI::App* metric = app.add_subcommand("metric", "Kantorovich and Fortet-Mourier distances between two datasets");
  metric->add_option("fileA", file_a)->required()->check(CLI::ExistingFile);
  metric->add_option("fileB", file_b)->required()->check(CLI::ExistingFile);
  metric->add_option("--p", p, "Fortet-Mourier order")->check(CLI::Range(1.0, 1e6));
  add_common(metric, common);

  CLI::App* all_data = app.add_subcommand("all-data", "Clean versus tail-perturbed law comparison");
  all_data->add_option("config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  all_data->add_flag("--band", band, "Also sweep the configured betas and write band.csv");
  add_common(all_data, common);

  CLI::App* single = app.add_subcommand("single-data", "Influence-function sweep over outliers and lambdas");
  single->add_option("config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  add_common(single, common);

  CLI::App* influence = app.add_subcommand("influence", "Influence function for one outlier input");
  influence->add_option("config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  influence->add_option("--xtilde", x_tilde, "Outlier input")->required();
  add_common(influence, common);

  CLI11_PARSE(app, argc, argv);

  if (common.threads > 0) omp_set_num_threads(common.threads);
  try {
    if (*fit) return cmd_fit(config_path, common);
    if (*metric) return cmd_metric(file_a, file_b, p, common);
    if (*all_data) return cmd_all_data(config_path, common, band);
    if (*single) {
      const ExperimentConfig cfg = configure(config_path, common);
      return write_sweep("single-data", cfg, run_single_data(cfg));
    }
    if (*influence) {
      const ExperimentConfig cfg = configure(config_path, common);
      return write_sweep("influence", cfg, run_influence(cfg, x_tilde));
    }
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
