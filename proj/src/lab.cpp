#include "robustlab/lab.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <fmt/format.h>

#include "robustlab/errors.hpp"
#include "robustlab/random.hpp"

namespace robustlab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");
  return out;
}

EmpiricalMeasure law_over_prefix(const std::vector<double>& values, int prefix) {
  std::vector<double> kept;
  const auto end = std::min<std::size_t>(values.size(), static_cast<std::size_t>(std::max(prefix, 0)));
  for (std::size_t i = 0; i < end; ++i) {
    if (!std::isnan(values[i])) kept.push_back(values[i]);
  }
  if (kept.empty()) throw Error("no completed replications in the first " + std::to_string(prefix));
  return law_of_estimator(kept);
}

double safe_ratio(double num, double den) {
  if (den > 0.0) return num / den;
  return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

SingleDataResult influence_sweep(const ExperimentConfig& config, const std::vector<double>& x_grid) {
  config.validate();
  const Dataset data = training_data(config);
  if (data.dim() != 1) throw InputError("influence sweeps need 1-D inputs");
  const BaseModel outlier_rule{0.0, 1.0, config.outlier_response};
  const std::size_t n_lambda = config.lambda_grid.size();

  SingleDataResult result;
  result.probe = config.probe_x0;
  result.rows.resize(x_grid.size() * n_lambda);
  std::vector<std::string> failures(result.rows.size());
  Point probe(1);
  probe << config.probe_x0;

#pragma omp parallel for schedule(dynamic)
  for (std::size_t idx = 0; idx < result.rows.size(); ++idx) {
    SingleDataRow& row = result.rows[idx];
    row.x_tilde = x_grid[idx / n_lambda];
    row.lambda = config.lambda_grid[idx % n_lambda];
    row.y_tilde = outlier_rule.respond(row.x_tilde, 0.0);
    row.if_norm = row.if_at_probe = row.fd_error = kNaN;
    try {
      const ErmProblem problem(data, config.kernel, config.loss, row.lambda, config.feasible);
      const ErmSolution clean = solve_erm(problem, derive_seed(config.seed, 1), config.solver);
      Point z(2);
      z << row.x_tilde, row.y_tilde;
      try {
        const InfluenceReport report = influence_function(problem, clean, z);
        row.if_norm = rkhs_norm(report.influence);
        row.if_at_probe = rkhs_eval(report.influence, probe);
        const auto fd = influence_fd(problem, z, {config.fd_t}, derive_seed(config.seed, 1), config.solver);
        const double gap = rkhs_distance(report.influence, fd.front().quotient);
        row.fd_error = row.if_norm > 0.0 ? gap / row.if_norm : gap;
      } catch (const CapabilityError& e) {
        row.error = e.what();
      } catch (const ConditioningError& e) {
        row.error = e.what();
      }
      row.upsilon = upsilon_bound(problem, {z}, config.upsilon_t_grid, config.solver).entries.front().upsilon;
    } catch (const std::exception& e) {
      failures[idx] = e.what();
    }
  }
  for (std::size_t idx = 0; idx < failures.size(); ++idx) {
    if (!failures[idx].empty()) {
      const auto& row = result.rows[idx];
      throw Error(fmt::format("influence sweep at x_tilde={}, lambda={}: {}", row.x_tilde, row.lambda, failures[idx]));
    }
  }
  return result;
}

}  // namespace

EmpiricalMeasure AllDataResult::law_p(std::size_t probe, int prefix) const {
  return law_over_prefix(f_p.at(probe), prefix);
}

EmpiricalMeasure AllDataResult::law_q(std::size_t probe, int prefix) const {
  return law_over_prefix(f_q.at(probe), prefix);
}

AllDataResult run_all_data(const ExperimentConfig& config) {
  config.validate();
  const int reps = config.m;
  const auto n_probes = config.probes.size();

  AllDataResult result;
  result.probes = config.probes;
  result.f_p.assign(n_probes, std::vector<double>(static_cast<std::size_t>(reps), kNaN));
  result.f_q = result.f_p;

  PointSet probe_points(static_cast<Eigen::Index>(n_probes), 1);
  for (std::size_t k = 0; k < n_probes; ++k) probe_points(static_cast<Eigen::Index>(k), 0) = config.probes[k];
  const TailPerturbation q_law = config.perturbation.identity ? TailPerturbation::none() : config.perturbation;

  std::vector<char> failed(static_cast<std::size_t>(reps), 0);
#pragma omp parallel for schedule(dynamic)
  for (int m = 0; m < reps; ++m) {
    try {
      const std::uint64_t rep = derive_seed(config.seed, static_cast<std::uint64_t>(m));
      const std::uint64_t p_seed = derive_seed(rep, 0);
      const std::uint64_t q_seed = config.same_stream ? p_seed : derive_seed(rep, 1);
      const std::uint64_t solver_seed = derive_seed(rep, 2);

      const ErmProblem clean(sample_base(config.model, config.n, p_seed), config.kernel, config.loss, config.lambda,
                             config.feasible);
      const ErmProblem perturbed = clean.with_data(sample_tail_perturbed(config.model, q_law, config.n, q_seed));
      const Eigen::VectorXd vp = rkhs_eval_many(solve_erm(clean, solver_seed, config.solver).f, probe_points);
      const Eigen::VectorXd vq = rkhs_eval_many(solve_erm(perturbed, solver_seed, config.solver).f, probe_points);
      for (std::size_t k = 0; k < n_probes; ++k) {
        result.f_p[k][static_cast<std::size_t>(m)] = vp[static_cast<Eigen::Index>(k)];
        result.f_q[k][static_cast<std::size_t>(m)] = vq[static_cast<Eigen::Index>(k)];
      }
    } catch (const std::exception&) {
      failed[static_cast<std::size_t>(m)] = 1;
      for (std::size_t k = 0; k < n_probes; ++k) {
        result.f_p[k][static_cast<std::size_t>(m)] = kNaN;
        result.f_q[k][static_cast<std::size_t>(m)] = kNaN;
      }
    }
  }
  for (int m = 0; m < reps; ++m) {
    if (failed[static_cast<std::size_t>(m)]) result.aborted.push_back(m);
  }
  if (static_cast<double>(result.aborted.size()) > 0.01 * reps) {
    throw Error(fmt::format("{} of {} replications aborted (first at index {})", result.aborted.size(), reps,
                            result.aborted.front()));
  }

  result.delta2 = config.perturbation.identity ? 0.0 : tail_kantorovich(config.model, config.perturbation);
  for (std::size_t k = 0; k < n_probes; ++k) {
    result.delta1.push_back(kantorovich_1d(result.law_p(k, reps), result.law_q(k, reps)));
  }
  result.ratios = ratio_path(result, config.m_prefixes);
  return result;
}

std::vector<RatioRow> ratio_path(const AllDataResult& result, const std::vector<int>& m_prefixes) {
  std::vector<int> prefixes;
  for (int p : m_prefixes) {
    if (p >= 1 && p <= result.replications()) prefixes.push_back(p);
  }
  if (prefixes.empty() || prefixes.back() != result.replications()) prefixes.push_back(result.replications());

  std::vector<RatioRow> rows;
  for (std::size_t k = 0; k < result.probes.size(); ++k) {
    for (int prefix : prefixes) {
      RatioRow row;
      row.probe = result.probes[k];
      row.m_prefix = prefix;
      row.delta1 = kantorovich_1d(result.law_p(k, prefix), result.law_q(k, prefix));
      row.delta2 = result.delta2;
      row.ratio = safe_ratio(row.delta1, row.delta2);
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<RatioRow> convergence_study(const ExperimentConfig& config, const std::vector<int>& m_prefixes) {
  if (m_prefixes.empty()) throw InputError("convergence_study needs at least one prefix");
  for (std::size_t i = 1; i < m_prefixes.size(); ++i) {
    if (m_prefixes[i] <= m_prefixes[i - 1]) throw InputError("M prefixes must be increasing");
  }
  ExperimentConfig cfg = config;
  cfg.m = m_prefixes.back();
  cfg.m_prefixes = m_prefixes;
  return run_all_data(cfg).ratios;
}

std::vector<BetaBandRow> beta_band(const ExperimentConfig& config, const std::vector<double>& betas) {
  if (betas.empty()) throw InputError("beta_band needs at least one beta");
  std::vector<BetaBandRow> rows(config.probes.size());
  for (std::size_t k = 0; k < rows.size(); ++k) rows[k].probe = config.probes[k];
  for (double beta : betas) {
    ExperimentConfig cfg = config;
    cfg.perturbation.beta = beta;
    cfg.perturbation.identity = false;
    cfg.m_prefixes.clear();
    const AllDataResult r = run_all_data(cfg);
    for (std::size_t k = 0; k < rows.size(); ++k) rows[k].ratios.push_back(safe_ratio(r.delta1[k], r.delta2));
  }
  for (auto& row : rows) {
    const auto [lo, hi] = std::minmax_element(row.ratios.begin(), row.ratios.end());
    row.band = safe_ratio(*hi, *lo);
  }
  return rows;
}

SingleDataResult run_single_data(const ExperimentConfig& config) {
  if (config.xtilde_grid.empty()) throw InputError("single-data sweep needs a nonempty xtilde_grid");
  return influence_sweep(config, config.xtilde_grid);
}

SingleDataResult run_influence(const ExperimentConfig& config, double x_tilde) {
  if (!std::isfinite(x_tilde)) throw InputError("x_tilde must be finite");
  return influence_sweep(config, {x_tilde});
}

Dataset training_data(const ExperimentConfig& config) {
  if (!config.data.empty()) return read_dataset_csv(config.data);
  return sample_base(config.model, config.n, derive_seed(config.seed, 0));
}

std::string probe_label(double probe) { return fmt::format("{}", probe); }

void write_laws_csv(const std::filesystem::path& dir, const AllDataResult& result) {
  for (std::size_t k = 0; k < result.probes.size(); ++k) {
    std::ofstream out = open_output(dir / ("laws_" + probe_label(result.probes[k]) + ".csv"));
    out << "m,f_P_value,f_Q_value\n";
    for (std::size_t m = 0; m < result.f_p[k].size(); ++m) {
      out << fmt::format("{},{},{}\n", m + 1, result.f_p[k][m], result.f_q[k][m]);
    }
  }
}

void write_ratios_csv(const std::filesystem::path& path, const std::vector<RatioRow>& rows) {
  std::ofstream out = open_output(path);
  out << "probe,M_prefix,delta1,delta2,ratio\n";
  for (const auto& r : rows) out << fmt::format("{},{},{},{},{}\n", r.probe, r.m_prefix, r.delta1, r.delta2, r.ratio);
}

void write_influence_csv(const std::filesystem::path& path, const SingleDataResult& result) {
  std::ofstream out = open_output(path);
  out << "x_tilde,y_tilde,lambda,if_norm,if_at_probe,upsilon\n";
  for (const auto& r : result.rows) {
    out << fmt::format("{},{},{},{},{},{}\n", r.x_tilde, r.y_tilde, r.lambda, r.if_norm, r.if_at_probe, r.upsilon);
  }
}

void write_svg_plot(const std::filesystem::path& path, const std::string& title, const std::string& x_label,
                    const std::string& y_label, const std::vector<Series>& series) {
  constexpr double width = 640, height = 420, left = 70, right = 150, top = 40, bottom = 50;
  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo, y_lo = x_lo, y_hi = -x_lo;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x_lo = std::min(x_lo, s.x[i]);
      x_hi = std::max(x_hi, s.x[i]);
      y_lo = std::min(y_lo, s.y[i]);
      y_hi = std::max(y_hi, s.y[i]);
    }
  }
  if (!std::isfinite(x_lo)) x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;
  if (x_hi == x_lo) x_hi = x_lo + 1;
  if (y_hi == y_lo) y_hi = y_lo + 1;
  const auto px = [&](double x) { return left + (x - x_lo) / (x_hi - x_lo) * (width - left - right); };
  const auto py = [&](double y) { return height - bottom - (y - y_lo) / (y_hi - y_lo) * (height - top - bottom); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};

  std::ofstream out = open_output(path);
  out << fmt::format(R"(<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" font-family="sans-serif">)",
                     width, height)
      << "\n";
  out << fmt::format(R"(<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>)", width / 2, title) << "\n";
  out << fmt::format(R"(<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="#444"/>)", left, top,
                     width - left - right, height - top - bottom)
      << "\n";
  out << fmt::format(R"(<text x="{}" y="{}" text-anchor="middle" font-size="12">{}</text>)",
                     (left + width - right) / 2, height - 12, x_label)
      << "\n";
  out << fmt::format(R"svg(<text x="16" y="{}" text-anchor="middle" font-size="12" transform="rotate(-90 16 {})">{}</text>)svg",
                     (top + height - bottom) / 2, (top + height - bottom) / 2, y_label)
      << "\n";
  for (double frac : {0.0, 0.5, 1.0}) {
    const double xv = x_lo + frac * (x_hi - x_lo);
    const double yv = y_lo + frac * (y_hi - y_lo);
    out << fmt::format(R"(<text x="{:.1f}" y="{}" text-anchor="middle" font-size="10">{:.4g}</text>)", px(xv),
                       height - bottom + 14, xv)
        << "\n";
    out << fmt::format(R"(<text x="{}" y="{:.1f}" text-anchor="end" font-size="10">{:.4g}</text>)", left - 4,
                       py(yv) + 3, yv)
        << "\n";
  }
  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& ser = series[s];
    const char* color = colors[s % std::size(colors)];
    std::string pts;
    double prev_y = kNaN;
    for (std::size_t i = 0; i < ser.x.size() && i < ser.y.size(); ++i) {
      if (!std::isfinite(ser.x[i]) || !std::isfinite(ser.y[i])) continue;
      if (ser.steps && std::isfinite(prev_y)) pts += fmt::format("{:.2f},{:.2f} ", px(ser.x[i]), py(prev_y));
      pts += fmt::format("{:.2f},{:.2f} ", px(ser.x[i]), py(ser.y[i]));
      prev_y = ser.y[i];
    }
    out << fmt::format(R"(<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>)", color, pts) << "\n";
    const double ly = top + 14 + 16 * static_cast<double>(s);
    out << fmt::format(R"(<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{}" stroke-width="2"/>)", width - right + 10,
                       ly - 4, width - right + 30, ly - 4, color)
        << "\n";
    out << fmt::format(R"(<text x="{}" y="{}" font-size="11">{}</text>)", width - right + 34, ly, ser.name) << "\n";
  }
  out << "</svg>\n";
}

}  // namespace robustlab
