#include "robustlab/erm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "robustlab/errors.hpp"
#include "robustlab/random.hpp"

namespace robustlab {

namespace {

// Loss evaluated coefficient-wise on a solution carried by the sample inputs.
class CoeffObjective {
 public:
  explicit CoeffObjective(const ErmProblem& problem)
      : problem_(problem),
        gram_(gram_matrix(problem.kernel, problem.data.x)),
        weights_(problem.sample_weights()),
        euclidean_(problem.feasible.kind == FeasibleKind::coeff_box) {}

  const Eigen::MatrixXd& gram() const { return gram_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  Eigen::Index size() const { return gram_.rows(); }

  double value(const Eigen::VectorXd& a, const Eigen::VectorXd& ka) const {
    const auto& y = problem_.data.y;
    double risk = 0.0;
    for (Eigen::Index i = 0; i < size(); ++i) {
      if (weights_[i] != 0.0) risk += weights_[i] * loss_value(problem_.loss, y[i], ka[i]);
    }
    return risk + problem_.lambda * a.dot(ka);
  }

  // Coefficients of g(f) = sum_i w_i c'_2 k_{x^i} + 2 lambda f.
  Eigen::VectorXd gradient(const Eigen::VectorXd& a, const Eigen::VectorXd& ka) const {
    const auto& y = problem_.data.y;
    Eigen::VectorXd g(size());
    for (Eigen::Index i = 0; i < size(); ++i) {
      g[i] = weights_[i] * loss_grad(problem_.loss, y[i], ka[i]) + 2.0 * problem_.lambda * a[i];
    }
    return g;
  }

  // Steepest-descent direction in the working geometry.
  Eigen::VectorXd direction(const Eigen::VectorXd& g) const { return euclidean_ ? Eigen::VectorXd(gram_ * g) : g; }

  double squared_norm(const Eigen::VectorXd& v) const { return euclidean_ ? v.squaredNorm() : v.dot(gram_ * v); }

  double rkhs_norm(const Eigen::VectorXd& v) const { return std::sqrt(std::max(v.dot(gram_ * v), 0.0)); }

  Eigen::VectorXd project(const Eigen::VectorXd& a) const { return project_feasible(a, problem_.feasible, gram_); }

  double residual(const Eigen::VectorXd& a, const Eigen::VectorXd& ka) const {
    const Eigen::VectorXd step = a - direction(gradient(a, ka));
    return rkhs_norm(a - project(step));
  }

  // Upper bound on the gradient Lipschitz constant in the working geometry,
  // valid for losses with c'' <= curvature.
  double lipschitz_bound() const {
    double curvature = 1.0;
    if (problem_.loss.kind == LossKind::logloss) {
      curvature = problem_.loss.logloss_form == LoglossForm::as_printed
                      ? 0.25
                      : 0.25 * std::max(1.0, problem_.data.y.cwiseAbs2().maxCoeff());
    }
    Eigen::VectorXd v = Eigen::VectorXd::Ones(size());
    double top = 0.0;
    for (int it = 0; it < 60; ++it) {
      Eigen::VectorXd kv = gram_ * v;
      const double norm = kv.norm();
      if (norm == 0.0) break;
      top = norm / v.norm();
      v = kv / norm;
    }
    top *= 1.05;
    const double inner = weights_.maxCoeff() * curvature * top + 2.0 * problem_.lambda;
    const double bound = euclidean_ ? top * inner : inner;
    return std::max(bound, 1e-12);
  }

 private:
  const ErmProblem& problem_;
  Eigen::MatrixXd gram_;
  Eigen::VectorXd weights_;
  bool euclidean_;
};

Eigen::VectorXd initial_point(const CoeffObjective& obj, std::uint64_t seed, const SolverOptions& opts) {
  Eigen::VectorXd a = Eigen::VectorXd::Zero(obj.size());
  if (opts.random_init) {
    RandomStream rng(seed);
    for (Eigen::Index i = 0; i < a.size(); ++i) a[i] = rng.normal();
    const double norm = obj.rkhs_norm(a);
    if (norm > 0.0) a *= opts.init_scale / norm;
  }
  return obj.project(a);
}

ErmSolution make_solution(const ErmProblem& problem, const CoeffObjective& obj, Eigen::VectorXd a) {
  const Eigen::VectorXd ka = obj.gram() * a;
  ErmSolution sol{RkhsFunction(problem.kernel, problem.data.x, a), 0.0, 0.0, 0, false, SolveMethod::closed_form, {}};
  sol.objective = obj.value(a, ka);
  return sol;
}

std::optional<ErmSolution> try_closed_form(const ErmProblem& problem, const CoeffObjective& obj) {
  // Coefficient matching of sum_i w_i (f(x^i) - y^i) k_{x^i} + 2 lambda f = 0:
  //   (W K + 2 lambda I) a = W y.
  Eigen::MatrixXd system = obj.weights().asDiagonal() * obj.gram();
  system.diagonal().array() += 2.0 * problem.lambda;
  if (problem.lambda == 0.0) system.diagonal().array() += gram_jitter(obj.gram());
  const Eigen::VectorXd rhs = obj.weights().cwiseProduct(problem.data.y);
  Eigen::VectorXd a = system.partialPivLu().solve(rhs);
  if (!a.allFinite()) return std::nullopt;
  const Eigen::VectorXd projected = obj.project(a);
  if ((projected - a).norm() > 1e-14 * (1.0 + a.norm())) return std::nullopt;
  ErmSolution sol = make_solution(problem, obj, a);
  sol.residual = obj.residual(a, obj.gram() * a);
  sol.converged = true;
  sol.method = SolveMethod::closed_form;
  return sol;
}

// Monotone FISTA with backtracking (step halving) and momentum restart.
ErmSolution accelerated_gradient(const ErmProblem& problem, const CoeffObjective& obj, Eigen::VectorXd x,
                                 const SolverOptions& opts) {
  const Eigen::MatrixXd& gram = obj.gram();
  double lip = obj.lipschitz_bound() / 16.0;
  Eigen::VectorXd kx = gram * x;
  double fx = obj.value(x, kx);
  Eigen::VectorXd yv = x;
  double momentum = 1.0;
  std::vector<double> trace{fx};
  double residual = obj.residual(x, kx);
  int it = 0;
  for (; it < opts.max_iter && residual > opts.tol; ++it) {
    const Eigen::VectorXd ky = gram * yv;
    const Eigen::VectorXd gy = obj.gradient(yv, ky);
    const Eigen::VectorXd dy = obj.direction(gy);
    const Eigen::VectorXd kgy = gram * gy;  // (K g) . v is the directional derivative in both geometries
    const double fy = obj.value(yv, ky);

    Eigen::VectorXd z, kz;
    double fz = 0.0;
    for (int bt = 0; bt < 200; ++bt) {
      z = obj.project(yv - dy / lip);
      const Eigen::VectorXd diff = z - yv;
      kz = gram * z;
      fz = obj.value(z, kz);
      const double model = fy + kgy.dot(diff) + 0.5 * lip * obj.squared_norm(diff);
      if (fz <= model + 1e-14 * (1.0 + std::abs(fy))) break;
      lip *= 2.0;
    }

    const double next_momentum = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
    const Eigen::VectorXd x_old = x;
    // Near the optimum objective values tie at rounding level; keep taking
    // gradient steps there instead of freezing the iterate.
    const bool improved = fz <= fx;
    if (fz <= fx + 1e-13 * (1.0 + std::abs(fx))) {
      x = z;
      kx = kz;
      fx = fz;
    }
    yv = x + (momentum / next_momentum) * (z - x) + ((momentum - 1.0) / next_momentum) * (x - x_old);
    momentum = improved ? next_momentum : 1.0;
    if (!improved) yv = x;
    trace.push_back(fx);
    residual = obj.residual(x, kx);
  }

  if (residual > opts.tol) {
    throw ConvergenceError("accelerated gradient did not reach residual " + std::to_string(opts.tol) + " in " +
                               std::to_string(opts.max_iter) + " iterations (last " + std::to_string(residual) + ")",
                           x, residual);
  }
  ErmSolution sol = make_solution(problem, obj, x);
  sol.residual = residual;
  sol.iterations = it;
  sol.converged = true;
  sol.method = SolveMethod::accelerated_gradient;
  sol.objective_trace = std::move(trace);
  return sol;
}

// Projected subgradient with normalized steps step0 / sqrt(t); returns the
// best iterate.
ErmSolution subgradient(const ErmProblem& problem, const CoeffObjective& obj, Eigen::VectorXd x,
                        const SolverOptions& opts) {
  const Eigen::MatrixXd& gram = obj.gram();
  Eigen::VectorXd kx = gram * x;
  const double f_zero = obj.value(Eigen::VectorXd::Zero(obj.size()), Eigen::VectorXd::Zero(obj.size()));
  // |f*|_k <= sqrt(J(0) / lambda) bounds the distance the iterates need to travel.
  const double step0 = problem.lambda > 0.0 ? std::max(std::sqrt(f_zero / problem.lambda), 1e-8) : 1.0;

  Eigen::VectorXd best = x;
  double f_best = obj.value(x, kx);
  double window_start = f_best;
  std::vector<double> trace{f_best};
  double decrease = std::numeric_limits<double>::infinity();
  bool converged = false;
  int it = 1;
  for (; it <= opts.max_iter; ++it) {
    const Eigen::VectorXd d = obj.direction(obj.gradient(x, kx));
    const double dn = std::sqrt(std::max(obj.squared_norm(d), 0.0));
    if (dn == 0.0) {
      decrease = 0.0;
      converged = true;
      break;
    }
    x = obj.project(x - (step0 / std::sqrt(static_cast<double>(it))) * d / dn);
    kx = gram * x;
    const double fx = obj.value(x, kx);
    if (fx < f_best) {
      f_best = fx;
      best = x;
    }
    trace.push_back(f_best);
    if (it % opts.nonsmooth_window == 0) {
      decrease = window_start - f_best;
      window_start = f_best;
      if (decrease <= opts.nonsmooth_tol * std::max(1.0, std::abs(f_best))) {
        converged = true;
        break;
      }
    }
  }
  if (!converged) {
    throw ConvergenceError("subgradient method did not settle within " + std::to_string(opts.max_iter) +
                               " iterations",
                           best, decrease);
  }
  ErmSolution sol = make_solution(problem, obj, best);
  sol.residual = decrease;
  sol.iterations = std::min(it, opts.max_iter);
  sol.converged = true;
  sol.method = SolveMethod::subgradient;
  sol.objective_trace = std::move(trace);
  return sol;
}

// Hinge and pinball are maxima of affine pieces,
//   c(z^i, u) = max_{b in [lo_i, hi_i]} b (s_i - d_i u),
// which turns the regularized problem into the box-constrained concave dual
//   D(b) = sum_i w_i b_i s_i - |sum_i w_i d_i b_i k_{x^i}|_k^2 / (4 lambda)
// with f = (1 / (2 lambda)) sum_i w_i d_i b_i k_{x^i}. Cyclic exact coordinate
// ascent; the primal-dual gap is the stopping certificate.
struct DualResult {
  Eigen::VectorXd coeffs;
  double primal = 0.0;
  double gap = 0.0;
  int sweeps = 0;
  std::vector<double> trace;
};

DualResult dual_coordinate_ascent(const ErmProblem& problem, const CoeffObjective& obj, double lambda, double gap_tol,
                                  int max_sweeps) {
  const Eigen::Index n = obj.size();
  const Eigen::MatrixXd& gram = obj.gram();
  const Eigen::VectorXd& w = obj.weights();
  const auto& y = problem.data.y;
  Eigen::VectorXd s(n), d(n), lo(n), hi(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (problem.loss.kind == LossKind::hinge) {
      s[i] = 1.0, d[i] = y[i], lo[i] = 0.0, hi[i] = 1.0;
    } else {
      s[i] = y[i], d[i] = 1.0, lo[i] = problem.loss.nu - 1.0, hi[i] = problem.loss.nu;
    }
  }

  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd kv = Eigen::VectorXd::Zero(n);  // K v with v_i = w_i d_i b_i
  const auto primal_dual = [&](double& primal, double& dual) {
    const Eigen::VectorXd v = w.cwiseProduct(d).cwiseProduct(b);
    const Eigen::VectorXd a = v / (2.0 * lambda);
    const Eigen::VectorXd ka = kv / (2.0 * lambda);
    double risk = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (w[i] != 0.0) risk += w[i] * loss_value(problem.loss, y[i], ka[i]);
    }
    const double quad = v.dot(kv) / (4.0 * lambda);
    primal = risk + quad;
    dual = w.cwiseProduct(b).dot(s) - quad;
    return a;
  };

  DualResult out;
  double primal = 0.0, dual = 0.0;
  Eigen::VectorXd a = primal_dual(primal, dual);
  out.trace.push_back(primal);
  double best = primal;
  out.coeffs = a;
  out.primal = primal;
  out.gap = primal - dual;
  for (int sweep = 1; sweep <= max_sweeps && out.gap > gap_tol * std::max(1.0, std::abs(out.primal)); ++sweep) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double scale = w[i] * d[i];
      if (scale == 0.0) continue;
      const double slope = s[i] - d[i] * kv[i] / (2.0 * lambda);  // dD/db_i divided by w_i
      const double curv = scale * d[i] * gram(i, i) / (2.0 * lambda);
      double next = b[i];
      if (curv > 0.0) {
        next = std::clamp(b[i] + slope / curv, lo[i], hi[i]);
      } else if (slope != 0.0) {
        next = slope > 0.0 ? hi[i] : lo[i];
      }
      const double delta = next - b[i];
      if (delta == 0.0) continue;
      b[i] = next;
      kv += gram.col(i) * (scale * delta);
    }
    // Refresh K v to keep rounding drift out of the gap.
    kv = gram * w.cwiseProduct(d).cwiseProduct(b);
    a = primal_dual(primal, dual);
    if (primal < best) {
      best = primal;
      out.coeffs = a;
      out.primal = primal;
    }
    out.gap = out.primal - dual;
    out.trace.push_back(best);
    out.sweeps = sweep;
  }
  return out;
}

// Nonsmooth problems with lambda > 0 and no box: the dual method, with the
// ball handled through its multiplier mu (the ball solution is the
// unconstrained solution at lambda + mu with |f| = radius).
std::optional<ErmSolution> try_dual(const ErmProblem& problem, const CoeffObjective& obj, const SolverOptions& opts) {
  if (!(problem.lambda > 0.0) || problem.feasible.kind == FeasibleKind::coeff_box) return std::nullopt;
  const auto fail = [&](const DualResult& r) {
    throw ConvergenceError("dual coordinate ascent did not close the duality gap within " +
                               std::to_string(opts.max_iter) + " sweeps (last " + std::to_string(r.gap) + ")",
                           r.coeffs, r.gap);
  };
  const auto converged = [](const DualResult& r, double tol) { return r.gap <= tol * std::max(1.0, std::abs(r.primal)); };

  DualResult r = dual_coordinate_ascent(problem, obj, problem.lambda, opts.nonsmooth_tol, opts.max_iter);
  if (!converged(r, opts.nonsmooth_tol)) fail(r);
  int sweeps = r.sweeps;

  if (problem.feasible.kind == FeasibleKind::rkhs_ball && obj.rkhs_norm(r.coeffs) > problem.feasible.radius) {
    // The multiplier is bracketed by |f_{lambda'}|^2 <= R(0) / lambda'.
    const double radius = problem.feasible.radius;
    const double risk0 = obj.value(Eigen::VectorXd::Zero(obj.size()), Eigen::VectorXd::Zero(obj.size()));
    double mu_lo = 0.0, mu_hi = std::max(risk0 / (radius * radius), 1e-12);
    // Inner solves run tighter so the norm comparisons drive the bisection.
    const double inner_tol = 1e-3 * opts.nonsmooth_tol;
    DualResult at_lo = r;
    for (int it = 0; it < 200 && mu_hi - mu_lo > 1e-10 * mu_hi; ++it) {
      const double mu = 0.5 * (mu_lo + mu_hi);
      DualResult trial = dual_coordinate_ascent(problem, obj, problem.lambda + mu, inner_tol, opts.max_iter);
      if (!converged(trial, inner_tol)) fail(trial);
      sweeps += trial.sweeps;
      if (obj.rkhs_norm(trial.coeffs) > radius) {
        mu_lo = mu;
        at_lo = std::move(trial);
      } else {
        mu_hi = mu;
      }
    }
    r = std::move(at_lo);
    r.coeffs = obj.project(r.coeffs);
  }

  ErmSolution sol = make_solution(problem, obj, r.coeffs);
  sol.residual = r.gap;
  sol.iterations = sweeps;
  sol.converged = true;
  sol.method = SolveMethod::dual_coordinate;
  sol.objective_trace = std::move(r.trace);
  return sol;
}

void validate(const ErmProblem& problem) {
  if (!(problem.lambda >= 0.0) || !std::isfinite(problem.lambda)) throw InputError("lambda must be >= 0");
  if (problem.feasible.kind == FeasibleKind::coeff_box && problem.feasible.lower.size() != 1 &&
      problem.feasible.lower.size() != problem.data.size()) {
    throw InputError("box bounds do not match the number of samples");
  }
}

}  // namespace

ErmProblem::ErmProblem(Dataset data_, KernelSpec kernel_, LossSpec loss_, double lambda_, FeasibleSet feasible_,
                       Eigen::VectorXd weights_)
    : data(std::move(data_)),
      weights(std::move(weights_)),
      kernel(std::move(kernel_)),
      loss(loss_),
      lambda(lambda_),
      feasible(std::move(feasible_)) {
  if (data.size() == 0) throw InputError("ERM problem needs at least one sample");
  if (weights.size() != 0) {
    if (weights.size() != data.size()) throw InputError("sample weights do not match the data size");
    if ((weights.array() < 0.0).any()) throw InputError("sample weights must be nonnegative");
    if (std::abs(weights.sum() - 1.0) > 1e-12) throw InputError("sample weights must sum to 1");
  }
}

ErmProblem ErmProblem::from_measure(const EmpiricalMeasure& measure, KernelSpec kernel, LossSpec loss, double lambda,
                                    FeasibleSet feasible) {
  return {dataset_from_joint(measure.atoms()), std::move(kernel), loss, lambda, std::move(feasible), measure.weights()};
}

Eigen::VectorXd ErmProblem::sample_weights() const {
  if (weights.size() != 0) return weights;
  return Eigen::VectorXd::Constant(data.size(), 1.0 / static_cast<double>(data.size()));
}

ErmProblem ErmProblem::with_data(Dataset other, Eigen::VectorXd other_weights) const {
  return {std::move(other), kernel, loss, lambda, feasible, std::move(other_weights)};
}

std::string_view to_string(SolveMethod method) {
  switch (method) {
    case SolveMethod::closed_form: return "closed_form";
    case SolveMethod::accelerated_gradient: return "accelerated_gradient";
    case SolveMethod::subgradient: return "subgradient";
    case SolveMethod::dual_coordinate: return "dual_coordinate";
  }
  return "unknown";
}

double objective(const ErmProblem& problem, const RkhsFunction& f) {
  if (!(f.kernel() == problem.kernel)) throw InputError("objective: kernel mismatch");
  const Eigen::VectorXd fx = rkhs_eval_many(f, problem.data.x);
  const Eigen::VectorXd w = problem.sample_weights();
  double risk = 0.0;
  for (Eigen::Index i = 0; i < fx.size(); ++i) risk += w[i] * loss_value(problem.loss, problem.data.y[i], fx[i]);
  const double norm = rkhs_norm(f);
  return risk + problem.lambda * norm * norm;
}

ErmSolution solve_erm(const ErmProblem& problem, std::uint64_t seed, const SolverOptions& opts) {
  validate(problem);
  const CoeffObjective obj(problem);
  if (problem.loss.kind == LossKind::squared && opts.closed_form) {
    if (auto sol = try_closed_form(problem, obj)) return *sol;
  }
  if (problem.loss.nonsmooth() && opts.dual_method) {
    if (auto sol = try_dual(problem, obj, opts)) return *sol;
  }
  Eigen::VectorXd start = initial_point(obj, seed, opts);
  if (problem.loss.nonsmooth()) return subgradient(problem, obj, std::move(start), opts);
  return accelerated_gradient(problem, obj, std::move(start), opts);
}

double optimality_residual(const ErmProblem& problem, const RkhsFunction& f) {
  if (problem.loss.nonsmooth()) {
    throw CapabilityError("optimality residual needs a differentiable loss; use objective diagnostics");
  }
  if (!(f.kernel() == problem.kernel)) throw InputError("optimality_residual: kernel mismatch");
  const Eigen::VectorXd fx = rkhs_eval_many(f, problem.data.x);
  const Eigen::VectorXd w = problem.sample_weights();
  Eigen::VectorXd loss_part(fx.size());
  for (Eigen::Index i = 0; i < fx.size(); ++i) loss_part[i] = w[i] * loss_grad(problem.loss, problem.data.y[i], fx[i]);

  if (problem.feasible.kind == FeasibleKind::coeff_box) {
    const bool same_basis = f.basis().rows() == problem.data.x.rows() && f.basis().cols() == problem.data.x.cols() &&
                            (f.basis() - problem.data.x).cwiseAbs().maxCoeff() <= 1e-12;
    if (!same_basis) throw InputError("box-constrained residual needs f carried on the sample inputs");
    const Eigen::MatrixXd gram = gram_matrix(problem.kernel, problem.data.x);
    const Eigen::VectorXd g = loss_part + 2.0 * problem.lambda * f.coeffs();
    const Eigen::VectorXd r = f.coeffs() - project_feasible(f.coeffs() - gram * g, problem.feasible, gram);
    return std::sqrt(std::max(r.dot(gram * r), 0.0));
  }

  const RkhsFunction g = rkhs_axpy(f.scaled(2.0 * problem.lambda), 1.0,
                                   RkhsFunction(problem.kernel, problem.data.x, loss_part));
  if (problem.feasible.kind == FeasibleKind::unconstrained) return rkhs_norm(g);
  const RkhsFunction step = rkhs_axpy(f, -1.0, g);
  const double norm = rkhs_norm(step);
  const double scale = norm <= problem.feasible.radius ? 1.0 : problem.feasible.radius / norm;
  return rkhs_distance(f, step.scaled(scale));
}

double paired_sample_distance(const Dataset& a, const Dataset& b, double p) {
  if (a.size() != b.size() || a.dim() != b.dim()) throw InputError("paired datasets must have equal shape");
  if (!(p >= 1.0)) throw InputError("growth order p must be >= 1");
  double total = 0.0;
  for (Eigen::Index l = 0; l < a.size(); ++l) {
    const Point z1 = a.z(l);
    const Point z2 = b.z(l);
    const double growth = std::pow(std::max({1.0, z1.norm(), z2.norm()}), p - 1.0);
    total += growth * (z1 - z2).norm();
  }
  return 2.0 * total / static_cast<double>(a.size());
}

LipschitzEstimate estimate_lipschitz(const ErmProblem& problem_template, const PerturbationFamily& family,
                                     int num_pairs, std::uint64_t seed, double p, const SolverOptions& opts) {
  if (num_pairs < 1) throw InputError("estimate_lipschitz needs at least one pair");
  std::vector<std::optional<LipschitzSample>> results(static_cast<std::size_t>(num_pairs));
  std::vector<std::string> errors(static_cast<std::size_t>(num_pairs));
#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < num_pairs; ++k) {
    try {
      auto [first, second] = family(derive_seed(seed, static_cast<std::uint64_t>(k)));
      const double data_distance = paired_sample_distance(first, second, p);
      if (data_distance == 0.0) continue;
      const ErmSolution s1 = solve_erm(problem_template.with_data(std::move(first)), 0, opts);
      const ErmSolution s2 = solve_erm(problem_template.with_data(std::move(second)), 0, opts);
      const double solution_distance = rkhs_distance(s1.f, s2.f);
      results[static_cast<std::size_t>(k)] =
          LipschitzSample{solution_distance, data_distance, solution_distance / data_distance};
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(k)] = e.what();
    }
  }
  for (int k = 0; k < num_pairs; ++k) {
    if (!errors[static_cast<std::size_t>(k)].empty()) {
      throw Error("estimate_lipschitz: pair " + std::to_string(k) + ": " + errors[static_cast<std::size_t>(k)]);
    }
  }
  LipschitzEstimate out;
  for (const auto& r : results) {
    if (r) {
      out.samples.push_back(*r);
    } else {
      ++out.pairs_skipped;
    }
  }
  out.pairs_tested = static_cast<int>(out.samples.size());
  std::sort(out.samples.begin(), out.samples.end(),
            [](const LipschitzSample& a, const LipschitzSample& b) { return a.ratio < b.ratio; });
  if (!out.samples.empty()) {
    out.max_ratio = out.samples.back().ratio;
    const std::size_t m = out.samples.size();
    out.median_ratio = m % 2 == 1 ? out.samples[m / 2].ratio
                                  : 0.5 * (out.samples[m / 2 - 1].ratio + out.samples[m / 2].ratio);
  }
  return out;
}

}  // namespace robustlab
