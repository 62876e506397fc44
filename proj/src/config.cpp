#include "robustlab/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <boost/algorithm/string/trim.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "robustlab/errors.hpp"

namespace robustlab {

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"model", {"mu", "sigma", "response"}},
      {"perturbation", {"kind", "p", "beta", "same_stream"}},
      {"kernel", {"kind", "gamma", "degree", "offset", "c", "alpha"}},
      {"loss", {"kind", "nu", "logloss_form"}},
      {"solver",
       {"lambda", "lambda_grid", "feasible", "box_lower", "box_upper", "radius", "tol", "nonsmooth_tol", "max_iter"}},
      {"experiment",
       {"n", "m", "seed", "probes", "m_prefixes", "betas", "xtilde_grid", "outlier_response", "probe_x0", "fd_t",
        "upsilon_t_grid", "data", "out_dir", "plots"}},
  };
  return keys;
}

double parse_double(const std::string& key, std::string text) {
  boost::algorithm::trim(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw InputError("config: " + key + " is not a number: '" + text + "'");
  }
  if (used != text.size()) throw InputError("config: " + key + " is not a number: '" + text + "'");
  return v;
}

long long parse_integer(const std::string& key, std::string text) {
  boost::algorithm::trim(text);
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(text, &used);
  } catch (const std::exception&) {
    throw InputError("config: " + key + " is not an integer: '" + text + "'");
  }
  if (used != text.size()) throw InputError("config: " + key + " is not an integer: '" + text + "'");
  return v;
}

bool parse_bool(const std::string& key, std::string text) {
  boost::algorithm::trim(text);
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw InputError("config: " + key + " is not a boolean: '" + text + "'");
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    boost::algorithm::trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

std::vector<double> parse_double_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) out.push_back(parse_double(key, item));
  return out;
}

class Section {
 public:
  Section(const pt::ptree& root, std::string name) : name_(std::move(name)) {
    if (auto child = root.get_child_optional(name_)) tree_ = &*child;
  }

  std::optional<std::string> raw(const std::string& key) const {
    if (!tree_) return std::nullopt;
    auto v = tree_->get_optional<std::string>(key);
    if (!v) return std::nullopt;
    std::string s = *v;
    boost::algorithm::trim(s);
    return s;
  }

  void number(const std::string& key, double& target) const {
    if (auto v = raw(key)) target = parse_double(qualified(key), *v);
  }
  void integer(const std::string& key, int& target) const {
    if (auto v = raw(key)) target = static_cast<int>(parse_integer(qualified(key), *v));
  }
  void flag(const std::string& key, bool& target) const {
    if (auto v = raw(key)) target = parse_bool(qualified(key), *v);
  }
  void numbers(const std::string& key, std::vector<double>& target) const {
    if (auto v = raw(key)) target = parse_double_list(qualified(key), *v);
  }

  std::string qualified(const std::string& key) const { return name_ + "." + key; }

 private:
  std::string name_;
  const pt::ptree* tree_ = nullptr;
};

void check_schema(const pt::ptree& root) {
  for (const auto& [section, body] : root) {
    auto it = schema().find(section);
    if (it == schema().end()) throw InputError("config: unknown section [" + section + "]");
    if (!body.data().empty()) throw InputError("config: key '" + section + "' outside any section");
    for (const auto& [key, value] : body) {
      if (!it->second.contains(key)) throw InputError("config: unknown key " + section + "." + key);
    }
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  model.validate();
  if (!perturbation.identity) perturbation.validate();
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InputError("config: lambda must be finite and >= 0");
  for (double l : lambda_grid) {
    if (!(l >= 0.0) || !std::isfinite(l)) throw InputError("config: lambda_grid entries must be finite and >= 0");
  }
  if (n < 2) throw InputError("config: n must be >= 2");
  if (m < 1) throw InputError("config: m must be >= 1");
  if (probes.empty()) throw InputError("config: at least one probe is required");
  for (double x : probes) {
    if (!std::isfinite(x)) throw InputError("config: probes must be finite");
  }
  for (std::size_t i = 0; i < m_prefixes.size(); ++i) {
    if (m_prefixes[i] < 1 || (i > 0 && m_prefixes[i] <= m_prefixes[i - 1])) {
      throw InputError("config: m_prefixes must be positive and increasing");
    }
  }
  for (double b : betas) {
    if (!(b > 0.0) || !std::isfinite(b)) throw InputError("config: betas must be finite and > 0");
  }
  for (double x : xtilde_grid) {
    if (!std::isfinite(x)) throw InputError("config: xtilde_grid must be finite");
  }
  if (!std::isfinite(probe_x0)) throw InputError("config: probe_x0 must be finite");
  if (!(fd_t > 0.0 && fd_t < 1.0)) throw InputError("config: fd_t must lie in (0, 1)");
  for (double t : upsilon_t_grid) {
    if (!(t >= 0.0 && t < 1.0)) throw InputError("config: upsilon_t_grid must lie in [0, 1)");
  }
  if (upsilon_t_grid.empty()) throw InputError("config: upsilon_t_grid must be nonempty");
  if (!(solver.tol > 0.0) || !(solver.nonsmooth_tol > 0.0) || solver.max_iter < 1) {
    throw InputError("config: solver tolerances must be > 0 and max_iter >= 1");
  }
}

ExperimentConfig parse_config(std::istream& in) {
  pt::ptree root;
  try {
    pt::read_ini(in, root);
  } catch (const pt::ini_parser_error& e) {
    throw InputError(std::string("config: ") + e.what());
  }
  check_schema(root);

  ExperimentConfig cfg;

  const Section model(root, "model");
  model.number("mu", cfg.model.mu);
  model.number("sigma", cfg.model.sigma);
  if (auto v = model.raw("response")) cfg.model.response = response_from_string(*v);

  const Section pert(root, "perturbation");
  if (auto v = pert.raw("kind")) {
    if (*v == "identity") {
      cfg.perturbation.identity = true;
    } else if (*v != "tail") {
      throw InputError("config: perturbation.kind must be tail or identity");
    }
  }
  pert.number("p", cfg.perturbation.p);
  pert.number("beta", cfg.perturbation.beta);
  pert.flag("same_stream", cfg.same_stream);

  const Section kernel(root, "kernel");
  {
    KernelKind kind = cfg.kernel.kind();
    std::map<std::string, double> params = cfg.kernel.params();
    if (auto v = kernel.raw("kind")) {
      kind = kernel_kind_from_string(*v);
      params.clear();
    }
    for (const char* key : {"gamma", "degree", "offset", "c", "alpha"}) {
      if (auto v = kernel.raw(key)) params[key] = parse_double(kernel.qualified(key), *v);
    }
    cfg.kernel = KernelSpec::from_params(kind, params);
  }

  const Section loss(root, "loss");
  if (auto v = loss.raw("kind")) cfg.loss.kind = loss_kind_from_string(*v);
  loss.number("nu", cfg.loss.nu);
  if (auto v = loss.raw("logloss_form")) {
    if (*v == "as_printed") {
      cfg.loss.logloss_form = LoglossForm::as_printed;
    } else if (*v == "margin") {
      cfg.loss.logloss_form = LoglossForm::margin;
    } else {
      throw InputError("config: loss.logloss_form must be as_printed or margin");
    }
  }
  if (cfg.loss.kind == LossKind::pinball) cfg.loss = LossSpec::pinball(cfg.loss.nu);

  const Section solver(root, "solver");
  solver.number("lambda", cfg.lambda);
  solver.numbers("lambda_grid", cfg.lambda_grid);
  {
    std::string kind = "box";
    if (auto v = solver.raw("feasible")) kind = *v;
    double lo = -10.0, hi = 10.0, radius = 1.0;
    solver.number("box_lower", lo);
    solver.number("box_upper", hi);
    solver.number("radius", radius);
    if (kind == "box") {
      if (!(lo < hi)) throw InputError("config: box_lower must be < box_upper");
      cfg.feasible = FeasibleSet::box(lo, hi);
    } else if (kind == "ball") {
      cfg.feasible = FeasibleSet::ball(radius);
    } else if (kind == "unconstrained") {
      cfg.feasible = FeasibleSet::unconstrained();
    } else {
      throw InputError("config: solver.feasible must be box, ball or unconstrained");
    }
  }
  solver.number("tol", cfg.solver.tol);
  solver.number("nonsmooth_tol", cfg.solver.nonsmooth_tol);
  solver.integer("max_iter", cfg.solver.max_iter);

  const Section exp(root, "experiment");
  exp.integer("n", cfg.n);
  exp.integer("m", cfg.m);
  if (auto v = exp.raw("seed")) {
    const long long s = parse_integer("experiment.seed", *v);
    if (s < 0) throw InputError("config: experiment.seed must be >= 0");
    cfg.seed = static_cast<std::uint64_t>(s);
  }
  exp.numbers("probes", cfg.probes);
  if (auto v = exp.raw("m_prefixes")) {
    cfg.m_prefixes.clear();
    for (const auto& item : split_list(*v)) {
      cfg.m_prefixes.push_back(static_cast<int>(parse_integer("experiment.m_prefixes", item)));
    }
  }
  exp.numbers("betas", cfg.betas);
  exp.numbers("xtilde_grid", cfg.xtilde_grid);
  if (auto v = exp.raw("outlier_response")) cfg.outlier_response = response_from_string(*v);
  exp.number("probe_x0", cfg.probe_x0);
  exp.number("fd_t", cfg.fd_t);
  exp.numbers("upsilon_t_grid", cfg.upsilon_t_grid);
  if (auto v = exp.raw("data")) cfg.data = *v;
  if (auto v = exp.raw("out_dir")) cfg.out_dir = *v;
  exp.flag("plots", cfg.plots);

  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config " + path.string());
  ExperimentConfig cfg = parse_config(in);
  if (!cfg.data.empty() && cfg.data.is_relative()) cfg.data = path.parent_path() / cfg.data;
  return cfg;
}

nlohmann::json to_json(const ExperimentConfig& c) {
  using nlohmann::json;
  json feasible;
  switch (c.feasible.kind) {
    case FeasibleKind::unconstrained: feasible = {{"kind", "unconstrained"}}; break;
    case FeasibleKind::coeff_box:
      feasible = {{"kind", "box"}, {"lower", c.feasible.lower[0]}, {"upper", c.feasible.upper[0]}};
      break;
    case FeasibleKind::rkhs_ball: feasible = {{"kind", "ball"}, {"radius", c.feasible.radius}}; break;
  }
  json kernel = {{"kind", std::string(to_string(c.kernel.kind()))}};
  for (const auto& [k, v] : c.kernel.params()) kernel[k] = v;
  return json{
      {"model", {{"mu", c.model.mu}, {"sigma", c.model.sigma}, {"response", std::string(to_string(c.model.response))}}},
      {"perturbation",
       {{"kind", c.perturbation.identity ? "identity" : "tail"},
        {"p", c.perturbation.p},
        {"beta", c.perturbation.beta},
        {"same_stream", c.same_stream}}},
      {"kernel", kernel},
      {"loss",
       {{"kind", std::string(to_string(c.loss.kind))},
        {"nu", c.loss.nu},
        {"logloss_form", c.loss.logloss_form == LoglossForm::margin ? "margin" : "as_printed"}}},
      {"solver",
       {{"lambda", c.lambda},
        {"lambda_grid", c.lambda_grid},
        {"feasible", feasible},
        {"tol", c.solver.tol},
        {"nonsmooth_tol", c.solver.nonsmooth_tol},
        {"max_iter", c.solver.max_iter}}},
      {"experiment",
       {{"n", c.n},
        {"m", c.m},
        {"seed", c.seed},
        {"probes", c.probes},
        {"m_prefixes", c.m_prefixes},
        {"betas", c.betas},
        {"xtilde_grid", c.xtilde_grid},
        {"outlier_response", std::string(to_string(c.outlier_response))},
        {"probe_x0", c.probe_x0},
        {"fd_t", c.fd_t},
        {"upsilon_t_grid", c.upsilon_t_grid},
        {"data", c.data.string()},
        {"out_dir", c.out_dir.string()},
        {"plots", c.plots}}},
  };
}

}  // namespace robustlab
