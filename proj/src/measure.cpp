#include "robustlab/measure.hpp"

#include <algorithm>
#include <cmath>

#include "robustlab/errors.hpp"

namespace robustlab {

EmpiricalMeasure::EmpiricalMeasure(PointSet atoms, Eigen::VectorXd weights)
    : atoms_(std::move(atoms)), weights_(std::move(weights)) {
  if (atoms_.rows() == 0) throw InputError("empirical measure needs at least one atom");
  if (atoms_.rows() != weights_.size()) throw InputError("atom and weight counts differ");
  if ((weights_.array() < 0.0).any()) throw InputError("measure weights must be nonnegative");
  if (!atoms_.allFinite() || !weights_.allFinite()) throw InputError("measure contains non-finite values");
  if (std::abs(weights_.sum() - 1.0) > 1e-12) throw InputError("measure weights must sum to 1");
}

EmpiricalMeasure EmpiricalMeasure::uniform(PointSet atoms) {
  const Eigen::Index n = atoms.rows();
  if (n == 0) throw InputError("empirical measure needs at least one atom");
  return {std::move(atoms), Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n))};
}

EmpiricalMeasure EmpiricalMeasure::uniform(const std::vector<double>& values) {
  PointSet atoms(static_cast<Eigen::Index>(values.size()), 1);
  for (std::size_t i = 0; i < values.size(); ++i) atoms(static_cast<Eigen::Index>(i), 0) = values[i];
  return uniform(std::move(atoms));
}

double EmpiricalMeasure::cdf(double t) const {
  if (dim() != 1) throw InputError("cdf is defined for 1-D measures only");
  double mass = 0.0;
  for (Eigen::Index i = 0; i < size(); ++i) {
    if (atoms_(i, 0) <= t) mass += weights_[i];
  }
  return std::min(mass, 1.0);
}

}  // namespace robustlab
