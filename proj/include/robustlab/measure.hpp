#pragma once

#include <vector>

#include <Eigen/Dense>

#include "robustlab/rkhs.hpp"

namespace robustlab {

/// Weighted atoms; one atom per row of `atoms`. Weights are nonnegative and
/// sum to 1 within 1e-12.
class EmpiricalMeasure {
 public:
  EmpiricalMeasure(PointSet atoms, Eigen::VectorXd weights);

  /// Uniform weights 1/n.
  static EmpiricalMeasure uniform(PointSet atoms);
  /// Uniform measure over scalar values.
  static EmpiricalMeasure uniform(const std::vector<double>& values);

  const PointSet& atoms() const { return atoms_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  Eigen::Index size() const { return atoms_.rows(); }
  Eigen::Index dim() const { return atoms_.cols(); }

  /// Mass at or below `t`; only for 1-D measures.
  double cdf(double t) const;

 private:
  PointSet atoms_;
  Eigen::VectorXd weights_;
};

}  // namespace robustlab
