#pragma once

#include <filesystem>
#include <iosfwd>

#include <Eigen/Dense>

#include "robustlab/measure.hpp"
#include "robustlab/rkhs.hpp"

namespace robustlab {

/// Samples z^i = (x^i, y^i). Inputs one per row of `x`.
struct Dataset {
  PointSet x;
  Eigen::VectorXd y;

  Dataset() = default;
  Dataset(PointSet x_, Eigen::VectorXd y_);

  Eigen::Index size() const { return x.rows(); }
  Eigen::Index dim() const { return x.cols(); }

  /// Row i as the joint point (x^i, y^i).
  Point z(Eigen::Index i) const;
  /// All samples as joint points, one per row.
  PointSet joint() const;
};

/// Split joint atoms (x_1..x_n, y) back into a dataset.
Dataset dataset_from_joint(const PointSet& joint);

/// Uniform empirical measure over the joint points.
EmpiricalMeasure empirical_measure(const Dataset& data);

/// CSV with header `x_1,...,x_n,y`, one sample per row, shortest round-trip
/// double formatting.
void write_dataset_csv(std::ostream& out, const Dataset& data);
void write_dataset_csv(const std::filesystem::path& path, const Dataset& data);
Dataset read_dataset_csv(std::istream& in);
Dataset read_dataset_csv(const std::filesystem::path& path);

}  // namespace robustlab
