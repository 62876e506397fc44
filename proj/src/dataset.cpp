#include "robustlab/dataset.hpp"

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "robustlab/errors.hpp"

namespace robustlab {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    out.push_back(cell);
  }
  return out;
}

}  // namespace

Dataset::Dataset(PointSet x_, Eigen::VectorXd y_) : x(std::move(x_)), y(std::move(y_)) {
  if (x.rows() == 0) throw InputError("dataset needs at least one sample");
  if (x.rows() != y.size()) throw InputError("dataset input and response counts differ");
  if (x.cols() == 0) throw InputError("dataset inputs need at least one coordinate");
}

Point Dataset::z(Eigen::Index i) const {
  Point out(dim() + 1);
  out.head(dim()) = x.row(i).transpose();
  out[dim()] = y[i];
  return out;
}

PointSet Dataset::joint() const {
  PointSet out(size(), dim() + 1);
  out.leftCols(dim()) = x;
  out.col(dim()) = y;
  return out;
}

Dataset dataset_from_joint(const PointSet& joint) {
  if (joint.cols() < 2) throw InputError("joint points need an input and a response coordinate");
  const Eigen::Index n = joint.cols() - 1;
  return {joint.leftCols(n), joint.col(n)};
}

EmpiricalMeasure empirical_measure(const Dataset& data) { return EmpiricalMeasure::uniform(data.joint()); }

void write_dataset_csv(std::ostream& out, const Dataset& data) {
  for (Eigen::Index d = 0; d < data.dim(); ++d) out << "x_" << (d + 1) << ',';
  out << "y\n";
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    for (Eigen::Index d = 0; d < data.dim(); ++d) out << fmt::format("{},", data.x(i, d));
    out << fmt::format("{}\n", data.y[i]);
  }
}

void write_dataset_csv(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");
  write_dataset_csv(out, data);
}

Dataset read_dataset_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("dataset CSV is empty");
  const auto header = split_csv_line(line);
  if (header.size() < 2 || header.back() != "y") {
    throw InputError("dataset CSV header must be x_1,...,x_n,y");
  }
  for (std::size_t d = 0; d + 1 < header.size(); ++d) {
    if (header[d] != "x_" + std::to_string(d + 1)) throw InputError("dataset CSV header must be x_1,...,x_n,y");
  }
  const std::size_t cols = header.size();
  std::vector<double> values;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != cols) throw InputError("dataset CSV row " + std::to_string(rows + 2) + " has wrong column count");
    for (const auto& c : cells) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(c, &used);
      } catch (const std::exception&) {
        throw InputError("dataset CSV: cannot parse '" + c + "'");
      }
      if (used != c.size()) throw InputError("dataset CSV: cannot parse '" + c + "'");
      values.push_back(v);
    }
    ++rows;
  }
  if (rows == 0) throw InputError("dataset CSV has no samples");
  PointSet joint(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) joint(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = values[r * cols + c];
  }
  return dataset_from_joint(joint);
}

Dataset read_dataset_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  return read_dataset_csv(in);
}

}  // namespace robustlab
