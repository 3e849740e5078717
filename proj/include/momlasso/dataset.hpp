#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "momlasso/errors.hpp"

namespace momlasso {

using Index = Eigen::Index;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Ground truth kept alongside synthetic data.
template <typename Scalar>
struct BasicGroundTruth {
  VectorX<Scalar> beta_star;
  Scalar sigma_star = 0;
  std::vector<Eigen::Index> outlier_indices;  // sorted, 0-based
};

/// Observations x (n x d) and responses y (n).
template <typename Scalar>
struct BasicDataset {
  MatrixX<Scalar> x;
  VectorX<Scalar> y;
  std::optional<BasicGroundTruth<Scalar>> truth;

  Eigen::Index n() const noexcept { return x.rows(); }
  Eigen::Index d() const noexcept { return x.cols(); }

  void validate() const {
    if (x.rows() != y.size()) throw InvalidInput("design and response sizes differ");
    if (truth && truth->beta_star.size() != x.cols()) throw InvalidInput("ground truth has wrong dimension");
  }
};

using GroundTruth = BasicGroundTruth<double>;
using Dataset = BasicDataset<double>;

/// Rows of a dataset, in the given order. Ground truth outlier indices are
/// remapped to positions in the subset.
Dataset subset_rows(const Dataset& data, const std::vector<Eigen::Index>& rows);

// CSV interchange: header `y,x1,...,xd`, one sample per line, comma separated,
// '.' decimal point, no quoting. Values are written in shortest round-trip form.
Dataset read_dataset_csv(std::istream& in);
Dataset read_dataset_csv_file(const std::string& path);
void write_dataset_csv(std::ostream& out, const Dataset& data);
void write_dataset_csv_file(const std::string& path, const Dataset& data);

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);

/// Strict parse of a whole field; throws InvalidInput on garbage.
double parse_double(std::string_view field);

}  // namespace momlasso
