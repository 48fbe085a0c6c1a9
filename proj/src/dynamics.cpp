#include "hyca/dynamics.hpp"

#include <cmath>

#include "hyca/io.hpp"

namespace hyca {

DescriptorVector descriptor(const Eigen::Ref<const Eigen::VectorXd>& series, Index window,
                            Index start) {
  if (window < 4) {
    throw ValidationError("probe window must be >= 4 to form third differences, got " +
                          std::to_string(window));
  }
  if (start < 0 || start + window > series.size()) {
    throw ValidationError("probe window [" + std::to_string(start) + ", " +
                          std::to_string(start + window) + ") exceeds series of length " +
                          std::to_string(series.size()));
  }
  if (!series.segment(start, window).allFinite()) {
    throw ValidationError("descriptor of a non-finite series");
  }

  const Eigen::VectorXd x = series.segment(start, window);
  const Eigen::VectorXd d1 = finite_differences(x, 1);
  const Eigen::VectorXd d2 = finite_differences(x, 2);
  const Eigen::VectorXd d3 = finite_differences(x, 3);

  const double abs_d1 = d1.cwiseAbs().sum();
  const double abs_d2 = d2.cwiseAbs().sum();
  const double abs_d3 = d3.cwiseAbs().sum();

  Index flips = 0;
  for (Index k = 0; k + 1 < d1.size(); ++k) {
    if ((d1[k] > 0.0 && d1[k + 1] < 0.0) || (d1[k] < 0.0 && d1[k + 1] > 0.0)) ++flips;
  }

  const double mean_d1 = d1.mean();
  const double std_d1 = std::sqrt((d1.array() - mean_d1).square().mean());

  DescriptorVector out;
  out.curvature_ratio = abs_d2 / (abs_d1 + kDescriptorEpsilon);
  out.jerk_ratio = abs_d3 / (abs_d1 + kDescriptorEpsilon);
  out.sign_flip_rate = static_cast<double>(flips) / static_cast<double>(d1.size() - 1);
  out.variability = std_d1 / (abs_d1 / static_cast<double>(d1.size()) + kDescriptorEpsilon);
  out.total_variation = abs_d2 / (x.maxCoeff() - x.minCoeff() + kDescriptorEpsilon);
  return out;
}

void standardize_columns(DescriptorMatrix& matrix) {
  const Index n = matrix.rows.rows();
  matrix.means = matrix.rows.colwise().mean().transpose();
  matrix.stds.resize(matrix.rows.cols());
  for (Index c = 0; c < matrix.rows.cols(); ++c) {
    auto column = matrix.rows.col(c);
    const double mean = matrix.means[c];
    const double std = std::sqrt((column.array() - mean).square().sum() / static_cast<double>(n));
    matrix.stds[c] = std;
    // Spread at rounding level counts as constant.
    if (!(std > 1e-12 * std::max(1.0, std::abs(mean)))) {
      column.setZero();
    } else {
      column = (column.array() - mean) / std;
    }
  }
  matrix.standardized = true;
}

DescriptorMatrix build_descriptor_matrix(const TrajectoryTensor& traj, Index window,
                                         bool standardize, Index start) {
  DescriptorMatrix matrix;
  matrix.rows.resize(traj.num_dims(), kDescriptorSize);
  for (Index d = 0; d < traj.num_dims(); ++d) {
    matrix.rows.row(d) = descriptor(traj.column(d), window, start).as_vector().transpose();
  }
  if (standardize) standardize_columns(matrix);
  return matrix;
}

std::string descriptor_matrix_to_csv(const DescriptorMatrix& matrix) {
  std::string out = "dim";
  for (const char* name : kDescriptorFieldNames) {
    out += ',';
    out += name;
  }
  out += '\n';
  for (Index d = 0; d < matrix.rows.rows(); ++d) {
    out += std::to_string(d);
    for (Index c = 0; c < matrix.rows.cols(); ++c) {
      out += ',';
      out += format_double(matrix.rows(d, c));
    }
    out += '\n';
  }
  return out;
}

}  // namespace hyca
