#ifndef HYCA_DYNAMICS_HPP
#define HYCA_DYNAMICS_HPP

#include <array>
#include <string>

#include <Eigen/Dense>

#include "hyca/error.hpp"
#include "hyca/trajectory.hpp"

namespace hyca {

/// Denominator guard for the descriptor ratios.
inline constexpr double kDescriptorEpsilon = 1e-12;
inline constexpr Index kDefaultProbeWindow = 8;
inline constexpr Index kDescriptorSize = 5;

/// Iterated forward differences of the given order.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> finite_differences(
    const Eigen::MatrixBase<Derived>& series, Index order) {
  using Vector = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>;
  if (order < 1) throw ValidationError("difference order must be positive");
  if (order >= series.size()) {
    throw ValidationError("difference order " + std::to_string(order) +
                          " needs more than " + std::to_string(series.size()) + " samples");
  }
  Vector out = series;
  for (Index k = 0; k < order; ++k) {
    const Index n = out.size() - 1;
    out = (out.tail(n) - out.head(n)).eval();
  }
  return out;
}

/// Per-dimension dynamics fingerprint. Every field is invariant to positive
/// scaling and to adding a constant to the series.
struct DescriptorVector {
  double curvature_ratio = 0.0;  // sum|d2| / (sum|d1| + eps)
  double jerk_ratio = 0.0;       // sum|d3| / (sum|d1| + eps)
  double sign_flip_rate = 0.0;   // fraction of adjacent d1 pairs with opposite signs
  double variability = 0.0;      // std(d1) / (mean|d1| + eps)
  double total_variation = 0.0;  // sum|d2| / (max - min + eps)

  Eigen::Matrix<double, kDescriptorSize, 1> as_vector() const {
    Eigen::Matrix<double, kDescriptorSize, 1> v;
    v << curvature_ratio, jerk_ratio, sign_flip_rate, variability, total_variation;
    return v;
  }
};

inline constexpr std::array<const char*, kDescriptorSize> kDescriptorFieldNames = {
    "curvature_ratio", "jerk_ratio", "sign_flip_rate", "variability", "tv"};

/// Descriptor of series[start, start + window). Throws when window < 4 or
/// the window runs past the end of the series.
DescriptorVector descriptor(const Eigen::Ref<const Eigen::VectorXd>& series, Index window,
                            Index start = 0);

/// D x 5 matrix of descriptors, optionally z-scored per column.
struct DescriptorMatrix {
  Eigen::MatrixXd rows;
  bool standardized = false;
  Eigen::VectorXd means;  // raw column statistics, filled when standardized
  Eigen::VectorXd stds;

  Index num_dims() const { return rows.rows(); }
};

/// Population z-score per column; columns with no spread become zeros.
void standardize_columns(DescriptorMatrix& matrix);

DescriptorMatrix build_descriptor_matrix(const TrajectoryTensor& traj,
                                         Index window = kDefaultProbeWindow,
                                         bool standardize = true, Index start = 0);

std::string descriptor_matrix_to_csv(const DescriptorMatrix& matrix);

}  // namespace hyca

#endif  // HYCA_DYNAMICS_HPP
