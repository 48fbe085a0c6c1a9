#ifndef HYCA_CLUSTERING_HPP
#define HYCA_CLUSTERING_HPP

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "hyca/trajectory.hpp"

namespace hyca {

inline constexpr int kDefaultClusters = 8;

struct KMeansOptions {
  int max_iter = 300;
  double tol = 1e-6;  // stop once the largest centroid shift is <= tol
};

/// Partition of D points into C clusters.
struct ClusterAssignment {
  std::vector<int> labels;
  int num_clusters = 0;
  Eigen::MatrixXd centroids;  // C x k
  double inertia = 0.0;
  std::uint64_t seed = 0;
  KMeansOptions options;
  int iterations = 0;
  /// Inertia after each assignment step, for monotone-descent checks.
  std::vector<double> inertia_history;

  std::vector<std::vector<Index>> members() const;
};

/// Lloyd iterations from k-means++ seeding. Deterministic in (points, C, seed,
/// options). Assignment ties go to the lowest cluster id; a cluster that
/// empties is refilled with the point farthest from its current centroid.
ClusterAssignment kmeans(const Eigen::Ref<const Eigen::MatrixXd>& points, int clusters,
                         std::uint64_t seed, const KMeansOptions& options = {});

/// Sum of squared distances of each point to its labelled centroid.
double clustering_inertia(const Eigen::Ref<const Eigen::MatrixXd>& points,
                          std::span<const int> labels,
                          const Eigen::Ref<const Eigen::MatrixXd>& centroids);

/// Permutation-adjusted Rand index from the contingency table. When both
/// partitions are trivial in the same way (expected index equals its maximum)
/// the result is 1.
double adjusted_rand_index(std::span<const int> a, std::span<const int> b);

}  // namespace hyca

#endif  // HYCA_CLUSTERING_HPP
