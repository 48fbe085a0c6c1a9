#include "hyca/clustering.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <string>
#include <utility>

#include "hyca/error.hpp"

namespace hyca {

namespace {

double unit_draw(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Eigen::MatrixXd seed_centroids(const Eigen::Ref<const Eigen::MatrixXd>& points, int clusters,
                               std::mt19937_64& rng) {
  const Index n = points.rows();
  Eigen::MatrixXd centroids(clusters, points.cols());
  std::vector<bool> chosen(static_cast<std::size_t>(n), false);

  auto first = static_cast<Index>(unit_draw(rng) * static_cast<double>(n));
  first = std::min(first, n - 1);
  centroids.row(0) = points.row(first);
  chosen[static_cast<std::size_t>(first)] = true;

  Eigen::VectorXd nearest = (points.rowwise() - centroids.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < clusters; ++c) {
    const double total = nearest.sum();
    Index pick = -1;
    if (total > 0.0) {
      const double target = unit_draw(rng) * total;
      double cumulative = 0.0;
      for (Index i = 0; i < n; ++i) {
        cumulative += nearest[i];
        if (nearest[i] > 0.0 && cumulative > target) {
          pick = i;
          break;
        }
      }
      if (pick < 0) {
        // target landed on the rounding tail: take the last point with mass
        for (Index i = n - 1; i >= 0; --i) {
          if (nearest[i] > 0.0) {
            pick = i;
            break;
          }
        }
      }
    } else {
      // every point coincides with a centroid already
      for (Index i = 0; i < n; ++i) {
        if (!chosen[static_cast<std::size_t>(i)]) {
          pick = i;
          break;
        }
      }
    }
    centroids.row(c) = points.row(pick);
    chosen[static_cast<std::size_t>(pick)] = true;
    nearest = nearest.cwiseMin((points.rowwise() - centroids.row(c)).rowwise().squaredNorm());
  }
  return centroids;
}

int nearest_centroid(const Eigen::Ref<const Eigen::MatrixXd>& centroids,
                     const Eigen::Ref<const Eigen::RowVectorXd>& point, double* distance) {
  int best = 0;
  double best_distance = (centroids.row(0) - point).squaredNorm();
  for (Index c = 1; c < centroids.rows(); ++c) {
    const double d = (centroids.row(c) - point).squaredNorm();
    if (d < best_distance) {
      best_distance = d;
      best = static_cast<int>(c);
    }
  }
  if (distance) *distance = best_distance;
  return best;
}

double comb2(double n) { return n * (n - 1.0) / 2.0; }

}  // namespace

std::vector<std::vector<Index>> ClusterAssignment::members() const {
  std::vector<std::vector<Index>> out(static_cast<std::size_t>(num_clusters));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out[static_cast<std::size_t>(labels[i])].push_back(static_cast<Index>(i));
  }
  return out;
}

double clustering_inertia(const Eigen::Ref<const Eigen::MatrixXd>& points,
                          std::span<const int> labels,
                          const Eigen::Ref<const Eigen::MatrixXd>& centroids) {
  double total = 0.0;
  for (Index i = 0; i < points.rows(); ++i) {
    total += (points.row(i) - centroids.row(labels[static_cast<std::size_t>(i)])).squaredNorm();
  }
  return total;
}

ClusterAssignment kmeans(const Eigen::Ref<const Eigen::MatrixXd>& points, int clusters,
                         std::uint64_t seed, const KMeansOptions& options) {
  const Index n = points.rows();
  if (clusters < 1) throw ValidationError("k-means needs at least one cluster");
  if (clusters > n) {
    throw ValidationError("k-means asked for " + std::to_string(clusters) + " clusters over " +
                          std::to_string(n) + " points");
  }
  if (options.max_iter < 1) throw ValidationError("k-means max_iter must be >= 1");
  if (!(options.tol >= 0.0)) throw ValidationError("k-means tol must be >= 0");
  if (!points.allFinite()) throw ValidationError("k-means input contains non-finite points");

  std::mt19937_64 rng(seed);
  ClusterAssignment out;
  out.num_clusters = clusters;
  out.seed = seed;
  out.options = options;
  out.centroids = seed_centroids(points, clusters, rng);
  out.labels.assign(static_cast<std::size_t>(n), 0);

  std::vector<double> distance(static_cast<std::size_t>(n));
  std::vector<Index> counts(static_cast<std::size_t>(clusters));
  for (int iter = 1; iter <= options.max_iter; ++iter) {
    out.iterations = iter;
    std::fill(counts.begin(), counts.end(), 0);
    for (Index i = 0; i < n; ++i) {
      const auto idx = static_cast<std::size_t>(i);
      out.labels[idx] = nearest_centroid(out.centroids, points.row(i), &distance[idx]);
      ++counts[static_cast<std::size_t>(out.labels[idx])];
    }

    for (int c = 0; c < clusters; ++c) {
      if (counts[static_cast<std::size_t>(c)] != 0) continue;
      Index donor = -1;
      for (Index i = 0; i < n; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        if (counts[static_cast<std::size_t>(out.labels[idx])] < 2) continue;
        if (donor < 0 || distance[idx] > distance[static_cast<std::size_t>(donor)]) donor = i;
      }
      const auto d = static_cast<std::size_t>(donor);
      --counts[static_cast<std::size_t>(out.labels[d])];
      out.labels[d] = c;
      counts[static_cast<std::size_t>(c)] = 1;
      distance[d] = 0.0;
      out.centroids.row(c) = points.row(donor);
    }

    out.inertia_history.push_back(clustering_inertia(points, out.labels, out.centroids));

    Eigen::MatrixXd updated = Eigen::MatrixXd::Zero(clusters, points.cols());
    for (Index i = 0; i < n; ++i) updated.row(out.labels[static_cast<std::size_t>(i)]) += points.row(i);
    for (int c = 0; c < clusters; ++c) {
      updated.row(c) /= static_cast<double>(counts[static_cast<std::size_t>(c)]);
    }
    const double shift = (updated - out.centroids).rowwise().norm().maxCoeff();
    out.centroids = std::move(updated);
    if (shift <= options.tol) break;
  }

  out.inertia = clustering_inertia(points, out.labels, out.centroids);
  out.inertia_history.push_back(out.inertia);
  return out;
}

double adjusted_rand_index(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) {
    throw ValidationError("ARI inputs differ in length (" + std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()) + ")");
  }
  if (a.size() < 2) throw ValidationError("ARI needs at least two labelled items");

  std::map<std::pair<int, int>, double> table;
  std::map<int, double> rows;
  std::map<int, double> cols;
  for (std::size_t i = 0; i < a.size(); ++i) {
    table[{a[i], b[i]}] += 1.0;
    rows[a[i]] += 1.0;
    cols[b[i]] += 1.0;
  }
  double index = 0.0;
  for (const auto& [key, count] : table) index += comb2(count);
  double sum_rows = 0.0;
  for (const auto& [key, count] : rows) sum_rows += comb2(count);
  double sum_cols = 0.0;
  for (const auto& [key, count] : cols) sum_cols += comb2(count);

  const double expected = sum_rows * sum_cols / comb2(static_cast<double>(a.size()));
  const double maximum = 0.5 * (sum_rows + sum_cols);
  if (maximum == expected) return 1.0;
  return (index - expected) / (maximum - expected);
}

}  // namespace hyca
