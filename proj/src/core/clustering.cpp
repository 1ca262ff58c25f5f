#include "dimscope/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "dimscope/error.hpp"

namespace dimscope {

namespace {

double unitDraw(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double squaredDistance(const FeatureMatrix& points, std::size_t row,
                       const std::vector<double>& centroid) {
  double sum = 0.0;
  for (std::size_t c = 0; c < points.cols; ++c) {
    const double diff = points(row, c) - centroid[c];
    sum += diff * diff;
  }
  return sum;
}

std::vector<double> rowOf(const FeatureMatrix& points, std::size_t row) {
  return {points.values.begin() + static_cast<std::ptrdiff_t>(row * points.cols),
          points.values.begin() + static_cast<std::ptrdiff_t>((row + 1) * points.cols)};
}

std::vector<std::vector<double>> seedPlusPlus(const FeatureMatrix& points, std::size_t k,
                                              std::mt19937_64& rng) {
  const std::size_t m = points.rows;
  std::vector<std::vector<double>> centroids;
  std::vector<bool> chosen(m, false);
  std::size_t first = static_cast<std::size_t>(unitDraw(rng) * static_cast<double>(m));
  first = std::min(first, m - 1);
  centroids.push_back(rowOf(points, first));
  chosen[first] = true;

  std::vector<double> nearest(m);
  for (std::size_t i = 0; i < m; ++i) nearest[i] = squaredDistance(points, i, centroids[0]);

  while (centroids.size() < k) {
    double total = 0.0;
    for (double d : nearest) total += d;
    std::size_t pick = m;
    if (total > 0.0) {
      double target = unitDraw(rng) * total;
      for (std::size_t i = 0; i < m; ++i) {
        if (nearest[i] <= 0.0) continue;
        pick = i;
        target -= nearest[i];
        if (target < 0.0) break;
      }
    } else {
      // All remaining points coincide with a centre.
      for (std::size_t i = 0; i < m && pick == m; ++i) {
        if (!chosen[i]) pick = i;
      }
    }
    chosen[pick] = true;
    centroids.push_back(rowOf(points, pick));
    for (std::size_t i = 0; i < m; ++i) {
      nearest[i] = std::min(nearest[i], squaredDistance(points, i, centroids.back()));
    }
  }
  return centroids;
}

double assign(const FeatureMatrix& points, const std::vector<std::vector<double>>& centroids,
              std::vector<int>& labels) {
  double inertia = 0.0;
  for (std::size_t i = 0; i < points.rows; ++i) {
    double best = std::numeric_limits<double>::infinity();
    int bestCluster = 0;
    for (std::size_t c = 0; c < centroids.size(); ++c) {
      const double d = squaredDistance(points, i, centroids[c]);
      if (d < best) {
        best = d;
        bestCluster = static_cast<int>(c);
      }
    }
    labels[i] = bestCluster;
    inertia += best;
  }
  return inertia;
}

}  // namespace

FeatureMatrix clusteringFeatures(const Dataset& dataset) {
  std::vector<std::size_t> dims;
  for (const auto& meta : dataset.numericDims()) {
    if (!meta.isConstant()) dims.push_back(meta.id);
  }
  FeatureMatrix features;
  features.rows = dataset.itemCount();
  features.cols = dims.size();
  features.values.assign(features.rows * features.cols, 0.0);
  for (std::size_t c = 0; c < dims.size(); ++c) {
    const auto& meta = dataset.numericMeta(dims[c]);
    const auto values = dataset.numeric(dims[c]);
    double sum = 0.0;
    std::size_t present = 0;
    for (double v : values) {
      if (!isMissing(v)) {
        sum += normalizeValue(meta, v);
        ++present;
      }
    }
    const double mean = present > 0 ? sum / static_cast<double>(present) : 0.5;
    for (std::size_t i = 0; i < features.rows; ++i) {
      features(i, c) = isMissing(values[i]) ? mean : normalizeValue(meta, values[i]);
    }
  }
  return features;
}

ClusterAssignment kmeans(const FeatureMatrix& points, const KMeansOptions& options) {
  if (options.k < 1 || options.k > points.rows) {
    throw Error(ErrorCode::InvalidK, "k must lie in [1, " + std::to_string(points.rows) +
                                         "], got " + std::to_string(options.k));
  }
  const std::size_t m = points.rows;
  const std::size_t k = options.k;
  std::mt19937_64 rng(options.seed);

  ClusterAssignment result;
  result.k = k;
  result.seed = options.seed;
  result.labels.assign(m, 0);
  result.centroids = seedPlusPlus(points, k, rng);

  for (int iter = 0; iter < options.maxIter; ++iter) {
    result.iterations = iter + 1;
    result.inertiaHistory.push_back(assign(points, result.centroids, result.labels));

    std::vector<std::vector<double>> next(k, std::vector<double>(points.cols, 0.0));
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t i = 0; i < m; ++i) {
      const auto c = static_cast<std::size_t>(result.labels[i]);
      ++sizes[c];
      for (std::size_t f = 0; f < points.cols; ++f) next[c][f] += points(i, f);
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (sizes[c] == 0) continue;
      for (double& v : next[c]) v /= static_cast<double>(sizes[c]);
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (sizes[c] != 0) continue;
      std::size_t farthest = 0;
      double farthestDistance = -1.0;
      for (std::size_t i = 0; i < m; ++i) {
        const auto owner = static_cast<std::size_t>(result.labels[i]);
        if (sizes[owner] <= 1) continue;
        const double d = squaredDistance(points, i, next[owner]);
        if (d > farthestDistance) {
          farthestDistance = d;
          farthest = i;
        }
      }
      if (farthestDistance < 0.0) continue;
      --sizes[static_cast<std::size_t>(result.labels[farthest])];
      result.labels[farthest] = static_cast<int>(c);
      sizes[c] = 1;
      next[c] = rowOf(points, farthest);
    }

    double shift = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      double s = 0.0;
      for (std::size_t f = 0; f < points.cols; ++f) {
        const double diff = next[c][f] - result.centroids[c][f];
        s += diff * diff;
      }
      shift = std::max(shift, std::sqrt(s));
    }
    result.centroids = std::move(next);
    if (shift < options.tol) break;
  }

  result.inertia = assign(points, result.centroids, result.labels);
  result.inertiaHistory.push_back(result.inertia);
  return result;
}

}  // namespace dimscope
