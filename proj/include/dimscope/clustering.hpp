#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "dimscope/dataset.hpp"

namespace dimscope {

// Row-major item x feature matrix.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  double operator()(std::size_t r, std::size_t c) const noexcept { return values[r * cols + c]; }
  double& operator()(std::size_t r, std::size_t c) noexcept { return values[r * cols + c]; }
};

// Normalized values of every non-constant numeric dim; missing cells take the
// dim's normalized mean.
FeatureMatrix clusteringFeatures(const Dataset& dataset);

struct KMeansOptions {
  std::size_t k = 4;
  std::uint64_t seed = 1;
  int maxIter = 300;
  double tol = 1e-6;
};

struct ClusterAssignment {
  std::size_t k = 0;
  std::vector<int> labels;                 // per item, in [0, k)
  std::vector<std::vector<double>> centroids;
  double inertia = 0.0;                    // against the final centroids
  std::uint64_t seed = 0;
  int iterations = 0;
  std::vector<double> inertiaHistory;      // after each assignment step
};

// k-means++ seeding then Lloyd iterations until the largest centroid shift is
// below tol. Empty clusters are re-seeded with the point farthest from its
// centroid. Throws InvalidK unless 1 <= k <= rows.
ClusterAssignment kmeans(const FeatureMatrix& points, const KMeansOptions& options);

}  // namespace dimscope
