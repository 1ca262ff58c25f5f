#include <doctest.h>

#include <cmath>
#include <random>

#include "dimscope/clustering.hpp"
#include "dimscope/error.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace dimscope;

namespace {

FeatureMatrix matrixOf(const std::vector<std::vector<double>>& rows) {
  FeatureMatrix f;
  f.rows = rows.size();
  f.cols = rows[0].size();
  for (const auto& r : rows) f.values.insert(f.values.end(), r.begin(), r.end());
  return f;
}

double inertiaOf(const FeatureMatrix& f, const ClusterAssignment& a) {
  double total = 0;
  for (std::size_t i = 0; i < f.rows; ++i) {
    for (std::size_t c = 0; c < f.cols; ++c) {
      const double diff = f(i, c) - a.centroids[a.labels[i]][c];
      total += diff * diff;
    }
  }
  return total;
}

}  // namespace

TEST_CASE("k = 1: centroid is the mean, inertia is the total scatter") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<std::vector<double>> rows(30, std::vector<double>(3));
  for (auto& r : rows) {
    for (double& v : r) v = u(rng);
  }
  const auto f = matrixOf(rows);
  const auto a = kmeans(f, {1, 5});
  std::vector<double> mean(3, 0.0);
  for (const auto& r : rows) {
    for (int c = 0; c < 3; ++c) mean[c] += r[c] / 30;
  }
  double scatter = 0;
  for (const auto& r : rows) {
    for (int c = 0; c < 3; ++c) scatter += (r[c] - mean[c]) * (r[c] - mean[c]);
  }
  for (int c = 0; c < 3; ++c) CHECK(a.centroids[0][c] == doctest::Approx(mean[c]).epsilon(1e-12));
  CHECK(a.inertia == doctest::Approx(scatter).epsilon(1e-12));
  for (int l : a.labels) CHECK(l == 0);
}

TEST_CASE("two separated blobs are split exactly") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g(0, 0.05);
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 100; ++i) {
    const double centre = i < 50 ? 0.0 : 1.0;
    rows.push_back({centre + g(rng), centre + g(rng)});
  }
  const auto f = matrixOf(rows);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto a = kmeans(f, {2, seed});
    for (int i = 1; i < 50; ++i) CHECK(a.labels[i] == a.labels[0]);
    for (int i = 51; i < 100; ++i) CHECK(a.labels[i] == a.labels[50]);
    CHECK(a.labels[0] != a.labels[50]);
  }
}

TEST_CASE("tiny instances: never beats the exhaustive optimum, inertia non-increasing") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 100; ++t) {
    const std::size_t m = 2 + rng() % 7;
    std::vector<std::vector<double>> rows(m, std::vector<double>(2));
    for (auto& r : rows) {
      for (double& v : r) v = u(rng);
    }
    const auto f = matrixOf(rows);
    const auto a = kmeans(f, {2, rng()});
    CHECK(a.inertia >= oracle::bestTwoPartitionInertia(rows) - 1e-12);
    for (std::size_t i = 1; i < a.inertiaHistory.size(); ++i) {
      CHECK(a.inertiaHistory[i] <= a.inertiaHistory[i - 1] + 1e-12);
    }
    CHECK(a.inertia == doctest::Approx(inertiaOf(f, a)).epsilon(1e-12));
  }
}

TEST_CASE("assignment invariants, convergence and determinism") {
  const Dataset d = fixture::plantedGroups(4, 150, 6, 3, 0.5);
  const auto f = clusteringFeatures(d);
  for (std::size_t k : {2u, 3u, 4u, 7u}) {
    const auto a = kmeans(f, {k, 11});
    const auto b = kmeans(f, {k, 11});
    CHECK(a.labels == b.labels);
    CHECK(a.inertia == b.inertia);
    CHECK(a.k == k);
    CHECK(a.seed == 11);
    CHECK(a.inertia >= 0.0);
    REQUIRE(a.labels.size() == f.rows);
    for (int l : a.labels) {
      CHECK(l >= 0);
      CHECK(l < static_cast<int>(k));
    }
    // Each centroid is the mean of its members at convergence.
    for (std::size_t c = 0; c < k; ++c) {
      std::vector<double> mean(f.cols, 0.0);
      std::size_t count = 0;
      for (std::size_t i = 0; i < f.rows; ++i) {
        if (a.labels[i] != static_cast<int>(c)) continue;
        ++count;
        for (std::size_t j = 0; j < f.cols; ++j) mean[j] += f(i, j);
      }
      if (count == 0) continue;
      for (std::size_t j = 0; j < f.cols; ++j) {
        CHECK(std::isfinite(a.centroids[c][j]));
        CHECK(std::abs(mean[j] / count - a.centroids[c][j]) <= 1e-6);
      }
    }
  }
}

TEST_CASE("invalid k") {
  const auto f = matrixOf({{0.0}, {1.0}, {2.0}});
  for (std::size_t k : {0u, 4u}) {
    try {
      kmeans(f, {k, 1});
      FAIL("expected InvalidK");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InvalidK);
    }
  }
  CHECK(kmeans(f, {3, 1}).inertia == 0.0);
}

TEST_CASE("duplicate points with k larger than distinct values") {
  const auto f = matrixOf({{0.5}, {0.5}, {0.5}, {0.5}});
  const auto a = kmeans(f, {3, 2});
  CHECK(a.inertia == 0.0);
  CHECK(a.labels.size() == 4);
}

TEST_CASE("features: normalized, constant dims dropped, missing imputed by the dim mean") {
  const Dataset d = fixture::fromColumns({{0, 10, kMissing, 5}, {3, 3, 3, 3}, {1, 2, 3, 4}});
  const auto f = clusteringFeatures(d);
  CHECK(f.rows == 4);
  CHECK(f.cols == 2);
  CHECK(f(0, 0) == 0.0);
  CHECK(f(1, 0) == 1.0);
  CHECK(f(2, 0) == doctest::Approx(0.5));  // mean of {0, 1, 0.5}
  CHECK(f(3, 1) == 1.0);
}
