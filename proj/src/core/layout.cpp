#include "dimscope/layout.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "dimscope/error.hpp"

namespace dimscope {

namespace {

Layout2D embed(const Eigen::MatrixXd& distances) {
  const Eigen::Index n = distances.rows();
  if (n < 2) throw Error(ErrorCode::DegenerateLayout, "MDS needs at least 2 dims");

  const Eigen::MatrixXd squared = distances.array().square().matrix();
  const Eigen::VectorXd rowMean = squared.rowwise().mean();
  const double grandMean = rowMean.mean();
  Eigen::MatrixXd centred(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      centred(i, j) = -0.5 * (squared(i, j) - rowMean(i) - rowMean(j) + grandMean);
    }
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(centred);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::DegenerateLayout, "eigendecomposition failed");
  }
  // Eigenvalues come back ascending. Values within rounding noise of zero are
  // dropped so that rank-1 inputs stay exactly on a line.
  const double noise = 1e-12 * std::max(std::abs(solver.eigenvalues()(n - 1)), 1.0) * static_cast<double>(n);
  Layout2D layout;
  layout.embedding.assign(static_cast<std::size_t>(n), Point2{0.0, 0.0});
  for (int axis = 0; axis < 2; ++axis) {
    const Eigen::Index column = n - 1 - axis;
    if (column < 0) break;
    const double lambda = solver.eigenvalues()(column);
    const double scale = lambda > noise ? std::sqrt(lambda) : 0.0;
    Eigen::VectorXd coords = solver.eigenvectors().col(column) * scale;
    Eigen::Index largest = 0;
    for (Eigen::Index i = 1; i < n; ++i) {
      if (std::abs(coords(i)) > std::abs(coords(largest)) + 1e-12) largest = i;
    }
    if (coords(largest) < 0.0) coords = -coords;
    for (Eigen::Index i = 0; i < n; ++i) layout.embedding[i][axis] = coords(i) + 0.0;
  }

  double residual = 0.0;
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double dx = layout.embedding[i][0] - layout.embedding[j][0];
      const double dy = layout.embedding[i][1] - layout.embedding[j][1];
      const double diff = distances(i, j) - std::hypot(dx, dy);
      residual += diff * diff;
      total += distances(i, j) * distances(i, j);
    }
  }
  layout.stress = total > 0.0 ? std::sqrt(residual / total) : 0.0;

  // Uniform scale into the unit square with a 5% margin, centred.
  double lo[2] = {layout.embedding[0][0], layout.embedding[0][1]};
  double hi[2] = {lo[0], lo[1]};
  for (const auto& p : layout.embedding) {
    for (int a = 0; a < 2; ++a) {
      lo[a] = std::min(lo[a], p[a]);
      hi[a] = std::max(hi[a], p[a]);
    }
  }
  const double extent = std::max(hi[0] - lo[0], hi[1] - lo[1]);
  layout.positions.reserve(layout.embedding.size());
  for (const auto& p : layout.embedding) {
    Point2 q{0.5, 0.5};
    if (extent > 0.0) {
      for (int a = 0; a < 2; ++a) {
        q[a] = 0.5 + 0.9 * (p[a] - 0.5 * (lo[a] + hi[a])) / extent;
      }
    }
    layout.positions.push_back(q);
  }
  return layout;
}

}  // namespace

Layout2D classicalMds(const std::vector<double>& distances, std::size_t n) {
  if (distances.size() != n * n) {
    throw Error(ErrorCode::InvalidArgument, "distance matrix must be n x n");
  }
  Eigen::MatrixXd d(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) d(i, j) = distances[i * n + j];
  }
  auto layout = embed(d);
  layout.dims.resize(n);
  for (std::size_t i = 0; i < n; ++i) layout.dims[i] = i;
  return layout;
}

Layout2D classicalMds(const DistanceMatrix& dm, const DimSet& dims) {
  const auto n = static_cast<Eigen::Index>(dims.size());
  Eigen::MatrixXd d(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      d(i, j) = i == j ? 0.0 : dm.distanceOrMax(dims[i], dims[j]);
    }
  }
  auto layout = embed(d);
  layout.dims = dims;
  return layout;
}

Layout2D layoutDims(const DistanceMatrix& dm, const DimSet& dims, LayoutStrategy) {
  if (dims.size() >= 2) return classicalMds(dm, dims);
  Layout2D layout;
  layout.dims = dims;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    layout.embedding.push_back({0.0, 0.0});
    layout.positions.push_back({0.5, 0.5});
  }
  return layout;
}

}  // namespace dimscope
