#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "dimscope/graph.hpp"
#include "dimscope/metrics.hpp"

namespace dimscope {

using Point2 = std::array<double, 2>;

struct Layout2D {
  DimSet dims;                    // the visible dims, ascending
  std::vector<Point2> positions;  // parallel to dims, inside [0.05, 0.95]^2
  std::vector<Point2> embedding;  // raw MDS coordinates before normalization
  double stress = 0.0;            // sqrt(sum (d - |p_i - p_j|)^2 / sum d^2), on `embedding`
};

// Strategy slot for dot placement; only classical MDS ships.
enum class LayoutStrategy { ClassicalMds };

// Classical (Torgerson) MDS: double-centre the squared distances, take the top
// two eigenpairs, scale eigenvectors by sqrt(max(lambda, 0)). Each axis is
// flipped so that its largest-magnitude coordinate is positive. Undefined
// pairwise distances are treated as the metric maximum.
// Throws DegenerateLayout for fewer than two dims.
Layout2D classicalMds(const DistanceMatrix& dm, const DimSet& dims);

// Same, on an explicit dense symmetric matrix (row-major, n x n).
Layout2D classicalMds(const std::vector<double>& distances, std::size_t n);

// Layout for any number of dims: 0 -> empty, 1 -> centred dot, else classicalMds.
Layout2D layoutDims(const DistanceMatrix& dm, const DimSet& dims,
                    LayoutStrategy strategy = LayoutStrategy::ClassicalMds);

}  // namespace dimscope
