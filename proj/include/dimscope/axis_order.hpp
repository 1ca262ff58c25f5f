#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "dimscope/graph.hpp"
#include "dimscope/metrics.hpp"

namespace dimscope {

struct AxisOrder {
  std::vector<std::size_t> dims;  // axis sequence, left to right
  double cost = 0.0;              // sum of adjacent distances
};

// Dims that must sit at the ends of the path (merged-panel junctions).
struct AxisPins {
  std::optional<std::size_t> first;
  std::optional<std::size_t> last;
};

// Strategy slot for axis ordering; only the TSP heuristic ships.
enum class AxisOrderStrategy { NearestNeighbor2Opt };

// Sum of distances between consecutive axes. Undefined pairs count as the
// metric maximum.
double pathCost(const std::vector<std::size_t>& order, const DistanceMatrix& dm);

// Open-path TSP heuristic: nearest-neighbour construction from the dim with
// the smallest total distance (or from the pinned first dim), then 2-opt
// segment reversals alternated with or-opt moves (runs of up to three axes)
// until neither improves (at most 10,000 passes). Without pins
// the result is oriented so that the first dim id is below the last.
AxisOrder orderAxes(const std::vector<std::size_t>& dims, const DistanceMatrix& dm,
                    const AxisPins& pins = {});

// Orders each segment of a (possibly merged) panel with its junctions pinned
// at the shared ends, then joins the segments so every junction appears once.
AxisOrder orderPanel(const PanelGroup& panel, const DistanceMatrix& dm);

}  // namespace dimscope
