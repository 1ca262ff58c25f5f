#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "dimscope/metrics.hpp"

namespace dimscope {

using DimSet = std::vector<std::size_t>;  // sorted ascending, no duplicates

struct GraphParams {
  double dSelect = 0.2;
  double dRemove = 0.0;  // 0 disables sampling
  std::set<std::size_t> forcedInclude;
  std::set<std::size_t> forcedExclude;
  std::uint64_t samplingSeed = 1;
  std::size_t cliqueCap = 256;

  // Requires 0 <= dRemove < dSelect (dRemove == 0 is always allowed) and
  // disjoint forced sets. Throws ValidationError naming the field.
  void validate() const;

  bool operator==(const GraphParams&) const = default;
};

struct SamplingResult {
  DimSet visible;
  std::map<std::size_t, std::size_t> hidden;  // hidden dim -> visible representative
  DimSet excluded;                            // forced out or undefined (constant) dims
};

struct DimensionGraph {
  DimSet visible;
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // (j, k), j < k, sorted
  std::map<std::size_t, std::size_t> hidden;
  DimSet excluded;
};

// Greedy pass over a seeded permutation: forced-include dims are visited first
// and always stay visible; any other dim within dRemove of an already-visible
// dim is hidden behind the nearest such dim.
SamplingResult sampleDimensions(const DistanceMatrix& dm, const GraphParams& params);

// Edge (j, k) iff both visible and d_jk < dSelect.
DimensionGraph buildGraph(const DistanceMatrix& dm, const GraphParams& params);

// Maximal cliques of size >= 2 via Bron-Kerbosch with pivoting. Each clique is
// sorted; the list is sorted by (size desc, lexicographic). Throws
// CliqueExplosion once more than `cap` cliques are found.
std::vector<DimSet> maximalCliques(const DimensionGraph& graph, std::size_t cap = 256);

// A PCP panel built from one clique or a chain of cliques joined at single
// shared dims. segments[i] and segments[i+1] share exactly junctions[i].
struct PanelGroup {
  std::vector<std::size_t> cliqueIds;   // indices into the clique list, in chain order
  std::vector<DimSet> segments;         // the cliques, in chain order
  std::vector<std::size_t> junctions;   // size == segments.size() - 1

  // Union of all segment dims, sorted.
  DimSet dims() const;
};

// Greedy pass in clique order. A clique joins an existing panel when it shares
// exactly one dim with the whole panel and that dim lies in an end segment
// without already being a junction; otherwise it opens a new panel.
std::vector<PanelGroup> mergePanels(const std::vector<DimSet>& cliques);

}  // namespace dimscope
