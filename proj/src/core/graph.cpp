#include "dimscope/graph.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <random>

#include "dimscope/error.hpp"

namespace dimscope {

namespace {

// Unbiased draw in [0, bound) that does not depend on the standard library's
// distribution implementation.
std::uint64_t boundedDraw(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return x % bound;
}

class Bitset {
 public:
  explicit Bitset(std::size_t bits = 0) : words_((bits + 63) / 64, 0) {}

  void set(std::size_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }
  void reset(std::size_t i) { words_[i / 64] &= ~(std::uint64_t{1} << (i % 64)); }
  bool test(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1; }

  bool none() const {
    return std::all_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w == 0; });
  }

  std::size_t countAnd(const Bitset& other) const {
    std::size_t n = 0;
    for (std::size_t w = 0; w < words_.size(); ++w) n += std::popcount(words_[w] & other.words_[w]);
    return n;
  }

  Bitset operator&(const Bitset& other) const {
    Bitset r = *this;
    for (std::size_t w = 0; w < words_.size(); ++w) r.words_[w] &= other.words_[w];
    return r;
  }

  Bitset andNot(const Bitset& other) const {
    Bitset r = *this;
    for (std::size_t w = 0; w < words_.size(); ++w) r.words_[w] &= ~other.words_[w];
    return r;
  }

  Bitset operator|(const Bitset& other) const {
    Bitset r = *this;
    for (std::size_t w = 0; w < words_.size(); ++w) r.words_[w] |= other.words_[w];
    return r;
  }

  template <typename F>
  void forEach(F&& f) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t bits = words_[w];
      while (bits != 0) {
        f(w * 64 + static_cast<std::size_t>(std::countr_zero(bits)));
        bits &= bits - 1;
      }
    }
  }

 private:
  std::vector<std::uint64_t> words_;
};

class CliqueEnumerator {
 public:
  CliqueEnumerator(std::vector<Bitset> adjacency, std::size_t cap)
      : adjacency_(std::move(adjacency)), cap_(cap) {}

  std::vector<std::vector<std::size_t>> run() {
    const std::size_t n = adjacency_.size();
    Bitset p(n);
    for (std::size_t v = 0; v < n; ++v) p.set(v);
    std::vector<std::size_t> r;
    expand(r, p, Bitset(n));
    return std::move(found_);
  }

 private:
  void expand(std::vector<std::size_t>& r, Bitset p, Bitset x) {
    if (p.none()) {
      if (x.none() && r.size() >= 2) {
        if (found_.size() == cap_) {
          throw Error(ErrorCode::CliqueExplosion,
                      "more than " + std::to_string(cap_) +
                          " maximal cliques; lower d_select to reduce them");
        }
        found_.push_back(r);
      }
      return;
    }
    // Tomita pivot: the vertex of P u X with the most neighbours in P.
    std::size_t pivot = 0;
    std::size_t best = 0;
    bool havePivot = false;
    (p | x).forEach([&](std::size_t u) {
      const std::size_t c = p.countAnd(adjacency_[u]);
      if (!havePivot || c > best) {
        pivot = u;
        best = c;
        havePivot = true;
      }
    });
    const Bitset candidates = p.andNot(adjacency_[pivot]);
    candidates.forEach([&](std::size_t v) {
      r.push_back(v);
      expand(r, p & adjacency_[v], x & adjacency_[v]);
      r.pop_back();
      p.reset(v);
      x.set(v);
    });
  }

  std::vector<Bitset> adjacency_;
  std::size_t cap_;
  std::vector<std::vector<std::size_t>> found_;
};

bool contains(const DimSet& set, std::size_t dim) {
  return std::binary_search(set.begin(), set.end(), dim);
}

}  // namespace

void GraphParams::validate() const {
  if (!std::isfinite(dSelect) || dSelect < 0.0) {
    throw ValidationError("dSelect", "must be a finite value >= 0");
  }
  if (!std::isfinite(dRemove) || dRemove < 0.0) {
    throw ValidationError("dRemove", "must be a finite value >= 0");
  }
  if (dRemove > 0.0 && !(dRemove < dSelect)) {
    throw ValidationError("dRemove", "must be smaller than dSelect");
  }
  for (std::size_t dim : forcedInclude) {
    if (forcedExclude.count(dim) != 0) {
      throw ValidationError("forcedInclude",
                            "dim " + std::to_string(dim) + " is also forcibly excluded");
    }
  }
  if (cliqueCap == 0) throw ValidationError("cliqueCap", "must be >= 1");
}

SamplingResult sampleDimensions(const DistanceMatrix& dm, const GraphParams& params) {
  params.validate();
  const std::size_t n = dm.size();
  SamplingResult result;

  std::vector<std::size_t> forced;
  std::vector<std::size_t> others;
  for (std::size_t j = 0; j < n; ++j) {
    if (!dm.defined(j) || params.forcedExclude.count(j) != 0) {
      result.excluded.push_back(j);
    } else if (params.forcedInclude.count(j) != 0) {
      forced.push_back(j);
    } else {
      others.push_back(j);
    }
  }

  std::mt19937_64 rng(params.samplingSeed);
  for (std::size_t i = others.size(); i > 1; --i) {
    std::swap(others[i - 1], others[boundedDraw(rng, i)]);
  }

  std::vector<std::size_t> visible = forced;
  for (std::size_t dim : others) {
    std::size_t representative = 0;
    double nearest = params.dRemove;
    bool hide = false;
    for (std::size_t v : visible) {
      const double d = dm(dim, v);
      if (d < nearest || (hide && d == nearest && v < representative)) {
        nearest = d;
        representative = v;
        hide = true;
      }
    }
    if (hide) {
      result.hidden.emplace(dim, representative);
    } else {
      visible.push_back(dim);
    }
  }
  std::sort(visible.begin(), visible.end());
  result.visible = std::move(visible);
  return result;
}

DimensionGraph buildGraph(const DistanceMatrix& dm, const GraphParams& params) {
  auto sampled = sampleDimensions(dm, params);
  DimensionGraph graph;
  graph.visible = std::move(sampled.visible);
  graph.hidden = std::move(sampled.hidden);
  graph.excluded = std::move(sampled.excluded);
  for (std::size_t a = 0; a < graph.visible.size(); ++a) {
    for (std::size_t b = a + 1; b < graph.visible.size(); ++b) {
      const std::size_t j = graph.visible[a];
      const std::size_t k = graph.visible[b];
      if (dm(j, k) < params.dSelect) graph.edges.emplace_back(j, k);
    }
  }
  return graph;
}

std::vector<DimSet> maximalCliques(const DimensionGraph& graph, std::size_t cap) {
  const std::size_t n = graph.visible.size();
  auto local = [&](std::size_t dim) {
    return static_cast<std::size_t>(
        std::lower_bound(graph.visible.begin(), graph.visible.end(), dim) - graph.visible.begin());
  };
  std::vector<Bitset> adjacency(n, Bitset(n));
  for (const auto& [j, k] : graph.edges) {
    const std::size_t a = local(j);
    const std::size_t b = local(k);
    if (a >= n || b >= n || graph.visible[a] != j || graph.visible[b] != k) {
      throw Error(ErrorCode::InvalidArgument, "edge references a dim that is not visible");
    }
    adjacency[a].set(b);
    adjacency[b].set(a);
  }

  auto found = CliqueEnumerator(std::move(adjacency), cap).run();
  std::vector<DimSet> cliques;
  cliques.reserve(found.size());
  for (auto& members : found) {
    DimSet clique;
    for (std::size_t v : members) clique.push_back(graph.visible[v]);
    std::sort(clique.begin(), clique.end());
    cliques.push_back(std::move(clique));
  }
  std::sort(cliques.begin(), cliques.end(), [](const DimSet& l, const DimSet& r) {
    if (l.size() != r.size()) return l.size() > r.size();
    return l < r;
  });
  return cliques;
}

DimSet PanelGroup::dims() const {
  DimSet all;
  for (const auto& segment : segments) all.insert(all.end(), segment.begin(), segment.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  return all;
}

std::vector<PanelGroup> mergePanels(const std::vector<DimSet>& cliques) {
  std::vector<PanelGroup> panels;
  for (std::size_t id = 0; id < cliques.size(); ++id) {
    const DimSet& clique = cliques[id];
    bool merged = false;
    for (auto& panel : panels) {
      const DimSet dims = panel.dims();
      DimSet shared;
      std::set_intersection(dims.begin(), dims.end(), clique.begin(), clique.end(),
                            std::back_inserter(shared));
      if (shared.size() != 1) continue;
      const std::size_t junction = shared.front();
      if (std::find(panel.junctions.begin(), panel.junctions.end(), junction) !=
          panel.junctions.end()) {
        continue;
      }
      if (contains(panel.segments.back(), junction)) {
        panel.segments.push_back(clique);
        panel.junctions.push_back(junction);
        panel.cliqueIds.push_back(id);
      } else if (contains(panel.segments.front(), junction)) {
        panel.segments.insert(panel.segments.begin(), clique);
        panel.junctions.insert(panel.junctions.begin(), junction);
        panel.cliqueIds.insert(panel.cliqueIds.begin(), id);
      } else {
        continue;
      }
      merged = true;
      break;
    }
    if (!merged) panels.push_back(PanelGroup{{id}, {clique}, {}});
  }
  return panels;
}

}  // namespace dimscope
