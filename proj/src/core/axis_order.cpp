#include "dimscope/axis_order.hpp"

#include <algorithm>
#include <limits>

#include "dimscope/error.hpp"

namespace dimscope {

namespace {

constexpr int kMaxPasses = 10000;
constexpr double kImprovement = 1e-12;

}  // namespace

double pathCost(const std::vector<std::size_t>& order, const DistanceMatrix& dm) {
  double cost = 0.0;
  for (std::size_t i = 1; i < order.size(); ++i) cost += dm.distanceOrMax(order[i - 1], order[i]);
  return cost;
}

AxisOrder orderAxes(const std::vector<std::size_t>& dims, const DistanceMatrix& dm,
                    const AxisPins& pins) {
  const std::size_t n = dims.size();
  auto isMember = [&](std::size_t d) { return std::find(dims.begin(), dims.end(), d) != dims.end(); };
  if ((pins.first && !isMember(*pins.first)) || (pins.last && !isMember(*pins.last))) {
    throw Error(ErrorCode::InvalidArgument, "pinned axis is not a member of the panel");
  }
  if (n > 1 && pins.first && pins.last && *pins.first == *pins.last) {
    throw Error(ErrorCode::InvalidArgument, "the same axis cannot be pinned at both ends");
  }
  if (n <= 1) return AxisOrder{dims, 0.0};

  auto d = [&](std::size_t a, std::size_t b) { return dm.distanceOrMax(a, b); };

  std::vector<std::size_t> remaining(dims);
  std::sort(remaining.begin(), remaining.end());
  if (pins.last) remaining.erase(std::find(remaining.begin(), remaining.end(), *pins.last));

  std::size_t start = 0;
  if (pins.first) {
    start = *pins.first;
  } else {
    double bestTotal = std::numeric_limits<double>::infinity();
    for (std::size_t candidate : remaining) {
      double total = 0.0;
      for (std::size_t other : dims) {
        if (other != candidate) total += d(candidate, other);
      }
      if (total < bestTotal) {
        bestTotal = total;
        start = candidate;
      }
    }
  }

  std::vector<std::size_t> path{start};
  remaining.erase(std::find(remaining.begin(), remaining.end(), start));
  while (!remaining.empty()) {
    auto nearest = remaining.begin();
    for (auto it = remaining.begin(); it != remaining.end(); ++it) {
      if (d(path.back(), *it) < d(path.back(), *nearest)) nearest = it;
    }
    path.push_back(*nearest);
    remaining.erase(nearest);
  }
  if (pins.last) path.push_back(*pins.last);

  const std::size_t lo = pins.first ? 1 : 0;
  const std::size_t hi = pins.last ? n - 2 : n - 1;

  auto twoOpt = [&] {
    bool improved = false;
    for (std::size_t i = lo; i + 1 <= hi; ++i) {
      for (std::size_t j = i + 1; j <= hi; ++j) {
        double delta = 0.0;
        if (i > 0) delta += d(path[i - 1], path[j]) - d(path[i - 1], path[i]);
        if (j + 1 < n) delta += d(path[i], path[j + 1]) - d(path[j], path[j + 1]);
        if (delta < -kImprovement) {
          std::reverse(path.begin() + static_cast<std::ptrdiff_t>(i),
                       path.begin() + static_cast<std::ptrdiff_t>(j) + 1);
          improved = true;
        }
      }
    }
    return improved;
  };

  // Moves a run of up to three axes elsewhere, optionally reversed. Applies the
  // first improving move.
  auto orOpt = [&] {
    for (std::size_t len = 1; len <= 3 && len < n; ++len) {
      for (std::size_t i = lo; i + len - 1 <= hi; ++i) {
        const std::size_t j = i + len - 1;
        double removed = 0.0;
        if (i > 0) removed += d(path[i - 1], path[i]);
        if (j + 1 < n) removed += d(path[j], path[j + 1]);
        if (i > 0 && j + 1 < n) removed -= d(path[i - 1], path[j + 1]);
        auto rest = [&](std::size_t k) { return k < i ? path[k] : path[k + len]; };
        const std::size_t restSize = n - len;
        const std::size_t qLo = pins.first ? 1 : 0;
        const std::size_t qHi = pins.last ? restSize - 1 : restSize;
        for (std::size_t q = qLo; q <= qHi; ++q) {
          if (q == i) continue;
          for (bool reversed : {false, true}) {
            const std::size_t head = reversed ? path[j] : path[i];
            const std::size_t tail = reversed ? path[i] : path[j];
            double added = 0.0;
            if (q > 0) added += d(rest(q - 1), head);
            if (q < restSize) added += d(tail, rest(q));
            if (q > 0 && q < restSize) added -= d(rest(q - 1), rest(q));
            if (added - removed < -kImprovement) {
              std::vector<std::size_t> segment(path.begin() + static_cast<std::ptrdiff_t>(i),
                                               path.begin() + static_cast<std::ptrdiff_t>(j) + 1);
              if (reversed) std::reverse(segment.begin(), segment.end());
              std::vector<std::size_t> next;
              next.reserve(n);
              for (std::size_t k = 0; k < restSize; ++k) {
                if (k == q) next.insert(next.end(), segment.begin(), segment.end());
                next.push_back(rest(k));
              }
              if (q == restSize) next.insert(next.end(), segment.begin(), segment.end());
              path = std::move(next);
              return true;
            }
          }
        }
      }
    }
    return false;
  };

  for (int pass = 0; pass < kMaxPasses; ++pass) {
    if (twoOpt()) continue;
    if (!orOpt()) break;
  }

  if (!pins.first && !pins.last && path.front() > path.back()) {
    std::reverse(path.begin(), path.end());
  }
  const double cost = pathCost(path, dm);
  return AxisOrder{std::move(path), cost};
}

AxisOrder orderPanel(const PanelGroup& panel, const DistanceMatrix& dm) {
  const std::size_t segments = panel.segments.size();
  if (segments == 0) return {};
  if (panel.junctions.size() + 1 != segments) {
    throw Error(ErrorCode::InvalidArgument, "panel junction count does not match its segments");
  }
  std::vector<std::size_t> axes;
  for (std::size_t s = 0; s < segments; ++s) {
    AxisPins pins;
    if (s > 0) pins.first = panel.junctions[s - 1];
    if (s + 1 < segments) pins.last = panel.junctions[s];
    const auto part = orderAxes(panel.segments[s], dm, pins);
    axes.insert(axes.end(), part.dims.begin() + (s > 0 ? 1 : 0), part.dims.end());
  }
  if (segments > 1 && axes.front() > axes.back()) std::reverse(axes.begin(), axes.end());
  const double cost = pathCost(axes, dm);
  return AxisOrder{std::move(axes), cost};
}

}  // namespace dimscope
