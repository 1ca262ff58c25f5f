#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "dimscope/clustering.hpp"
#include "dimscope/dataset.hpp"
#include "dimscope/graph.hpp"
#include "dimscope/layout.hpp"
#include "dimscope/metrics.hpp"
#include "dimscope/rules.hpp"

namespace dimscope {

enum class Mode { DistanceCliques, LabelRules };
enum class ColorSource { Categorical, KMeans };

const char* nameOf(Mode mode) noexcept;
const char* nameOf(ColorSource source) noexcept;

struct SessionState {
  Mode mode = Mode::DistanceCliques;
  GraphParams graph;
  RuleThresholds rules;
  std::optional<std::size_t> catDim;
  ColorSource colorSource = ColorSource::Categorical;
  std::size_t kmeansK = 4;
  std::uint64_t kmeansSeed = 1;
  double opacity = 0.3;
  std::uint64_t revision = 0;

  bool operator==(const SessionState&) const = default;
};

// Initial parameters of a session. Also read from a JSON object whose keys
// match the field names (see README).
struct SessionConfig {
  SessionState initial;
  BinningSpec binning;
  LayoutStrategy layout = LayoutStrategy::ClassicalMds;
  int sliderSteps = 200;
};

// Throws ValidationError on unknown keys or bad values. `dataset` resolves
// "catDim" given as a column label and supplies the default categorical dim.
SessionConfig parseSessionConfig(const std::string& json, const Dataset& dataset);
SessionConfig defaultSessionConfig(const Dataset& dataset);

namespace event {
struct SetMode { Mode mode; };
struct SetDSelect { double value; };
struct SetDRemove { double value; };
struct SetCatDim { std::optional<std::size_t> catDim; };
struct SetRuleThresholds { double tSup; double tCon; std::optional<RuleDirection> direction; };
struct RectIncludeDims { std::vector<std::size_t> dims; };
struct RectExcludeDims { std::vector<std::size_t> dims; };
struct SetColorSource {
  ColorSource source;
  std::optional<std::size_t> k;
  std::optional<std::uint64_t> seed;
};
struct SetOpacity { double value; };
struct ClearOverrides {};
}  // namespace event

using Event = std::variant<event::SetMode, event::SetDSelect, event::SetDRemove, event::SetCatDim,
                           event::SetRuleThresholds, event::RectIncludeDims,
                           event::RectExcludeDims, event::SetColorSource, event::SetOpacity,
                           event::ClearOverrides>;

struct EventEnvelope {
  Event event;
  // Compare-and-set: rejected with RevisionConflict unless equal to the current revision.
  std::optional<std::uint64_t> expectedRevision;
};

// {"type": "SetDSelect", "value": 0.3, "expectedRevision": 4} etc.
// Throws ValidationError on malformed input.
EventEnvelope parseEvent(const std::string& json, const Dataset& dataset);
std::string eventToJson(const Event& event);

struct ApplyResult {
  SessionState state;
  std::vector<std::string> warnings;
};

// Pure: returns the mutated copy with revision + 1. Invalid events throw
// ValidationError (or RevisionConflict) and leave `state` untouched. A dRemove
// that would reach dSelect is clamped just below it with a warning.
ApplyResult applyEvent(const SessionState& state, const EventEnvelope& envelope,
                       const Dataset& dataset);

inline constexpr double kClampEpsilon = 1e-9;

struct ViewDot {
  std::size_t dim = 0;
  Point2 position{};
};

struct GraphView {
  std::vector<ViewDot> dots;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::map<std::size_t, std::size_t> hidden;
  DimSet excluded;
  double stress = 0.0;
};

struct PanelAxis {
  std::size_t dim = 0;
  std::string label;
  double min = 0.0;
  double max = 0.0;
};

struct PanelView {
  std::vector<PanelAxis> axes;
  // Item-major normalized values, one row per item, NaN for missing.
  std::vector<std::vector<double>> polylines;
  std::vector<int> colors;
  double cost = 0.0;
  // "cliques": cliqueIds/junctions set; "rules": label/ruleIds set.
  std::string provenance;
  std::vector<std::size_t> cliqueIds;
  std::vector<std::size_t> junctions;
  std::optional<std::int32_t> label;
  std::vector<std::size_t> ruleIds;
};

struct LegendEntry {
  int color = 0;
  std::string label;
};

struct ViewModel {
  std::uint64_t revision = 0;
  SessionState state;
  GraphView graph;
  std::vector<DimSet> cliques;
  std::vector<Rule> rules;
  BinningSpec binning;
  std::vector<PanelView> panels;
  std::vector<int> colors;
  std::vector<LegendEntry> legend;
  std::optional<std::string> advisory;
};

using CancelCheck = std::function<bool()>;

// Immutable inputs plus memo caches for layouts and clusterings; buildView is
// safe to call concurrently on one context.
class ViewContext {
 public:
  ViewContext(std::shared_ptr<const Dataset> dataset, std::shared_ptr<const DistanceMatrix> distances,
              SessionConfig config);

  const Dataset& dataset() const noexcept { return *dataset_; }
  const DistanceMatrix& distances() const noexcept { return *distances_; }
  const SessionConfig& config() const noexcept { return config_; }
  std::shared_ptr<const Dataset> datasetPtr() const noexcept { return dataset_; }
  std::shared_ptr<const DistanceMatrix> distancesPtr() const noexcept { return distances_; }

  // Recomputed only when the visible dim set differs from the cached one.
  std::shared_ptr<const Layout2D> layout(const DimSet& visible);
  std::shared_ptr<const ClusterAssignment> clusters(std::size_t k, std::uint64_t seed);

  std::size_t layoutComputations() const;

 private:
  std::shared_ptr<const Dataset> dataset_;
  std::shared_ptr<const DistanceMatrix> distances_;
  SessionConfig config_;

  mutable std::mutex mutex_;
  std::map<DimSet, std::shared_ptr<const Layout2D>> layouts_;
  std::size_t layoutComputations_ = 0;
  std::map<std::pair<std::size_t, std::uint64_t>, std::shared_ptr<const ClusterAssignment>> clusters_;
  std::shared_ptr<const FeatureMatrix> features_;
};

// Throws Error(Cancelled) when `cancelled` reports true between stages.
// CliqueExplosion becomes an advisory with no panels.
ViewModel buildView(const SessionState& state, ViewContext& context,
                    const CancelCheck& cancelled = {});

// Canonical JSON: sorted keys, normalized polyline values rounded to 1e-6,
// missing values as null.
std::string viewToJson(const ViewModel& view, const Dataset& dataset);
std::string stateToJson(const SessionState& state);
std::string datasetMetaJson(const Dataset& dataset, const DistanceMatrix* distances,
                            const SessionConfig& config);

// Plain SVG 1.1: PCP panels on the left (one <g class="pcp-panel"> each), the
// dimension graph on the right.
std::string renderSvg(const ViewModel& view, const Dataset& dataset);

// Single-threaded session: holds state and the current view.
class Session {
 public:
  Session(std::shared_ptr<const Dataset> dataset, std::shared_ptr<const DistanceMatrix> distances,
          SessionConfig config);

  ApplyResult apply(const EventEnvelope& envelope);
  ApplyResult apply(const std::string& eventJson);

  const SessionState& state() const noexcept { return state_; }
  const ViewModel& view();
  std::string viewJson();
  ViewContext& context() noexcept { return context_; }

 private:
  ViewContext context_;
  SessionState state_;
  std::optional<ViewModel> view_;
};

}  // namespace dimscope
