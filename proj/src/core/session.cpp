#include "dimscope/session.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dimscope/axis_order.hpp"
#include "dimscope/error.hpp"

namespace dimscope {

using nlohmann::json;

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Mode parseMode(const std::string& name) {
  if (name == "DistanceCliques" || name == "cliques") return Mode::DistanceCliques;
  if (name == "LabelRules" || name == "rules") return Mode::LabelRules;
  throw ValidationError("mode", "expected DistanceCliques or LabelRules, got '" + name + "'");
}

ColorSource parseColorSource(const std::string& name) {
  if (name == "categorical" || name == "Categorical") return ColorSource::Categorical;
  if (name == "kmeans" || name == "KMeans") return ColorSource::KMeans;
  throw ValidationError("source", "expected categorical or kmeans, got '" + name + "'");
}

double requireNumber(const json& doc, const char* key, const std::string& field) {
  auto it = doc.find(key);
  if (it == doc.end() || !it->is_number()) throw ValidationError(field, "expected a number");
  return it->get<double>();
}

std::uint64_t requireUnsigned(const json& value, const std::string& field) {
  if (!value.is_number_unsigned() && !(value.is_number_integer() && value.get<std::int64_t>() >= 0)) {
    throw ValidationError(field, "expected a non-negative integer");
  }
  return value.get<std::uint64_t>();
}

std::vector<std::size_t> requireDimList(const json& doc, const char* key, const Dataset& dataset) {
  auto it = doc.find(key);
  if (it == doc.end() || !it->is_array()) throw ValidationError(key, "expected an array of dim ids");
  std::vector<std::size_t> dims;
  for (const auto& v : *it) {
    std::size_t dim = 0;
    if (v.is_string()) {
      auto found = dataset.findNumeric(v.get<std::string>());
      if (!found) throw ValidationError(key, "unknown numeric dim '" + v.get<std::string>() + "'");
      dim = *found;
    } else {
      dim = static_cast<std::size_t>(requireUnsigned(v, key));
    }
    if (dim >= dataset.numericCount()) {
      throw ValidationError(key, "dim " + std::to_string(dim) + " does not exist");
    }
    dims.push_back(dim);
  }
  return dims;
}

std::optional<std::size_t> resolveCatDim(const json& value, const Dataset& dataset,
                                         const std::string& field) {
  if (value.is_null()) return std::nullopt;
  std::size_t id = 0;
  if (value.is_string()) {
    auto found = dataset.findCategorical(value.get<std::string>());
    if (!found) {
      throw ValidationError(field, "unknown categorical dim '" + value.get<std::string>() + "'");
    }
    id = *found;
  } else {
    id = static_cast<std::size_t>(requireUnsigned(value, field));
  }
  if (id >= dataset.categoricalCount()) {
    throw ValidationError(field, "categorical dim " + std::to_string(id) + " does not exist");
  }
  return id;
}

json parseObject(const std::string& text, const std::string& what) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(what, std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError(what, "expected a JSON object");
  return doc;
}

// Keeps 0 <= dRemove < dSelect after a threshold change.
void clampRemove(GraphParams& graph, std::vector<std::string>& warnings) {
  if (graph.dRemove > 0.0 && graph.dRemove >= graph.dSelect) {
    const double clamped = std::max(0.0, graph.dSelect - kClampEpsilon);
    std::ostringstream msg;
    msg << "dRemove " << graph.dRemove << " clamped to " << clamped
        << " (must stay below dSelect " << graph.dSelect << ")";
    warnings.push_back(msg.str());
    graph.dRemove = clamped;
  }
}

void requireThreshold(double value, const char* field) {
  if (!std::isfinite(value) || value < 0.0) {
    throw ValidationError(field, "must be a finite value >= 0");
  }
}

}  // namespace

const char* nameOf(Mode mode) noexcept {
  return mode == Mode::DistanceCliques ? "DistanceCliques" : "LabelRules";
}

const char* nameOf(ColorSource source) noexcept {
  return source == ColorSource::Categorical ? "categorical" : "kmeans";
}

SessionConfig defaultSessionConfig(const Dataset& dataset) {
  SessionConfig config;
  if (dataset.categoricalCount() > 0) config.initial.catDim = 0;
  return config;
}

SessionConfig parseSessionConfig(const std::string& text, const Dataset& dataset) {
  SessionConfig config = defaultSessionConfig(dataset);
  if (text.empty()) return config;
  const json doc = parseObject(text, "config");
  SessionState& s = config.initial;
  for (const auto& [key, value] : doc.items()) {
    try {
      if (key == "mode") {
        s.mode = parseMode(value.get<std::string>());
      } else if (key == "dSelect") {
        s.graph.dSelect = value.get<double>();
      } else if (key == "dRemove") {
        s.graph.dRemove = value.get<double>();
      } else if (key == "samplingSeed") {
        s.graph.samplingSeed = requireUnsigned(value, key);
      } else if (key == "cliqueCap") {
        s.graph.cliqueCap = static_cast<std::size_t>(requireUnsigned(value, key));
      } else if (key == "forcedInclude" || key == "forcedExclude") {
        auto dims = requireDimList(doc, key.c_str(), dataset);
        auto& target = key == "forcedInclude" ? s.graph.forcedInclude : s.graph.forcedExclude;
        target.insert(dims.begin(), dims.end());
      } else if (key == "tSup") {
        s.rules.tSup = value.get<double>();
      } else if (key == "tCon") {
        s.rules.tCon = value.get<double>();
      } else if (key == "direction") {
        s.rules.direction = parseRuleDirection(value.get<std::string>());
      } else if (key == "catDim") {
        s.catDim = resolveCatDim(value, dataset, key);
      } else if (key == "colorSource") {
        s.colorSource = parseColorSource(value.get<std::string>());
      } else if (key == "kmeansK") {
        s.kmeansK = static_cast<std::size_t>(requireUnsigned(value, key));
      } else if (key == "kmeansSeed") {
        s.kmeansSeed = requireUnsigned(value, key);
      } else if (key == "opacity") {
        s.opacity = value.get<double>();
      } else if (key == "binCount") {
        config.binning.binCount = value.get<int>();
      } else if (key == "sliderSteps") {
        config.sliderSteps = value.get<int>();
      } else {
        throw ValidationError(key, "unknown configuration key");
      }
    } catch (const json::exception& e) {
      throw ValidationError(key, e.what());
    }
  }
  s.graph.validate();
  s.rules.validate();
  try {
    config.binning.validate();
  } catch (const Error& e) {
    throw ValidationError("binCount", e.what());
  }
  if (s.mode == Mode::LabelRules && !s.catDim) {
    throw ValidationError("catDim", "LabelRules mode needs a categorical dim");
  }
  if (s.kmeansK < 1 || s.kmeansK > dataset.itemCount()) {
    throw ValidationError("kmeansK", "must lie in [1, item count]");
  }
  if (!(s.opacity > 0.0 && s.opacity <= 1.0)) throw ValidationError("opacity", "must lie in (0, 1]");
  if (config.sliderSteps < 1) throw ValidationError("sliderSteps", "must be >= 1");
  return config;
}

EventEnvelope parseEvent(const std::string& text, const Dataset& dataset) {
  const json doc = parseObject(text, "event");
  auto typeIt = doc.find("type");
  if (typeIt == doc.end() || !typeIt->is_string()) {
    throw ValidationError("type", "event needs a string 'type'");
  }
  const std::string type = typeIt->get<std::string>();
  EventEnvelope envelope{event::ClearOverrides{}, std::nullopt};
  if (auto it = doc.find("expectedRevision"); it != doc.end() && !it->is_null()) {
    envelope.expectedRevision = requireUnsigned(*it, "expectedRevision");
  }

  if (type == "SetMode") {
    auto it = doc.find("mode");
    if (it == doc.end() || !it->is_string()) throw ValidationError("mode", "expected a string");
    envelope.event = event::SetMode{parseMode(it->get<std::string>())};
  } else if (type == "SetDSelect") {
    envelope.event = event::SetDSelect{requireNumber(doc, "value", "dSelect")};
  } else if (type == "SetDRemove") {
    envelope.event = event::SetDRemove{requireNumber(doc, "value", "dRemove")};
  } else if (type == "SetCatDim") {
    auto it = doc.find("catDim");
    envelope.event = event::SetCatDim{
        it == doc.end() ? std::nullopt : resolveCatDim(*it, dataset, "catDim")};
  } else if (type == "SetRuleThresholds") {
    event::SetRuleThresholds e{requireNumber(doc, "tSup", "tSup"),
                               requireNumber(doc, "tCon", "tCon"), std::nullopt};
    if (auto it = doc.find("direction"); it != doc.end()) {
      if (!it->is_string()) throw ValidationError("direction", "expected a string");
      e.direction = parseRuleDirection(it->get<std::string>());
    }
    envelope.event = e;
  } else if (type == "RectIncludeDims") {
    envelope.event = event::RectIncludeDims{requireDimList(doc, "dims", dataset)};
  } else if (type == "RectExcludeDims") {
    envelope.event = event::RectExcludeDims{requireDimList(doc, "dims", dataset)};
  } else if (type == "SetColorSource") {
    auto it = doc.find("source");
    if (it == doc.end() || !it->is_string()) throw ValidationError("source", "expected a string");
    event::SetColorSource e{parseColorSource(it->get<std::string>()), std::nullopt, std::nullopt};
    if (auto k = doc.find("k"); k != doc.end()) e.k = requireUnsigned(*k, "k");
    if (auto seed = doc.find("seed"); seed != doc.end()) e.seed = requireUnsigned(*seed, "seed");
    envelope.event = e;
  } else if (type == "SetOpacity") {
    envelope.event = event::SetOpacity{requireNumber(doc, "value", "opacity")};
  } else if (type == "ClearOverrides") {
    envelope.event = event::ClearOverrides{};
  } else {
    throw ValidationError("type", "unknown event type '" + type + "'");
  }
  return envelope;
}

std::string eventToJson(const Event& e) {
  json doc = std::visit(
      Overloaded{
          [](const event::SetMode& v) { return json{{"type", "SetMode"}, {"mode", nameOf(v.mode)}}; },
          [](const event::SetDSelect& v) { return json{{"type", "SetDSelect"}, {"value", v.value}}; },
          [](const event::SetDRemove& v) { return json{{"type", "SetDRemove"}, {"value", v.value}}; },
          [](const event::SetCatDim& v) {
            return json{{"type", "SetCatDim"},
                        {"catDim", v.catDim ? json(*v.catDim) : json(nullptr)}};
          },
          [](const event::SetRuleThresholds& v) {
            json out{{"type", "SetRuleThresholds"}, {"tSup", v.tSup}, {"tCon", v.tCon}};
            if (v.direction) out["direction"] = nameOf(*v.direction);
            return out;
          },
          [](const event::RectIncludeDims& v) { return json{{"type", "RectIncludeDims"}, {"dims", v.dims}}; },
          [](const event::RectExcludeDims& v) { return json{{"type", "RectExcludeDims"}, {"dims", v.dims}}; },
          [](const event::SetColorSource& v) {
            json out{{"type", "SetColorSource"}, {"source", nameOf(v.source)}};
            if (v.k) out["k"] = *v.k;
            if (v.seed) out["seed"] = *v.seed;
            return out;
          },
          [](const event::SetOpacity& v) { return json{{"type", "SetOpacity"}, {"value", v.value}}; },
          [](const event::ClearOverrides&) { return json{{"type", "ClearOverrides"}}; },
      },
      e);
  return doc.dump();
}

ApplyResult applyEvent(const SessionState& state, const EventEnvelope& envelope,
                       const Dataset& dataset) {
  if (envelope.expectedRevision && *envelope.expectedRevision != state.revision) {
    throw Error(ErrorCode::RevisionConflict,
                "expected revision " + std::to_string(*envelope.expectedRevision) +
                    ", current is " + std::to_string(state.revision));
  }
  ApplyResult result{state, {}};
  SessionState& next = result.state;

  std::visit(
      Overloaded{
          [&](const event::SetMode& e) {
            if (e.mode == Mode::LabelRules && !next.catDim) {
              throw ValidationError("catDim", "select a categorical dim before LabelRules mode");
            }
            next.mode = e.mode;
          },
          [&](const event::SetDSelect& e) {
            requireThreshold(e.value, "dSelect");
            next.graph.dSelect = e.value;
            clampRemove(next.graph, result.warnings);
          },
          [&](const event::SetDRemove& e) {
            requireThreshold(e.value, "dRemove");
            next.graph.dRemove = e.value;
            clampRemove(next.graph, result.warnings);
          },
          [&](const event::SetCatDim& e) {
            if (e.catDim && *e.catDim >= dataset.categoricalCount()) {
              throw ValidationError("catDim", "categorical dim does not exist");
            }
            if (!e.catDim && next.mode == Mode::LabelRules) {
              throw ValidationError("catDim", "LabelRules mode needs a categorical dim");
            }
            next.catDim = e.catDim;
          },
          [&](const event::SetRuleThresholds& e) {
            RuleThresholds th{e.tSup, e.tCon, e.direction.value_or(next.rules.direction)};
            th.validate();
            next.rules = th;
          },
          [&](const event::RectIncludeDims& e) {
            for (std::size_t dim : e.dims) {
              if (dim >= dataset.numericCount()) throw ValidationError("dims", "dim does not exist");
            }
            for (std::size_t dim : e.dims) {
              next.graph.forcedExclude.erase(dim);
              next.graph.forcedInclude.insert(dim);
            }
          },
          [&](const event::RectExcludeDims& e) {
            for (std::size_t dim : e.dims) {
              if (dim >= dataset.numericCount()) throw ValidationError("dims", "dim does not exist");
            }
            for (std::size_t dim : e.dims) {
              next.graph.forcedInclude.erase(dim);
              next.graph.forcedExclude.insert(dim);
            }
          },
          [&](const event::SetColorSource& e) {
            if (e.source == ColorSource::KMeans) {
              const std::size_t k = e.k.value_or(next.kmeansK);
              if (k < 1 || k > dataset.itemCount()) {
                throw ValidationError("k", "must lie in [1, " +
                                               std::to_string(dataset.itemCount()) + "]");
              }
              next.kmeansK = k;
              next.kmeansSeed = e.seed.value_or(next.kmeansSeed);
            }
            next.colorSource = e.source;
          },
          [&](const event::SetOpacity& e) {
            if (!(e.value > 0.0 && e.value <= 1.0)) {
              throw ValidationError("opacity", "must lie in (0, 1]");
            }
            next.opacity = e.value;
          },
          [&](const event::ClearOverrides&) {
            next.graph.forcedInclude.clear();
            next.graph.forcedExclude.clear();
          },
      },
      envelope.event);

  next.graph.validate();
  ++next.revision;
  return result;
}

ViewContext::ViewContext(std::shared_ptr<const Dataset> dataset,
                         std::shared_ptr<const DistanceMatrix> distances, SessionConfig config)
    : dataset_(std::move(dataset)), distances_(std::move(distances)), config_(std::move(config)) {
  if (!dataset_ || !distances_) {
    throw Error(ErrorCode::InvalidArgument, "view context needs a dataset and a distance matrix");
  }
  if (distances_->fingerprint() != dataset_->fingerprint() ||
      distances_->size() != dataset_->numericCount()) {
    throw Error(ErrorCode::FingerprintMismatch, "distance matrix does not belong to this dataset");
  }
}

std::shared_ptr<const Layout2D> ViewContext::layout(const DimSet& visible) {
  {
    std::lock_guard lock(mutex_);
    if (auto it = layouts_.find(visible); it != layouts_.end()) return it->second;
  }
  auto computed = std::make_shared<const Layout2D>(layoutDims(*distances_, visible, config_.layout));
  std::lock_guard lock(mutex_);
  if (layouts_.size() >= 8) layouts_.clear();
  ++layoutComputations_;
  return layouts_.emplace(visible, std::move(computed)).first->second;
}

std::size_t ViewContext::layoutComputations() const {
  std::lock_guard lock(mutex_);
  return layoutComputations_;
}

std::shared_ptr<const ClusterAssignment> ViewContext::clusters(std::size_t k, std::uint64_t seed) {
  std::shared_ptr<const FeatureMatrix> features;
  {
    std::lock_guard lock(mutex_);
    if (auto it = clusters_.find({k, seed}); it != clusters_.end()) return it->second;
    if (!features_) features_ = std::make_shared<const FeatureMatrix>(clusteringFeatures(*dataset_));
    features = features_;
  }
  auto computed = std::make_shared<const ClusterAssignment>(
      kmeans(*features, KMeansOptions{k, seed, 300, 1e-6}));
  std::lock_guard lock(mutex_);
  return clusters_.emplace(std::make_pair(k, seed), std::move(computed)).first->second;
}

namespace {

PanelView makePanel(const std::vector<std::size_t>& axes, const Dataset& dataset,
                    const std::vector<int>& colors, const DistanceMatrix& dm) {
  PanelView panel;
  for (std::size_t dim : axes) {
    const auto& meta = dataset.numericMeta(dim);
    panel.axes.push_back(PanelAxis{dim, meta.label, meta.vmin, meta.vmax});
  }
  panel.polylines.assign(dataset.itemCount(), std::vector<double>(axes.size()));
  for (std::size_t a = 0; a < axes.size(); ++a) {
    const auto& meta = dataset.numericMeta(axes[a]);
    const auto values = dataset.numeric(axes[a]);
    for (std::size_t i = 0; i < dataset.itemCount(); ++i) {
      panel.polylines[i][a] = normalizeValue(meta, values[i]);
    }
  }
  panel.colors = colors;
  panel.cost = pathCost(axes, dm);
  return panel;
}

}  // namespace

ViewModel buildView(const SessionState& state, ViewContext& context, const CancelCheck& cancelled) {
  auto checkpoint = [&] {
    if (cancelled && cancelled()) throw Error(ErrorCode::Cancelled, "view computation superseded");
  };
  const Dataset& dataset = context.dataset();
  const DistanceMatrix& dm = context.distances();

  ViewModel view;
  view.revision = state.revision;
  view.state = state;
  view.binning = context.config().binning;

  checkpoint();
  const DimensionGraph graph = buildGraph(dm, state.graph);
  checkpoint();
  const auto layout = context.layout(graph.visible);
  for (std::size_t i = 0; i < layout->dims.size(); ++i) {
    view.graph.dots.push_back(ViewDot{layout->dims[i], layout->positions[i]});
  }
  view.graph.edges = graph.edges;
  view.graph.hidden = graph.hidden;
  view.graph.excluded = graph.excluded;
  view.graph.stress = layout->stress;

  checkpoint();
  if (state.colorSource == ColorSource::Categorical && state.catDim) {
    view.colors = labelColoring(dataset, *state.catDim);
    const auto& meta = dataset.categoricalMeta(*state.catDim);
    for (std::size_t v = 0; v < meta.values.size(); ++v) {
      view.legend.push_back(LegendEntry{static_cast<int>(v), meta.values[v]});
    }
    if (meta.missingCount > 0) view.legend.push_back(LegendEntry{kNeutralColor, "(missing)"});
  } else {
    const auto clusters = context.clusters(state.kmeansK, state.kmeansSeed);
    view.colors = clusters->labels;
    for (std::size_t c = 0; c < clusters->k; ++c) {
      view.legend.push_back(LegendEntry{static_cast<int>(c), "cluster " + std::to_string(c + 1)});
    }
  }

  checkpoint();
  if (state.mode == Mode::DistanceCliques) {
    try {
      view.cliques = maximalCliques(graph, state.graph.cliqueCap);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::CliqueExplosion) throw;
      view.advisory = e.what();
      return view;
    }
    for (const PanelGroup& group : mergePanels(view.cliques)) {
      checkpoint();
      const AxisOrder order = orderPanel(group, dm);
      PanelView panel = makePanel(order.dims, dataset, view.colors, dm);
      panel.provenance = "cliques";
      panel.cliqueIds = group.cliqueIds;
      panel.junctions = group.junctions;
      view.panels.push_back(std::move(panel));
    }
  } else {
    if (!state.catDim) throw ValidationError("catDim", "LabelRules mode needs a categorical dim");
    const RuleSet rules =
        mineRules(dataset, context.config().binning, *state.catDim, state.rules, &dm, &graph.visible);
    view.rules = rules.rules;
    for (const LabelPanel& group : rules.panels) {
      checkpoint();
      PanelView panel = makePanel(group.dims, dataset, view.colors, dm);
      panel.provenance = "rules";
      panel.label = group.label;
      panel.ruleIds = group.ruleIds;
      view.panels.push_back(std::move(panel));
    }
  }
  return view;
}

Session::Session(std::shared_ptr<const Dataset> dataset,
                 std::shared_ptr<const DistanceMatrix> distances, SessionConfig config)
    : context_(std::move(dataset), std::move(distances), config), state_(config.initial) {}

ApplyResult Session::apply(const EventEnvelope& envelope) {
  auto result = applyEvent(state_, envelope, context_.dataset());
  state_ = result.state;
  return result;
}

ApplyResult Session::apply(const std::string& eventJson) {
  return apply(parseEvent(eventJson, context_.dataset()));
}

const ViewModel& Session::view() {
  if (!view_ || view_->revision != state_.revision) view_ = buildView(state_, context_);
  return *view_;
}

std::string Session::viewJson() { return viewToJson(view(), context_.dataset()); }

}  // namespace dimscope
