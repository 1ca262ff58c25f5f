#include <cmath>

#include <nlohmann/json.hpp>

#include "dimscope/session.hpp"

namespace dimscope {

using nlohmann::json;

namespace {

json quantized(double v) {
  if (isMissing(v)) return nullptr;
  return std::round(v * 1e6) / 1e6 + 0.0;
}

json finiteOrNull(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json stateJson(const SessionState& s) {
  return json{
      {"mode", nameOf(s.mode)},
      {"dSelect", s.graph.dSelect},
      {"dRemove", s.graph.dRemove},
      {"samplingSeed", s.graph.samplingSeed},
      {"cliqueCap", s.graph.cliqueCap},
      {"forcedInclude", s.graph.forcedInclude},
      {"forcedExclude", s.graph.forcedExclude},
      {"tSup", s.rules.tSup},
      {"tCon", s.rules.tCon},
      {"direction", nameOf(s.rules.direction)},
      {"catDim", s.catDim ? json(*s.catDim) : json(nullptr)},
      {"colorSource", nameOf(s.colorSource)},
      {"kmeansK", s.kmeansK},
      {"kmeansSeed", s.kmeansSeed},
      {"opacity", s.opacity},
      {"revision", s.revision},
  };
}

}  // namespace

std::string stateToJson(const SessionState& state) { return stateJson(state).dump(); }

std::string viewToJson(const ViewModel& view, const Dataset& dataset) {
  json graph;
  graph["dots"] = json::array();
  for (const auto& dot : view.graph.dots) {
    graph["dots"].push_back({{"dim", dot.dim},
                             {"label", dataset.numericMeta(dot.dim).label},
                             {"x", dot.position[0]},
                             {"y", dot.position[1]}});
  }
  graph["edges"] = json::array();
  for (const auto& [j, k] : view.graph.edges) graph["edges"].push_back({j, k});
  graph["hidden"] = json::array();
  for (const auto& [dim, representative] : view.graph.hidden) {
    graph["hidden"].push_back({{"dim", dim}, {"representative", representative}});
  }
  graph["hiddenCount"] = view.graph.hidden.size();
  graph["excluded"] = view.graph.excluded;
  graph["stress"] = finiteOrNull(view.graph.stress);

  json rules = json::array();
  for (const Rule& rule : view.rules) {
    const auto& cat = dataset.categoricalMeta(rule.catDim);
    const auto& dim = dataset.numericMeta(rule.dim);
    rules.push_back({{"label", rule.label},
                     {"labelName", cat.values.at(static_cast<std::size_t>(rule.label))},
                     {"dim", rule.dim},
                     {"dimLabel", dim.label},
                     {"bin", rule.bin},
                     {"lo", view.binning.binLower(dim, rule.bin)},
                     {"hi", view.binning.binUpper(dim, rule.bin)},
                     {"count", rule.count},
                     {"support", rule.support},
                     {"confidence", rule.confidence},
                     {"direction", nameOf(rule.direction)}});
  }

  json panels = json::array();
  for (std::size_t p = 0; p < view.panels.size(); ++p) {
    const PanelView& panel = view.panels[p];
    json axes = json::array();
    for (const auto& axis : panel.axes) {
      axes.push_back({{"dim", axis.dim}, {"label", axis.label}, {"min", axis.min}, {"max", axis.max}});
    }
    json polylines = json::array();
    for (const auto& row : panel.polylines) {
      json line = json::array();
      for (double v : row) line.push_back(quantized(v));
      polylines.push_back(std::move(line));
    }
    json provenance{{"kind", panel.provenance}};
    if (panel.provenance == "cliques") {
      provenance["cliqueIds"] = panel.cliqueIds;
      provenance["junctions"] = panel.junctions;
    } else {
      provenance["label"] = panel.label ? json(*panel.label) : json(nullptr);
      if (panel.label && view.state.catDim) {
        provenance["labelName"] = dataset.categoricalMeta(*view.state.catDim)
                                      .values.at(static_cast<std::size_t>(*panel.label));
      }
      provenance["ruleIds"] = panel.ruleIds;
    }
    panels.push_back({{"id", p},
                      {"axes", std::move(axes)},
                      {"polylines", std::move(polylines)},
                      {"colors", panel.colors},
                      {"cost", finiteOrNull(panel.cost)},
                      {"provenance", std::move(provenance)}});
  }

  json legend = json::array();
  for (const auto& entry : view.legend) {
    legend.push_back({{"color", entry.color}, {"label", entry.label}});
  }

  json doc{
      {"revision", view.revision},
      {"state", stateJson(view.state)},
      {"graph", std::move(graph)},
      {"cliques", view.cliques},
      {"rules", std::move(rules)},
      {"panels", std::move(panels)},
      {"colors", view.colors},
      {"legend", std::move(legend)},
      {"opacity", view.state.opacity},
      {"advisory", view.advisory ? json(*view.advisory) : json(nullptr)},
  };
  return doc.dump();
}

std::string datasetMetaJson(const Dataset& dataset, const DistanceMatrix* distances,
                            const SessionConfig& config) {
  json numeric = json::array();
  for (const auto& meta : dataset.numericDims()) {
    numeric.push_back({{"id", meta.id},
                       {"label", meta.label},
                       {"min", meta.vmin},
                       {"max", meta.vmax},
                       {"missing", meta.missingCount},
                       {"constant", meta.isConstant()}});
  }
  json categorical = json::array();
  for (const auto& meta : dataset.categoricalDims()) {
    categorical.push_back({{"id", meta.id},
                           {"label", meta.label},
                           {"values", meta.values},
                           {"counts", meta.counts},
                           {"missing", meta.missingCount}});
  }
  const double maxDistance =
      distances != nullptr ? metricMaxDistance(distances->metric())
                           : metricMaxDistance(DistanceMetric::AbsoluteCorrelation);
  const double distanceStep = maxDistance / config.sliderSteps;
  json doc{
      {"name", dataset.name()},
      {"items", dataset.itemCount()},
      {"numeric", std::move(numeric)},
      {"categorical", std::move(categorical)},
      {"metric", distances != nullptr ? json(nameOf(distances->metric())) : json(nullptr)},
      {"binCount", config.binning.binCount},
      {"sliders",
       {{"dSelect", {{"min", 0.0}, {"max", maxDistance}, {"step", distanceStep}}},
        {"dRemove", {{"min", 0.0}, {"max", maxDistance}, {"step", distanceStep}}},
        {"tSup", {{"min", 0.0}, {"max", 1.0}, {"step", 1.0 / config.sliderSteps}}},
        {"tCon", {{"min", 0.0}, {"max", 1.0}, {"step", 1.0 / config.sliderSteps}}},
        {"opacity", {{"min", 0.0}, {"max", 1.0}, {"step", 1.0 / config.sliderSteps}}}}},
  };
  return doc.dump();
}

}  // namespace dimscope
