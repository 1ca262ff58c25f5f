#include "dimscope/rules.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "dimscope/axis_order.hpp"
#include "dimscope/error.hpp"

namespace dimscope {

const char* nameOf(RuleDirection direction) noexcept {
  switch (direction) {
    case RuleDirection::LabelToRange: return "LabelToRange";
    case RuleDirection::RangeToLabel: return "RangeToLabel";
    case RuleDirection::Both: return "Both";
  }
  return "?";
}

RuleDirection parseRuleDirection(const std::string& name) {
  if (name == "LabelToRange" || name == "label-to-range") return RuleDirection::LabelToRange;
  if (name == "RangeToLabel" || name == "range-to-label") return RuleDirection::RangeToLabel;
  if (name == "Both" || name == "both") return RuleDirection::Both;
  throw ValidationError("direction", "expected LabelToRange, RangeToLabel or Both, got '" +
                                         name + "'");
}

void RuleThresholds::validate() const {
  if (!(tSup >= 0.0 && tSup <= 1.0)) throw ValidationError("tSup", "must lie in [0, 1]");
  if (!(tCon >= 0.0 && tCon <= 1.0)) throw ValidationError("tCon", "must lie in [0, 1]");
}

RuleSet mineRules(const Dataset& dataset, const BinningSpec& binning, std::size_t catDim,
                  const RuleThresholds& thresholds, const DistanceMatrix* distances,
                  const DimSet* allowedDims) {
  if (dataset.categoricalCount() == 0) {
    throw Error(ErrorCode::NoCategoricalDim, "dataset has no categorical dimension");
  }
  if (catDim >= dataset.categoricalCount()) {
    throw Error(ErrorCode::NoCategoricalDim,
                "categorical dim " + std::to_string(catDim) + " does not exist");
  }
  binning.validate();
  thresholds.validate();

  const auto& meta = dataset.categoricalMeta(catDim);
  const auto labels = dataset.categorical(catDim);
  const std::size_t labelCount = meta.values.size();
  const std::size_t bins = static_cast<std::size_t>(binning.binCount);
  const double m = static_cast<double>(dataset.itemCount());

  const bool wantLabelToRange = thresholds.direction != RuleDirection::RangeToLabel;
  const bool wantRangeToLabel = thresholds.direction != RuleDirection::LabelToRange;

  RuleSet result;
  result.catDim = catDim;
  result.binning = binning;

  std::vector<std::size_t> joint(labelCount * bins);
  std::vector<std::size_t> perLabel(labelCount);
  std::vector<std::size_t> perBin(bins);

  auto consider = [&](std::size_t j, std::size_t label, std::size_t bin, std::size_t count,
                      std::size_t antecedent, RuleDirection direction) {
    Rule rule;
    rule.catDim = catDim;
    rule.label = static_cast<std::int32_t>(label);
    rule.dim = j;
    rule.bin = static_cast<int>(bin);
    rule.count = count;
    rule.antecedentCount = antecedent;
    rule.support = static_cast<double>(count) / m;
    rule.antecedentSupport = static_cast<double>(antecedent) / m;
    rule.confidence = static_cast<double>(count) / static_cast<double>(antecedent);
    rule.direction = direction;
    if (rule.support >= thresholds.tSup && rule.confidence >= thresholds.tCon) {
      result.rules.push_back(rule);
    }
  };

  for (std::size_t j = 0; j < dataset.numericCount(); ++j) {
    const auto& dim = dataset.numericMeta(j);
    if (dim.isConstant()) continue;
    if (allowedDims != nullptr && !std::binary_search(allowedDims->begin(), allowedDims->end(), j)) {
      continue;
    }
    const auto values = dataset.numeric(j);
    std::fill(joint.begin(), joint.end(), 0);
    std::fill(perLabel.begin(), perLabel.end(), 0);
    std::fill(perBin.begin(), perBin.end(), 0);
    for (std::size_t i = 0; i < dataset.itemCount(); ++i) {
      if (labels[i] == kMissingCategory || isMissing(values[i])) continue;
      const auto label = static_cast<std::size_t>(labels[i]);
      const auto bin = static_cast<std::size_t>(binIndex(dim, binning, values[i]));
      ++joint[label * bins + bin];
      ++perLabel[label];
      ++perBin[bin];
    }
    for (std::size_t label = 0; label < labelCount; ++label) {
      for (std::size_t bin = 0; bin < bins; ++bin) {
        const std::size_t count = joint[label * bins + bin];
        if (count == 0) continue;
        if (wantLabelToRange) {
          consider(j, label, bin, count, perLabel[label], RuleDirection::LabelToRange);
        }
        if (wantRangeToLabel) {
          consider(j, label, bin, count, perBin[bin], RuleDirection::RangeToLabel);
        }
      }
    }
  }

  std::sort(result.rules.begin(), result.rules.end(), [](const Rule& l, const Rule& r) {
    if (l.label != r.label) return l.label < r.label;
    if (l.dim != r.dim) return l.dim < r.dim;
    if (l.bin != r.bin) return l.bin < r.bin;
    return l.direction < r.direction;
  });

  std::map<std::int32_t, LabelPanel> panels;
  for (std::size_t id = 0; id < result.rules.size(); ++id) {
    const Rule& rule = result.rules[id];
    auto& panel = panels[rule.label];
    panel.label = rule.label;
    panel.ruleIds.push_back(id);
    if (std::find(panel.dims.begin(), panel.dims.end(), rule.dim) == panel.dims.end()) {
      panel.dims.push_back(rule.dim);
    }
  }
  for (auto& [label, panel] : panels) {
    if (distances != nullptr && panel.dims.size() > 1) {
      panel.dims = orderAxes(panel.dims, *distances).dims;
    }
    result.panels.push_back(std::move(panel));
  }
  return result;
}

std::vector<int> labelColoring(const Dataset& dataset, std::size_t catDim) {
  if (catDim >= dataset.categoricalCount()) {
    throw Error(ErrorCode::NoCategoricalDim,
                "categorical dim " + std::to_string(catDim) + " does not exist");
  }
  const auto codes = dataset.categorical(catDim);
  std::vector<int> colors(codes.size());
  std::transform(codes.begin(), codes.end(), colors.begin(), [](std::int32_t code) {
    return code == kMissingCategory ? kNeutralColor : static_cast<int>(code);
  });
  return colors;
}

std::string rulesToJson(const Dataset& dataset, const RuleSet& rules) {
  const auto& cat = dataset.categoricalMeta(rules.catDim);
  nlohmann::json out = nlohmann::json::array();
  for (const Rule& rule : rules.rules) {
    const auto& dim = dataset.numericMeta(rule.dim);
    out.push_back({
        {"category", cat.label},
        {"label", cat.values.at(static_cast<std::size_t>(rule.label))},
        {"dim", rule.dim},
        {"dimLabel", dim.label},
        {"bin", rule.bin},
        {"lo", rules.binning.binLower(dim, rule.bin)},
        {"hi", rules.binning.binUpper(dim, rule.bin)},
        {"count", rule.count},
        {"support", rule.support},
        {"confidence", rule.confidence},
        {"direction", nameOf(rule.direction)},
    });
  }
  return out.dump(2);
}

}  // namespace dimscope
