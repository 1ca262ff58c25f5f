#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "dimscope/dataset.hpp"
#include "dimscope/graph.hpp"
#include "dimscope/metrics.hpp"

namespace dimscope {

// LabelToRange: L -> V_jk (where a label concentrates).
// RangeToLabel: V_jk -> L (which ranges separate labels).
// Both: union of the two rule sets.
enum class RuleDirection { LabelToRange, RangeToLabel, Both };

const char* nameOf(RuleDirection direction) noexcept;
RuleDirection parseRuleDirection(const std::string& name);

struct RuleThresholds {
  double tSup = 0.05;
  double tCon = 0.6;
  RuleDirection direction = RuleDirection::RangeToLabel;

  // Throws ValidationError unless both thresholds lie in [0, 1].
  void validate() const;

  bool operator==(const RuleThresholds&) const = default;
};

struct Rule {
  std::size_t catDim = 0;
  std::int32_t label = 0;  // index into the categorical dim's values
  std::size_t dim = 0;     // numeric dim j
  int bin = 0;             // subrange k of dim j
  std::size_t count = 0;   // items with both the label and a value in the bin
  std::size_t antecedentCount = 0;
  double support = 0.0;            // count / m
  double antecedentSupport = 0.0;  // antecedentCount / m
  double confidence = 0.0;         // count / antecedentCount
  RuleDirection direction = RuleDirection::RangeToLabel;  // never Both

  bool operator==(const Rule&) const = default;
};

struct LabelPanel {
  std::int32_t label = 0;
  std::vector<std::size_t> dims;     // axis order
  std::vector<std::size_t> ruleIds;  // indices into RuleSet::rules
};

struct RuleSet {
  std::size_t catDim = 0;
  BinningSpec binning;
  std::vector<Rule> rules;         // sorted by (label, dim, bin, direction)
  std::vector<LabelPanel> panels;  // one per label with surviving rules, by label index
};

// Scores every (label, numeric dim, bin) triple. Items missing the label or the
// dim value are left out of that (dim, label) pair; support is always divided
// by the full item count m. Constant dims are skipped. A rule survives when its
// count is nonzero, support >= tSup and confidence >= tCon. When `distances` is
// given, each label panel is axis-ordered with the TSP heuristic; otherwise its
// dims stay in id order. `allowedDims`, when given, limits the scan to those dims.
RuleSet mineRules(const Dataset& dataset, const BinningSpec& binning, std::size_t catDim,
                  const RuleThresholds& thresholds, const DistanceMatrix* distances = nullptr,
                  const DimSet* allowedDims = nullptr);

inline constexpr int kNeutralColor = -1;

// Palette index per item: the label's position in the dim's sorted value list,
// kNeutralColor for a missing label.
std::vector<int> labelColoring(const Dataset& dataset, std::size_t catDim);

// JSON array of {category, label, dim, dimLabel, bin, lo, hi, count, support,
// confidence, direction}, with bin bounds in original units.
std::string rulesToJson(const Dataset& dataset, const RuleSet& rules);

}  // namespace dimscope
