#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dimscope {

// Missing numeric cells are stored as quiet NaN.
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
inline bool isMissing(double v) noexcept { return std::isnan(v); }

// Missing categorical cells.
inline constexpr std::int32_t kMissingCategory = -1;

struct NumericDimMeta {
  std::size_t id = 0;
  std::string label;
  double vmin = 0.0;  // over non-missing values only
  double vmax = 0.0;
  std::size_t missingCount = 0;

  // Constant (or entirely missing) dims have no defined correlation.
  bool isConstant() const noexcept { return !(vmax > vmin); }
};

struct CategoricalDimMeta {
  std::size_t id = 0;
  std::string label;
  std::vector<std::string> values;   // distinct, sorted
  std::vector<std::size_t> counts;   // parallel to values
  std::size_t missingCount = 0;
};

struct NumericColumn {
  std::string label;
  std::vector<double> values;
};

struct CategoricalColumn {
  std::string label;
  std::vector<std::optional<std::string>> values;
};

enum class ColumnType { Numeric, Categorical };

// Column label -> forced type. Unlisted columns are inferred.
using Schema = std::map<std::string, ColumnType>;

// Immutable column-major table of m items with n_v numeric and n_c categorical dims.
class Dataset {
 public:
  // Throws SchemaError when fewer than two numeric columns are supplied, and
  // InvalidArgument on ragged columns or zero items.
  Dataset(std::string name, std::vector<NumericColumn> numeric,
          std::vector<CategoricalColumn> categorical);

  const std::string& name() const noexcept { return name_; }
  std::size_t itemCount() const noexcept { return itemCount_; }
  std::size_t numericCount() const noexcept { return numeric_.size(); }
  std::size_t categoricalCount() const noexcept { return categorical_.size(); }

  std::span<const double> numeric(std::size_t dim) const { return numeric_.at(dim); }
  // Category codes index into categoricalMeta(dim).values; kMissingCategory when absent.
  std::span<const std::int32_t> categorical(std::size_t dim) const {
    return categorical_.at(dim);
  }

  const NumericDimMeta& numericMeta(std::size_t dim) const { return numericMeta_.at(dim); }
  const CategoricalDimMeta& categoricalMeta(std::size_t dim) const {
    return categoricalMeta_.at(dim);
  }
  const std::vector<NumericDimMeta>& numericDims() const noexcept { return numericMeta_; }
  const std::vector<CategoricalDimMeta>& categoricalDims() const noexcept {
    return categoricalMeta_;
  }

  std::optional<std::size_t> findNumeric(std::string_view label) const;
  std::optional<std::size_t> findCategorical(std::string_view label) const;

  // Order-sensitive FNV-1a hash of every column label and cell.
  std::uint64_t fingerprint() const noexcept { return fingerprint_; }

 private:
  std::string name_;
  std::size_t itemCount_ = 0;
  std::vector<std::vector<double>> numeric_;
  std::vector<std::vector<std::int32_t>> categorical_;
  std::vector<NumericDimMeta> numericMeta_;
  std::vector<CategoricalDimMeta> categoricalMeta_;
  std::uint64_t fingerprint_ = 0;
};

// Column order in the source file is not preserved: numeric columns come
// first on write, then categorical ones.
Dataset parseCsv(std::string_view text, const Schema& schema = {}, std::string name = "dataset");
Dataset loadCsv(const std::string& path, const Schema& schema = {});
std::string writeCsv(const Dataset& dataset);

// Reads a {column: "numeric"|"categorical"} sidecar.
Schema loadSchema(const std::string& path);
Schema parseSchema(std::string_view json);
std::string writeSchema(const Dataset& dataset);

// (v - vmin) / (vmax - vmin), clamped to [0, 1]; 0.5 for constant dims; NaN stays NaN.
double normalizeValue(const NumericDimMeta& dim, double v) noexcept;

struct BinningSpec {
  static constexpr int kMinBins = 2;
  static constexpr int kMaxBins = 64;

  int binCount = 8;

  // Throws InvalidArgument outside [kMinBins, kMaxBins].
  void validate() const;
  double binWidth(const NumericDimMeta& dim) const noexcept {
    return (dim.vmax - dim.vmin) / binCount;
  }
  double binLower(const NumericDimMeta& dim, int bin) const noexcept {
    return dim.vmin + bin * binWidth(dim);
  }
  double binUpper(const NumericDimMeta& dim, int bin) const noexcept {
    return bin + 1 == binCount ? dim.vmax : dim.vmin + (bin + 1) * binWidth(dim);
  }
};

// floor(B * normalizeValue(v)) with the top bin closed at vmax. v must not be missing.
int binIndex(const NumericDimMeta& dim, const BinningSpec& spec, double v) noexcept;

}  // namespace dimscope
