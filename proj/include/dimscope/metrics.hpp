#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dimscope/dataset.hpp"

namespace dimscope {

// Literal:             d = |1 - rho|, range [0, 2]
// AbsoluteCorrelation: d = 1 - |rho|, range [0, 1]
enum class DistanceMetric : std::uint8_t { Literal = 0, AbsoluteCorrelation = 1 };

const char* nameOf(DistanceMetric metric) noexcept;
DistanceMetric parseMetric(const std::string& name);  // "literal" | "abs"
double metricMaxDistance(DistanceMetric metric) noexcept;
double distanceFromCorrelation(DistanceMetric metric, double rho) noexcept;

// Average ranks (1-based) over the non-missing entries; missing stays NaN.
// Throws DegenerateDim with fewer than two non-missing values.
std::vector<double> rankTransform(std::span<const double> values);

// Spearman's rho over the pairwise-complete items of a and b.
// Throws DegenerateDim when either rank vector is constant on that set.
double spearman(std::span<const double> a, std::span<const double> b);

// Symmetric n_v x n_v matrix. Entries touching a constant dim (or a pair whose
// correlation is undefined) are NaN; the diagonal of a defined dim is 0.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  DistanceMatrix(std::size_t size, DistanceMetric metric, std::uint64_t fingerprint);

  std::size_t size() const noexcept { return size_; }
  DistanceMetric metric() const noexcept { return metric_; }
  std::uint64_t fingerprint() const noexcept { return fingerprint_; }

  double operator()(std::size_t j, std::size_t k) const noexcept { return data_[j * size_ + k]; }
  void set(std::size_t j, std::size_t k, double d) noexcept {
    data_[j * size_ + k] = d;
    data_[k * size_ + j] = d;
  }

  bool defined(std::size_t j) const noexcept { return defined_[j] != 0; }
  void setDefined(std::size_t j, bool defined) noexcept { defined_[j] = defined ? 1 : 0; }

  // The defined entry, or the metric's maximum when the pair has no correlation.
  double distanceOrMax(std::size_t j, std::size_t k) const noexcept;

  bool operator==(const DistanceMatrix& other) const noexcept;

 private:
  std::size_t size_ = 0;
  DistanceMetric metric_ = DistanceMetric::AbsoluteCorrelation;
  std::uint64_t fingerprint_ = 0;
  std::vector<double> data_;
  std::vector<std::uint8_t> defined_;
};

// workers == 0 uses the hardware concurrency.
DistanceMatrix distanceMatrix(const Dataset& dataset, DistanceMetric metric,
                              unsigned workers = 1);

// Binary cache file, little-endian:
//   "DSDM" | u32 version | u64 fingerprint | u8 metric | u32 n | n x u8 defined |
//   n(n-1)/2 x f64 strictly-lower triangle, row-major (row 1 col 0, row 2 col 0..1, ...)
void saveDistanceCache(const DistanceMatrix& matrix, const std::string& path);
// Throws FingerprintMismatch when the cache was computed from different data.
DistanceMatrix loadDistanceCache(const std::string& path, const Dataset& dataset);

}  // namespace dimscope
