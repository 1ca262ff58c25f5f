#include "dimscope/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <thread>

#include "dimscope/error.hpp"

namespace dimscope {

static_assert(std::endian::native == std::endian::little,
              "distance cache I/O assumes a little-endian host");

namespace {

constexpr char kCacheMagic[4] = {'D', 'S', 'D', 'M'};
constexpr std::uint32_t kCacheVersion = 1;

// Ranks of `values` (no missing entries) minus their mean (n+1)/2.
// Average ranks always sum to n(n+1)/2, so the centering is exact.
std::vector<double> centeredRanks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t l, std::size_t r) { return values[l] < values[r]; });
  std::vector<double> ranks(n);
  const double mean = (static_cast<double>(n) + 1.0) / 2.0;
  std::size_t start = 0;
  while (start < n) {
    std::size_t end = start;
    while (end + 1 < n && values[order[end + 1]] == values[order[start]]) ++end;
    const double rank = (static_cast<double>(start) + static_cast<double>(end)) / 2.0 + 1.0;
    for (std::size_t p = start; p <= end; ++p) ranks[order[p]] = rank - mean;
    start = end + 1;
  }
  return ranks;
}

double norm(std::span<const double> centered) {
  double sum = 0.0;
  for (double c : centered) sum += c * c;
  return std::sqrt(sum);
}

double rankCorrelation(std::span<const double> a, double normA, std::span<const double> b,
                       double normB) {
  double dot = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
  return std::clamp(dot / (normA * normB), -1.0, 1.0);
}

struct RankedDim {
  std::vector<double> centered;
  double norm = 0.0;
  bool complete = false;  // no missing values; centered ranks are reusable
};

template <typename T>
void writePod(std::ofstream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof value);
}

template <typename T>
void readPod(std::ifstream& in, T& value, const std::string& path) {
  in.read(reinterpret_cast<char*>(&value), sizeof value);
  if (!in) throw Error(ErrorCode::Format, "truncated distance cache '" + path + "'");
}

}  // namespace

const char* nameOf(DistanceMetric metric) noexcept {
  return metric == DistanceMetric::Literal ? "literal" : "abs";
}

DistanceMetric parseMetric(const std::string& name) {
  if (name == "literal") return DistanceMetric::Literal;
  if (name == "abs") return DistanceMetric::AbsoluteCorrelation;
  throw Error(ErrorCode::InvalidArgument, "unknown metric '" + name + "' (expected abs|literal)");
}

double metricMaxDistance(DistanceMetric metric) noexcept {
  return metric == DistanceMetric::Literal ? 2.0 : 1.0;
}

double distanceFromCorrelation(DistanceMetric metric, double rho) noexcept {
  return metric == DistanceMetric::Literal ? std::abs(1.0 - rho) : 1.0 - std::abs(rho);
}

std::vector<double> rankTransform(std::span<const double> values) {
  std::vector<double> present;
  present.reserve(values.size());
  for (double v : values) {
    if (!isMissing(v)) present.push_back(v);
  }
  if (present.size() < 2) {
    throw Error(ErrorCode::DegenerateDim, "rank transform needs at least 2 non-missing values");
  }
  const auto centered = centeredRanks(present);
  const double mean = (static_cast<double>(present.size()) + 1.0) / 2.0;
  std::vector<double> ranks(values.size(), kMissing);
  std::size_t p = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!isMissing(values[i])) ranks[i] = centered[p++] + mean;
  }
  return ranks;
}

double spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::InvalidArgument, "spearman: vectors differ in length");
  }
  std::vector<double> ca, cb;
  ca.reserve(a.size());
  cb.reserve(b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!isMissing(a[i]) && !isMissing(b[i])) {
      ca.push_back(a[i]);
      cb.push_back(b[i]);
    }
  }
  if (ca.size() < 2) {
    throw Error(ErrorCode::DegenerateDim, "spearman: fewer than 2 pairwise-complete items");
  }
  const auto ra = centeredRanks(ca);
  const auto rb = centeredRanks(cb);
  const double na = norm(ra);
  const double nb = norm(rb);
  if (na == 0.0 || nb == 0.0) {
    throw Error(ErrorCode::DegenerateDim, "spearman: constant ranks on the common items");
  }
  return rankCorrelation(ra, na, rb, nb);
}

DistanceMatrix::DistanceMatrix(std::size_t size, DistanceMetric metric, std::uint64_t fingerprint)
    : size_(size),
      metric_(metric),
      fingerprint_(fingerprint),
      data_(size * size, kMissing),
      defined_(size, 0) {}

double DistanceMatrix::distanceOrMax(std::size_t j, std::size_t k) const noexcept {
  const double d = (*this)(j, k);
  return isMissing(d) ? metricMaxDistance(metric_) : d;
}

bool DistanceMatrix::operator==(const DistanceMatrix& other) const noexcept {
  if (size_ != other.size_ || metric_ != other.metric_ || fingerprint_ != other.fingerprint_ ||
      defined_ != other.defined_) {
    return false;
  }
  // Bitwise so that NaN entries compare equal.
  return std::memcmp(data_.data(), other.data_.data(), data_.size() * sizeof(double)) == 0;
}

DistanceMatrix distanceMatrix(const Dataset& dataset, DistanceMetric metric, unsigned workers) {
  const std::size_t n = dataset.numericCount();
  DistanceMatrix matrix(n, metric, dataset.fingerprint());

  std::vector<RankedDim> ranked(n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto& meta = dataset.numericMeta(j);
    const bool usable = !meta.isConstant() && dataset.itemCount() - meta.missingCount >= 2;
    matrix.setDefined(j, usable);
    if (!usable) continue;
    matrix.set(j, j, 0.0);
    if (meta.missingCount == 0) {
      ranked[j].centered = centeredRanks(dataset.numeric(j));
      ranked[j].norm = norm(ranked[j].centered);
      ranked[j].complete = true;
    }
  }

  auto computeRow = [&](std::size_t j) {
    if (!matrix.defined(j)) return;
    for (std::size_t k = 0; k < j; ++k) {
      if (!matrix.defined(k)) continue;
      double rho = kMissing;
      if (ranked[j].complete && ranked[k].complete) {
        rho = rankCorrelation(ranked[j].centered, ranked[j].norm, ranked[k].centered,
                              ranked[k].norm);
      } else {
        try {
          rho = spearman(dataset.numeric(j), dataset.numeric(k));
        } catch (const Error&) {
          // pair stays undefined
        }
      }
      // Rows own disjoint (j, k < j) cells, so concurrent writes never overlap.
      matrix.set(j, k, isMissing(rho) ? kMissing : distanceFromCorrelation(metric, rho));
    }
  };

  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  if (workers == 1 || n < 64) {
    for (std::size_t j = 0; j < n; ++j) computeRow(j);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t j = next++; j < n; j = next++) computeRow(j);
      });
    }
  }
  return matrix;
}

void saveDistanceCache(const DistanceMatrix& matrix, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
  out.write(kCacheMagic, sizeof kCacheMagic);
  writePod(out, kCacheVersion);
  writePod(out, matrix.fingerprint());
  writePod(out, static_cast<std::uint8_t>(matrix.metric()));
  writePod(out, static_cast<std::uint32_t>(matrix.size()));
  for (std::size_t j = 0; j < matrix.size(); ++j) {
    writePod(out, static_cast<std::uint8_t>(matrix.defined(j) ? 1 : 0));
  }
  for (std::size_t j = 1; j < matrix.size(); ++j) {
    for (std::size_t k = 0; k < j; ++k) writePod(out, matrix(j, k));
  }
  if (!out) throw Error(ErrorCode::Io, "failed writing '" + path + "'");
}

DistanceMatrix loadDistanceCache(const std::string& path, const Dataset& dataset) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  char magic[4];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kCacheMagic, sizeof magic) != 0) {
    throw Error(ErrorCode::Format, "'" + path + "' is not a distance cache");
  }
  std::uint32_t version = 0;
  std::uint64_t fingerprint = 0;
  std::uint8_t metricByte = 0;
  std::uint32_t n = 0;
  readPod(in, version, path);
  if (version != kCacheVersion) {
    throw Error(ErrorCode::Format, "unsupported distance cache version " + std::to_string(version));
  }
  readPod(in, fingerprint, path);
  readPod(in, metricByte, path);
  readPod(in, n, path);
  if (metricByte > 1) throw Error(ErrorCode::Format, "unknown metric tag in distance cache");
  if (fingerprint != dataset.fingerprint() || n != dataset.numericCount()) {
    throw Error(ErrorCode::FingerprintMismatch,
                "distance cache '" + path + "' was computed from different data");
  }
  DistanceMatrix matrix(n, static_cast<DistanceMetric>(metricByte), fingerprint);
  for (std::size_t j = 0; j < n; ++j) {
    std::uint8_t flag = 0;
    readPod(in, flag, path);
    matrix.setDefined(j, flag != 0);
    if (flag != 0) matrix.set(j, j, 0.0);
  }
  for (std::size_t j = 1; j < n; ++j) {
    for (std::size_t k = 0; k < j; ++k) {
      double d = 0.0;
      readPod(in, d, path);
      matrix.set(j, k, d);
    }
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw Error(ErrorCode::Format, "trailing bytes in distance cache '" + path + "'");
  }
  return matrix;
}

}  // namespace dimscope
