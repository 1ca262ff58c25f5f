#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "dimscope/error.hpp"
#include "dimscope/metrics.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace dimscope;

namespace {

std::vector<double> randomWithTies(std::mt19937_64& rng, std::size_t n, double missingRate) {
  std::uniform_int_distribution<int> small(0, 6);
  std::bernoulli_distribution missing(missingRate);
  std::vector<double> v(n);
  for (double& x : v) x = missing(rng) ? kMissing : small(rng) * 0.5;
  return v;
}

ErrorCode codeOf(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Cancelled;
}

}  // namespace

TEST_CASE("rankTransform examples") {
  CHECK(rankTransform(std::vector<double>{10, 20, 30}) == std::vector<double>{1, 2, 3});
  CHECK(rankTransform(std::vector<double>{5, 5, 7}) == std::vector<double>{1.5, 1.5, 3});
  const auto r = rankTransform(std::vector<double>{3, kMissing, 1});
  CHECK(r[0] == 2);
  CHECK(isMissing(r[1]));
  CHECK(r[2] == 1);
  CHECK(codeOf([] { rankTransform(std::vector<double>{1, kMissing}); }) == ErrorCode::DegenerateDim);
}

TEST_CASE("rankTransform matches the O(m^2) oracle") {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 200; ++t) {
    const auto v = randomWithTies(rng, 20, 0.1);
    if (std::count_if(v.begin(), v.end(), [](double x) { return !std::isnan(x); }) < 2) continue;
    const auto got = rankTransform(v);
    const auto want = oracle::ranks(v);
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (std::isnan(want[i])) {
        CHECK(std::isnan(got[i]));
      } else {
        CHECK(got[i] == want[i]);
      }
    }
  }
}

TEST_CASE("spearman examples") {
  const std::vector<double> a{1, 2, 3, 4};
  CHECK(spearman(a, std::vector<double>{10, 20, 30, 40}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(spearman(a, std::vector<double>{40, 30, 20, 10}) == doctest::Approx(-1.0).epsilon(1e-15));
  const std::vector<double> x{1, 2, 3, 4, 5}, y{2, 1, 4, 3, 5};
  CHECK(std::abs(spearman(x, y) - oracle::spearman(x, y)) <= 1e-12);
  CHECK(spearman(x, y) == doctest::Approx(0.8));
}

TEST_CASE("spearman degenerate inputs") {
  CHECK(codeOf([] { spearman(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}); }) ==
        ErrorCode::DegenerateDim);
  // Only one pairwise-complete item.
  CHECK(codeOf([] {
          spearman(std::vector<double>{1, kMissing, 3}, std::vector<double>{kMissing, 2, 3});
        }) == ErrorCode::DegenerateDim);
}

TEST_CASE("spearman matches oracle with ties and missing values") {
  std::mt19937_64 rng(2);
  int compared = 0;
  for (int t = 0; t < 500; ++t) {
    const std::size_t n = 2 + rng() % 49;
    const auto a = randomWithTies(rng, n, 0.15);
    const auto b = randomWithTies(rng, n, 0.15);
    double got;
    try {
      got = spearman(a, b);
    } catch (const Error&) {
      continue;
    }
    CHECK(std::abs(got - oracle::spearman(a, b)) <= 1e-12);
    ++compared;
  }
  CHECK(compared > 400);
}

TEST_CASE("distance from correlation") {
  for (auto metric : {DistanceMetric::Literal, DistanceMetric::AbsoluteCorrelation}) {
    CHECK(distanceFromCorrelation(metric, 1.0) == 0.0);
  }
  CHECK(distanceFromCorrelation(DistanceMetric::Literal, -1.0) == 2.0);
  CHECK(distanceFromCorrelation(DistanceMetric::AbsoluteCorrelation, -1.0) == 0.0);
  CHECK(metricMaxDistance(DistanceMetric::Literal) == 2.0);
  CHECK(metricMaxDistance(DistanceMetric::AbsoluteCorrelation) == 1.0);
  CHECK(parseMetric("literal") == DistanceMetric::Literal);
  CHECK(parseMetric("abs") == DistanceMetric::AbsoluteCorrelation);
  CHECK_THROWS_AS(parseMetric("pearson"), Error);
}

TEST_CASE("(a, -a) metric consistency") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  std::vector<double> a(30), b(30), c(30);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = g(rng);
    b[i] = -a[i];
    c[i] = g(rng);
  }
  const Dataset d = fixture::fromColumns({a, b, c});
  CHECK(distanceMatrix(d, DistanceMetric::AbsoluteCorrelation)(0, 1) == doctest::Approx(0.0));
  CHECK(distanceMatrix(d, DistanceMetric::Literal)(0, 1) == doctest::Approx(2.0));
}

TEST_CASE("12-dim matrix equals pairwise spearman calls") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  std::bernoulli_distribution missing(0.05);
  std::vector<std::vector<double>> cols(12, std::vector<double>(80));
  for (auto& col : cols) {
    for (double& v : col) v = missing(rng) ? kMissing : std::round(g(rng) * 4) / 4;
  }
  const Dataset d = fixture::fromColumns(cols);
  for (auto metric : {DistanceMetric::Literal, DistanceMetric::AbsoluteCorrelation}) {
    const DistanceMatrix dm = distanceMatrix(d, metric);
    REQUIRE(dm.size() == 12);
    for (std::size_t j = 0; j < 12; ++j) {
      CHECK(dm(j, j) == 0.0);
      for (std::size_t k = 0; k < 12; ++k) {
        CHECK(dm(j, k) == dm(k, j));
        if (j == k) continue;
        const double want = distanceFromCorrelation(metric, spearman(d.numeric(j), d.numeric(k)));
        CHECK(dm(j, k) == doctest::Approx(want).epsilon(1e-12));
        CHECK(dm(j, k) >= 0.0);
        CHECK(dm(j, k) <= metricMaxDistance(metric));
      }
    }
  }
}

TEST_CASE("fast path is bit-identical to spearman without missing values") {
  const Dataset d = fixture::plantedGroups(9, 50, 6, 2, 0.5);
  const DistanceMatrix dm = distanceMatrix(d, DistanceMetric::AbsoluteCorrelation);
  for (std::size_t j = 0; j < 6; ++j) {
    for (std::size_t k = j + 1; k < 6; ++k) {
      CHECK(dm(j, k) == 1.0 - std::abs(spearman(d.numeric(j), d.numeric(k))));
    }
  }
}

TEST_CASE("constant dims are undefined") {
  const Dataset d = fixture::fromColumns({{1, 2, 3, 4}, {5, 5, 5, 5}, {4, 1, 3, 2}});
  const DistanceMatrix dm = distanceMatrix(d, DistanceMetric::AbsoluteCorrelation);
  CHECK(dm.defined(0));
  CHECK_FALSE(dm.defined(1));
  CHECK(dm.defined(2));
  CHECK(std::isnan(dm(0, 1)));
  CHECK(dm.distanceOrMax(0, 1) == 1.0);
  CHECK(std::isnan(dm(1, 1)));
  CHECK(dm(0, 0) == 0.0);
}

TEST_CASE("monotone transforms leave distances unchanged") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (int t = 0; t < 20; ++t) {
    std::vector<std::vector<double>> cols(5, std::vector<double>(40));
    for (auto& col : cols) {
      for (double& v : col) v = std::round(g(rng) * 3);
    }
    auto transformed = cols;
    for (double& v : transformed[2]) v = std::exp(v) * 3 + 7;
    const auto a = distanceMatrix(fixture::fromColumns(cols), DistanceMetric::Literal);
    const auto b = distanceMatrix(fixture::fromColumns(transformed), DistanceMetric::Literal);
    for (std::size_t j = 0; j < 5; ++j) {
      for (std::size_t k = 0; k < 5; ++k) {
        if (std::isnan(a(j, k))) continue;
        CHECK(a(j, k) == doctest::Approx(b(j, k)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("parallel computation equals single worker") {
  const Dataset d = fixture::plantedGroups(6, 120, 90, 6, 0.3);
  const auto one = distanceMatrix(d, DistanceMetric::AbsoluteCorrelation, 1);
  const auto four = distanceMatrix(d, DistanceMetric::AbsoluteCorrelation, 4);
  CHECK(one == four);
}

TEST_CASE("cache round trip and error handling") {
  const Dataset d = fixture::plantedGroups(7, 60, 10, 2, 0.3);
  const auto dm = distanceMatrix(d, DistanceMetric::Literal);
  const std::string path = fixture::tempPath("metrics_cache.dsdm");
  saveDistanceCache(dm, path);
  const auto loaded = loadDistanceCache(path, d);
  CHECK(loaded == dm);
  CHECK(loaded.metric() == DistanceMetric::Literal);
  CHECK(loaded.fingerprint() == d.fingerprint());

  SUBCASE("one edited cell") {
    auto cols = std::vector<std::vector<double>>{};
    for (std::size_t j = 0; j < d.numericCount(); ++j) {
      cols.emplace_back(d.numeric(j).begin(), d.numeric(j).end());
    }
    cols[3][17] += 1e-9;
    CHECK(codeOf([&] { loadDistanceCache(path, fixture::fromColumns(cols)); }) ==
          ErrorCode::FingerprintMismatch);
  }
  SUBCASE("truncated, garbage and trailing bytes") {
    std::ifstream in(path, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), {});
    const auto truncated = fixture::writeTemp("truncated.dsdm", bytes.substr(0, bytes.size() - 3));
    CHECK(codeOf([&] { loadDistanceCache(truncated, d); }) == ErrorCode::Format);
    const auto garbage = fixture::writeTemp("garbage.dsdm", "not a cache at all");
    CHECK(codeOf([&] { loadDistanceCache(garbage, d); }) == ErrorCode::Format);
    const auto trailing = fixture::writeTemp("trailing.dsdm", bytes + "x");
    CHECK(codeOf([&] { loadDistanceCache(trailing, d); }) == ErrorCode::Format);
    auto badVersion = bytes;
    badVersion[4] = 9;
    CHECK(codeOf([&] { loadDistanceCache(fixture::writeTemp("version.dsdm", badVersion), d); }) ==
          ErrorCode::Format);
  }
  SUBCASE("missing file") {
    CHECK(codeOf([&] { loadDistanceCache("/nonexistent/x.dsdm", d); }) == ErrorCode::Io);
  }
}

TEST_CASE("cache keeps undefined entries") {
  const Dataset d = fixture::fromColumns({{1, 2, 3, 4}, {5, 5, 5, 5}, {4, 1, 3, 2}});
  const auto dm = distanceMatrix(d, DistanceMetric::AbsoluteCorrelation);
  const std::string path = fixture::tempPath("undefined.dsdm");
  saveDistanceCache(dm, path);
  const auto loaded = loadDistanceCache(path, d);
  CHECK(loaded == dm);
  CHECK_FALSE(loaded.defined(1));
}
