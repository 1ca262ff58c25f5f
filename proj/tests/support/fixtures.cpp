#include "fixtures.hpp"

#include <filesystem>
#include <fstream>
#include <optional>

namespace fixture {

dimscope::Dataset fromColumns(const std::vector<std::vector<double>>& numeric,
                              const std::vector<std::vector<std::string>>& categorical) {
  std::vector<dimscope::NumericColumn> num;
  for (std::size_t j = 0; j < numeric.size(); ++j) {
    num.push_back({"v" + std::to_string(j), numeric[j]});
  }
  std::vector<dimscope::CategoricalColumn> cat;
  for (std::size_t k = 0; k < categorical.size(); ++k) {
    dimscope::CategoricalColumn column{"c" + std::to_string(k), {}};
    for (const auto& v : categorical[k]) {
      column.values.push_back(v.empty() ? std::nullopt : std::optional<std::string>(v));
    }
    cat.push_back(std::move(column));
  }
  return dimscope::Dataset("fixture", std::move(num), std::move(cat));
}

std::string twoPairsCsv() {
  std::string csv = "a,b,c,d,group\n";
  for (int i = 0; i < 40; ++i) {
    const int x = i;
    const int y = (i * 17) % 40;
    csv += std::to_string(x) + "," + std::to_string(2 * x + 1) + "," + std::to_string(y) + "," +
           std::to_string(-y) + "," + (i % 3 == 0 ? "red" : i % 3 == 1 ? "green" : "blue") + "\n";
  }
  return csv;
}

dimscope::Dataset twoPairs() { return dimscope::parseCsv(twoPairsCsv(), {}, "two-pairs"); }

dimscope::Dataset plantedGroups(std::uint64_t seed, std::size_t items, std::size_t dims,
                                std::size_t groups, double noise) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::vector<double>> latent(groups, std::vector<double>(items));
  for (auto& g : latent) {
    for (double& v : g) v = normal(rng);
  }
  std::vector<std::vector<double>> columns(dims, std::vector<double>(items));
  for (std::size_t j = 0; j < dims; ++j) {
    const double sign = j % 5 == 3 ? -1.0 : 1.0;
    for (std::size_t i = 0; i < items; ++i) {
      columns[j][i] = sign * latent[j % groups][i] + noise * normal(rng);
    }
  }
  return fromColumns(columns);
}

std::string perfectSeparationCsv() {
  std::string csv = "x,y,label\n";
  for (int i = 0; i < 100; ++i) {
    // x: A items in [0, 1), others in [10, 80]; y is unrelated noise.
    const bool isA = i < 20;
    const double x = isA ? i * 0.05 : 10.0 + (i - 20) * (70.0 / 79.0);
    const int y = (i * 37) % 100;
    csv += std::to_string(x) + "," + std::to_string(y) + "," + (isA ? "A" : (i % 2 ? "B" : "C")) + "\n";
  }
  return csv;
}

dimscope::Dataset perfectSeparation() {
  return dimscope::parseCsv(perfectSeparationCsv(), {}, "separation");
}

dimscope::DistanceMatrix matrixFrom(const std::vector<std::vector<double>>& d,
                                    dimscope::DistanceMetric metric) {
  dimscope::DistanceMatrix dm(d.size(), metric, 0);
  for (std::size_t j = 0; j < d.size(); ++j) {
    dm.setDefined(j, true);
    for (std::size_t k = 0; k < d.size(); ++k) dm.set(j, k, j == k ? 0.0 : d[j][k]);
  }
  return dm;
}

dimscope::DistanceMatrix randomMatrix(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  dimscope::DistanceMatrix dm(n, dimscope::DistanceMetric::AbsoluteCorrelation, 0);
  for (std::size_t j = 0; j < n; ++j) {
    dm.setDefined(j, true);
    dm.set(j, j, 0.0);
    for (std::size_t k = j + 1; k < n; ++k) dm.set(j, k, unit(rng));
  }
  return dm;
}

std::string tempPath(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "dimscope-tests";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

std::string writeTemp(const std::string& name, const std::string& content) {
  const std::string path = tempPath(name);
  std::ofstream(path, std::ios::binary) << content;
  return path;
}

}  // namespace fixture
