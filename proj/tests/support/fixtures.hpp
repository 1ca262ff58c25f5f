// Synthetic datasets shared by unit tests and the acceptance suite.
#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "dimscope/dataset.hpp"
#include "dimscope/metrics.hpp"

namespace fixture {

dimscope::Dataset fromColumns(const std::vector<std::vector<double>>& numeric,
                              const std::vector<std::vector<std::string>>& categorical = {});

// Four dims forming two perfectly correlated pairs (a,b) and (c,d) with d = -c,
// plus a categorical "group" column. Cross-pair |rho| is small.
dimscope::Dataset twoPairs();
std::string twoPairsCsv();

// `groups` blocks of dims driven by a shared latent variable plus noise; a few
// dims are sign-flipped. Dim j belongs to group j % groups.
dimscope::Dataset plantedGroups(std::uint64_t seed, std::size_t items, std::size_t dims,
                                std::size_t groups, double noise);

// 100 items: 20 labelled "A" with dim 0 inside its lowest bin, 80 others spread above.
dimscope::Dataset perfectSeparation();
std::string perfectSeparationCsv();

// Square matrix with the given (symmetric) entries.
dimscope::DistanceMatrix matrixFrom(const std::vector<std::vector<double>>& d,
                                    dimscope::DistanceMetric metric =
                                        dimscope::DistanceMetric::AbsoluteCorrelation);

// Random symmetric matrix with zero diagonal and entries uniform in [0, 1).
dimscope::DistanceMatrix randomMatrix(std::mt19937_64& rng, std::size_t n);

std::string writeTemp(const std::string& name, const std::string& content);
std::string tempPath(const std::string& name);

}  // namespace fixture
