#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "wfr/core.hpp"

namespace wfr {

// n_bins equal bins over [lo, hi] plus an underflow (front) and overflow
// (back) bin; entries sum to the total weight.
std::vector<double> weighted_histogram(std::span<const double> x, std::span<const double> w, double lo, double hi,
                                       std::size_t n_bins);
std::vector<double> linspace(double lo, double hi, std::size_t n);

// 1/2 sum |p - q| after normalizing both.
double total_variation(std::span<const double> p, std::span<const double> q);

// W1 between two weighted 1-D samples (weights normalized internally).
double wasserstein1(std::span<const double> x, std::span<const double> wx, std::span<const double> y,
                    std::span<const double> wy);

struct Moments {
  double mean;
  double variance;
};

Moments weighted_moments(std::span<const double> x, std::span<const double> w);

// Coordinate `c` of every particle with its normalized weight (dead
// particles get weight 0).
struct WeightedSample {
  std::vector<double> x;
  std::vector<double> w;
};
WeightedSample weighted_coordinate(const Ensemble& e, std::size_t c = 0);

}  // namespace wfr
