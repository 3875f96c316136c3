#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace wfr {

// Cell-centered density on a uniform 1-D grid over [lo, hi].
struct GridDensity {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t n_cells = 1;
  std::vector<double> values;

  GridDensity() = default;
  // Zero-filled when `values` is empty. Throws invalid_argument on a bad grid
  // or negative values.
  GridDensity(double lo, double hi, std::size_t n_cells, std::vector<double> values = {});

  double dx() const { return (hi - lo) / static_cast<double>(n_cells); }
  double center(std::size_t i) const { return lo + (static_cast<double>(i) + 0.5) * dx(); }
  double edge(std::size_t i) const { return lo + static_cast<double>(i) * dx(); }
  std::vector<double> centers() const;
  std::vector<double> edges() const;

  // sum values * dx
  double mass() const;
  // Scales to unit mass; throws numerical_failure if the mass is not positive.
  GridDensity& normalize();

  bool same_grid(const GridDensity& other) const;

  // Samples fn at the cell centers and normalizes.
  static GridDensity from_function(double lo, double hi, std::size_t n_cells,
                                   const std::function<double(double)>& fn);
  static GridDensity gaussian(double lo, double hi, std::size_t n_cells, double mean, double var);
};

double l1_distance(const GridDensity& a, const GridDensity& b);

// Mass of each bin [edges[b], edges[b+1]) treating the density as constant
// within a cell. Returns edges.size() + 1 entries: below, bins..., above.
std::vector<double> grid_bin_masses(const GridDensity& g, std::span<const double> edges);

// Centered differences on cell values; NaN at the two end cells.
std::vector<double> centered_derivative(std::span<const double> f, double dx);
std::vector<double> centered_laplacian(std::span<const double> f, double dx);

}  // namespace wfr
