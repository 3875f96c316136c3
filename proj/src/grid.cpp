#include "wfr/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include "wfr/error.hpp"

namespace wfr {

GridDensity::GridDensity(double lo_, double hi_, std::size_t n, std::vector<double> v)
    : lo(lo_), hi(hi_), n_cells(n), values(std::move(v)) {
  if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
    fail(ErrorKind::invalid_argument, "grid: need finite lo < hi");
  }
  if (n_cells == 0) fail(ErrorKind::invalid_argument, "grid: n_cells must be >= 1");
  if (values.empty()) values.assign(n_cells, 0.0);
  if (values.size() != n_cells) fail(ErrorKind::invalid_argument, "grid: values size != n_cells");
  for (double x : values) {
    if (!(x >= 0.0)) fail(ErrorKind::invalid_argument, "grid: density values must be >= 0");
  }
}

std::vector<double> GridDensity::centers() const {
  std::vector<double> c(n_cells);
  for (std::size_t i = 0; i < n_cells; ++i) c[i] = center(i);
  return c;
}

std::vector<double> GridDensity::edges() const {
  std::vector<double> e(n_cells + 1);
  for (std::size_t i = 0; i <= n_cells; ++i) e[i] = edge(i);
  e[n_cells] = hi;
  return e;
}

double GridDensity::mass() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s * dx();
}

GridDensity& GridDensity::normalize() {
  const double m = mass();
  if (!(m > 0.0) || !std::isfinite(m)) fail(ErrorKind::numerical_failure, "grid: cannot normalize zero mass");
  for (double& v : values) v /= m;
  return *this;
}

bool GridDensity::same_grid(const GridDensity& o) const {
  return lo == o.lo && hi == o.hi && n_cells == o.n_cells;
}

GridDensity GridDensity::from_function(double lo, double hi, std::size_t n,
                                       const std::function<double(double)>& fn) {
  GridDensity g(lo, hi, n);
  for (std::size_t i = 0; i < n; ++i) g.values[i] = fn(g.center(i));
  for (double v : g.values) {
    if (!(v >= 0.0)) fail(ErrorKind::invalid_argument, "grid: function must be nonnegative");
  }
  g.normalize();
  return g;
}

GridDensity GridDensity::gaussian(double lo, double hi, std::size_t n, double mean, double var) {
  if (!(var > 0.0)) fail(ErrorKind::invalid_argument, "grid: gaussian variance must be positive");
  return from_function(lo, hi, n, [&](double x) {
    const double z = x - mean;
    return std::exp(-0.5 * z * z / var) / std::sqrt(2.0 * std::numbers::pi * var);
  });
}

double l1_distance(const GridDensity& a, const GridDensity& b) {
  if (!a.same_grid(b)) fail(ErrorKind::invalid_argument, "l1_distance: grids differ");
  double s = 0.0;
  for (std::size_t i = 0; i < a.n_cells; ++i) s += std::abs(a.values[i] - b.values[i]);
  return s * a.dx();
}

std::vector<double> grid_bin_masses(const GridDensity& g, std::span<const double> edges) {
  if (edges.size() < 2 || !std::is_sorted(edges.begin(), edges.end())) {
    fail(ErrorKind::invalid_argument, "grid_bin_masses: need >= 2 sorted edges");
  }
  const std::size_t nb = edges.size() - 1;
  std::vector<double> out(nb + 2, 0.0);
  const double dx = g.dx();
  for (std::size_t i = 0; i < g.n_cells; ++i) {
    const double a = g.edge(i), b = a + dx, dens = g.values[i];
    if (dens == 0.0) continue;
    // below / above the binned range
    if (a < edges.front()) out[0] += dens * (std::min(b, edges.front()) - a);
    if (b > edges.back()) out[nb + 1] += dens * (b - std::max(a, edges.back()));
    auto it = std::upper_bound(edges.begin(), edges.end(), a);
    std::size_t j = it == edges.begin() ? 0 : static_cast<std::size_t>(it - edges.begin()) - 1;
    for (; j < nb && edges[j] < b; ++j) {
      const double overlap = std::min(b, edges[j + 1]) - std::max(a, edges[j]);
      if (overlap > 0.0) out[j + 1] += dens * overlap;
    }
  }
  return out;
}

std::vector<double> centered_derivative(std::span<const double> f, double dx) {
  const std::size_t n = f.size();
  std::vector<double> out(n, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (f[i + 1] - f[i - 1]) / (2.0 * dx);
  return out;
}

std::vector<double> centered_laplacian(std::span<const double> f, double dx) {
  const std::size_t n = f.size();
  std::vector<double> out(n, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / (dx * dx);
  return out;
}

}  // namespace wfr
