#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "wfr/grid.hpp"

namespace wfr {

struct GaussianPoint {
  double mu = 0.0;
  double sigma = 1.0;
};

enum class GeodesicKind { wasserstein, mixture, exponential, fisher_rao };

std::string_view to_string(GeodesicKind kind);
// Throws invalid_argument for unknown names.
GeodesicKind parse_geodesic_kind(std::string_view name);
inline constexpr GeodesicKind all_geodesic_kinds[] = {GeodesicKind::wasserstein, GeodesicKind::mixture,
                                                      GeodesicKind::exponential, GeodesicKind::fisher_rao};

// Grid used whenever a Gaussian endpoint has to be discretized.
struct GridSpec {
  double lo = -10.0;
  double hi = 10.0;
  std::size_t n_cells = 1024;
};

GridDensity to_grid(const GaussianPoint& p, const GridSpec& grid);

// Point at t in [0,1] on the geodesic between two densities of a common grid:
//   wasserstein  quantile interpolation F_t^{-1} = (1-t) F_0^{-1} + t F_1^{-1}
//   mixture      (1-t) rho0 + t rho1
//   exponential  rho0^(1-t) rho1^t, normalized (log-space)
//   fisher_rao   ((1-t) sqrt rho0 + t sqrt rho1)^2, normalized
// Inputs are normalized first. Throws domain_error for a zero density under
// exponential / fisher_rao.
GridDensity grid_geodesic(const GridDensity& rho0, const GridDensity& rho1, double t, GeodesicKind kind);

// ((1-t) sqrt rho0 + t sqrt rho1)^2 without renormalization (a straight line
// in the square-root embedding).
GridDensity hellinger_segment(const GridDensity& rho0, const GridDensity& rho1, double t);
// || sqrt a - sqrt b ||_{L^2}
double hellinger_distance(const GridDensity& a, const GridDensity& b);

using GeodesicPoint = std::variant<GaussianPoint, GridDensity>;

// Geodesic in the (mu, sigma) family. Mixture is not closed on Gaussians and
// comes back as a GridDensity on `grid`.
GeodesicPoint gaussian_geodesic(const GaussianPoint& p0, const GaussianPoint& p1, double t, GeodesicKind kind,
                                 const GridSpec& grid = {});

// Fisher metric ds^2 = (dmu^2 + 2 dsigma^2) / sigma^2 on N(mu, sigma^2):
// geodesic by RK4 shooting on the geodesic equations.
struct FisherRaoShooting {
  GaussianPoint start;
  double dmu;     // initial velocity
  double dsigma;
  std::size_t rk4_steps;

  GaussianPoint at(double t) const;
  // Riemannian length of the solved curve.
  double length() const;
};

FisherRaoShooting fisher_rao_shoot(const GaussianPoint& p0, const GaussianPoint& p1,
                                   std::size_t rk4_steps = 2000);

// Closed-form Fisher-Rao distance between two univariate Gaussians.
double fisher_rao_distance(const GaussianPoint& p0, const GaussianPoint& p1);

// Any geodesic point on a grid (Gaussian points are discretized).
GridDensity as_grid(const GeodesicPoint& g, const GridSpec& grid);

// For each s in linspace(0, 1, n_samples): the midpoint of the kind-i
// geodesic from p to gamma_uv(s), gamma_uv the kind-j geodesic from u to v.
// This midpoint construction is one reading of a "median trajectory".
std::vector<GeodesicPoint> median_trajectory(const GaussianPoint& p, const GaussianPoint& u,
                                             const GaussianPoint& v, GeodesicKind edge_kind,
                                             GeodesicKind uv_kind, std::size_t n_samples,
                                             const GridSpec& grid = {});

}  // namespace wfr
