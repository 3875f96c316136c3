#include "wfr/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "wfr/error.hpp"

namespace wfr {

std::string_view to_string(GeodesicKind kind) {
  switch (kind) {
    case GeodesicKind::wasserstein: return "wasserstein";
    case GeodesicKind::mixture: return "mixture";
    case GeodesicKind::exponential: return "exponential";
    case GeodesicKind::fisher_rao: return "fisher_rao";
  }
  return "unknown";
}

GeodesicKind parse_geodesic_kind(std::string_view name) {
  for (GeodesicKind k : all_geodesic_kinds) {
    if (to_string(k) == name) return k;
  }
  fail(ErrorKind::invalid_argument, "unknown geodesic kind '" + std::string(name) + "'");
}

GridDensity to_grid(const GaussianPoint& p, const GridSpec& grid) {
  if (!(p.sigma > 0.0)) fail(ErrorKind::invalid_argument, "gaussian point: sigma must be positive");
  return GridDensity::gaussian(grid.lo, grid.hi, grid.n_cells, p.mu, p.sigma * p.sigma);
}

namespace {

void check_t(double t) {
  if (!(t >= 0.0 && t <= 1.0)) fail(ErrorKind::invalid_argument, "geodesic: t must lie in [0,1]");
}

GridDensity normalized(const GridDensity& g) {
  GridDensity out = g;
  out.normalize();
  return out;
}

void require_positive(const GridDensity& g, std::string_view what) {
  for (double v : g.values) {
    if (!(v > 0.0)) fail(ErrorKind::domain_error, std::string(what) + " geodesic needs strictly positive densities");
  }
}

std::vector<double> cdf_at_edges(const GridDensity& g) {
  std::vector<double> f(g.n_cells + 1, 0.0);
  double total = 0.0;
  for (double v : g.values) total += v;
  double run = 0.0;
  for (std::size_t i = 0; i < g.n_cells; ++i) {
    run += g.values[i];
    f[i + 1] = run / total;
  }
  f[g.n_cells] = 1.0;
  return f;
}

// Quantile of the piecewise-uniform density at u, using the cell that holds
// the mass just around `u_mid` (so flat CDF stretches are skipped).
double quantile(const GridDensity& g, const std::vector<double>& cdf, double u, double u_mid) {
  auto it = std::upper_bound(cdf.begin(), cdf.end(), u_mid);
  std::size_t i = it == cdf.begin() ? 0 : static_cast<std::size_t>(it - cdf.begin()) - 1;
  i = std::min(i, g.n_cells - 1);
  const double width = cdf[i + 1] - cdf[i];
  if (!(width > 0.0)) return g.edge(i);
  return g.edge(i) + (u - cdf[i]) / width * g.dx();
}

GridDensity wasserstein_grid(const GridDensity& a, const GridDensity& b, double t) {
  const std::vector<double> fa = cdf_at_edges(a), fb = cdf_at_edges(b);
  std::vector<double> knots(fa);
  knots.insert(knots.end(), fb.begin(), fb.end());
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

  const double dx = a.dx();
  std::vector<double> mass(a.n_cells, 0.0);
  auto cell_of = [&](double x) {
    const double r = std::floor((x - a.lo) / dx);
    return static_cast<std::size_t>(std::clamp(r, 0.0, static_cast<double>(a.n_cells - 1)));
  };
  for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
    const double ua = knots[k], ub = knots[k + 1];
    const double m = ub - ua;
    if (!(m > 0.0)) continue;
    const double um = 0.5 * (ua + ub);
    const double xa = (1.0 - t) * quantile(a, fa, ua, um) + t * quantile(b, fb, ua, um);
    const double xb = (1.0 - t) * quantile(a, fa, ub, um) + t * quantile(b, fb, ub, um);
    const double len = xb - xa;
    const std::size_t ia = cell_of(xa), ib = cell_of(xb);
    if (ia == ib || !(len > 0.0)) {
      mass[ia] += m;
      continue;
    }
    for (std::size_t i = ia; i <= ib; ++i) {
      const double overlap = std::min(xb, a.edge(i) + dx) - std::max(xa, a.edge(i));
      if (overlap > 0.0) mass[i] += m * overlap / len;
    }
  }
  GridDensity out(a.lo, a.hi, a.n_cells);
  for (std::size_t i = 0; i < a.n_cells; ++i) out.values[i] = mass[i] / dx;
  out.normalize();
  return out;
}

}  // namespace

GridDensity grid_geodesic(const GridDensity& rho0, const GridDensity& rho1, double t, GeodesicKind kind) {
  check_t(t);
  if (!rho0.same_grid(rho1)) fail(ErrorKind::invalid_argument, "grid_geodesic: densities live on different grids");
  const GridDensity a = normalized(rho0), b = normalized(rho1);
  if (kind == GeodesicKind::exponential || kind == GeodesicKind::fisher_rao) {
    require_positive(a, to_string(kind));
    require_positive(b, to_string(kind));
  }
  if (t == 0.0) return a;
  if (t == 1.0) return b;

  GridDensity out(a.lo, a.hi, a.n_cells);
  switch (kind) {
    case GeodesicKind::mixture:
      for (std::size_t i = 0; i < a.n_cells; ++i) out.values[i] = (1.0 - t) * a.values[i] + t * b.values[i];
      break;
    case GeodesicKind::exponential: {
      std::vector<double> lg(a.n_cells);
      double top = -INFINITY;
      for (std::size_t i = 0; i < a.n_cells; ++i) {
        lg[i] = (1.0 - t) * std::log(a.values[i]) + t * std::log(b.values[i]);
        top = std::max(top, lg[i]);
      }
      for (std::size_t i = 0; i < a.n_cells; ++i) out.values[i] = std::exp(lg[i] - top);
      break;
    }
    case GeodesicKind::fisher_rao:
      out = hellinger_segment(a, b, t);
      break;
    case GeodesicKind::wasserstein:
      return wasserstein_grid(a, b, t);
  }
  out.normalize();
  return out;
}

GridDensity hellinger_segment(const GridDensity& rho0, const GridDensity& rho1, double t) {
  if (!rho0.same_grid(rho1)) fail(ErrorKind::invalid_argument, "hellinger_segment: grids differ");
  GridDensity out(rho0.lo, rho0.hi, rho0.n_cells);
  for (std::size_t i = 0; i < rho0.n_cells; ++i) {
    const double r = (1.0 - t) * std::sqrt(rho0.values[i]) + t * std::sqrt(rho1.values[i]);
    out.values[i] = r * r;
  }
  return out;
}

double hellinger_distance(const GridDensity& a, const GridDensity& b) {
  if (!a.same_grid(b)) fail(ErrorKind::invalid_argument, "hellinger_distance: grids differ");
  double s = 0.0;
  for (std::size_t i = 0; i < a.n_cells; ++i) {
    const double d = std::sqrt(a.values[i]) - std::sqrt(b.values[i]);
    s += d * d;
  }
  return std::sqrt(s * a.dx());
}

namespace {

using State = std::array<double, 4>;  // mu, sigma, mu', sigma'

State geodesic_rhs(const State& y) {
  const double mu_p = y[2], s = y[1], s_p = y[3];
  return {mu_p, s_p, 2.0 * mu_p * s_p / s, (s_p * s_p - 0.5 * mu_p * mu_p) / s};
}

State rk4_step(const State& y, double h) {
  auto axpy = [](const State& a, const State& k, double c) {
    State r;
    for (int i = 0; i < 4; ++i) r[i] = a[i] + c * k[i];
    return r;
  };
  const State k1 = geodesic_rhs(y);
  const State k2 = geodesic_rhs(axpy(y, k1, 0.5 * h));
  const State k3 = geodesic_rhs(axpy(y, k2, 0.5 * h));
  const State k4 = geodesic_rhs(axpy(y, k3, h));
  State r;
  for (int i = 0; i < 4; ++i) r[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return r;
}

State integrate(const GaussianPoint& p, double dmu, double dsigma, double t, std::size_t n_per_unit) {
  State y{p.mu, p.sigma, dmu, dsigma};
  const auto n = static_cast<std::size_t>(std::ceil(t * static_cast<double>(n_per_unit)));
  if (n == 0) return y;
  const double h = t / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    y = rk4_step(y, h);
    if (!(y[1] > 0.0) || !std::isfinite(y[0])) fail(ErrorKind::numerical_failure, "fisher_rao_shoot: left the half-plane");
  }
  return y;
}

}  // namespace

double fisher_rao_distance(const GaussianPoint& p0, const GaussianPoint& p1) {
  const double dx = (p1.mu - p0.mu) / std::sqrt(2.0);
  const double ds = p1.sigma - p0.sigma;
  return std::sqrt(2.0) * std::acosh(1.0 + (dx * dx + ds * ds) / (2.0 * p0.sigma * p1.sigma));
}

GaussianPoint FisherRaoShooting::at(double t) const {
  check_t(t);
  const State y = integrate(start, dmu, dsigma, t, rk4_steps);
  return {y[0], y[1]};
}

double FisherRaoShooting::length() const {
  State y{start.mu, start.sigma, dmu, dsigma};
  const double h = 1.0 / static_cast<double>(rk4_steps);
  auto speed = [](const State& s) { return std::sqrt(s[2] * s[2] + 2.0 * s[3] * s[3]) / s[1]; };
  double total = 0.5 * speed(y);
  for (std::size_t i = 0; i < rk4_steps; ++i) {
    y = rk4_step(y, h);
    total += (i + 1 == rk4_steps ? 0.5 : 1.0) * speed(y);
  }
  return total * h;
}

FisherRaoShooting fisher_rao_shoot(const GaussianPoint& p0, const GaussianPoint& p1, std::size_t rk4_steps) {
  if (!(p0.sigma > 0.0) || !(p1.sigma > 0.0)) fail(ErrorKind::invalid_argument, "fisher_rao_shoot: sigma must be positive");
  if (rk4_steps == 0) fail(ErrorKind::invalid_argument, "fisher_rao_shoot: rk4_steps must be >= 1");
  // Initial guess from the half-plane picture: with x = mu / sqrt 2 the
  // geodesics are vertical lines or semicircles centered on the x axis.
  const double x0 = p0.mu / std::sqrt(2.0), x1 = p1.mu / std::sqrt(2.0);
  const double y0 = p0.sigma, y1 = p1.sigma;
  const double d_h = fisher_rao_distance(p0, p1) / std::sqrt(2.0);
  double vx = 0.0, vy = 0.0;
  if (std::abs(x1 - x0) < 1e-12 * std::max(1.0, std::abs(x0))) {
    vy = y0 * std::log(y1 / y0);
  } else {
    const double c = (x1 * x1 + y1 * y1 - x0 * x0 - y0 * y0) / (2.0 * (x1 - x0));
    double tx = y0, ty = -(x0 - c);
    if ((x1 - x0) * tx < 0.0) {
      tx = -tx;
      ty = -ty;
    }
    const double norm = std::hypot(tx, ty);
    vx = tx / norm * d_h * y0;
    vy = ty / norm * d_h * y0;
  }
  double v[2] = {std::sqrt(2.0) * vx, vy};

  auto residual = [&](const double* w, double* r) {
    const State y = integrate(p0, w[0], w[1], 1.0, rk4_steps);
    r[0] = y[0] - p1.mu;
    r[1] = y[1] - p1.sigma;
  };
  double r[2];
  residual(v, r);
  for (int iter = 0; iter < 60 && std::hypot(r[0], r[1]) > 1e-13; ++iter) {
    double jac[2][2];
    for (int c = 0; c < 2; ++c) {
      double w[2] = {v[0], v[1]};
      const double eps = 1e-7 * std::max(1.0, std::abs(v[c]));
      w[c] += eps;
      double rc[2];
      residual(w, rc);
      jac[0][c] = (rc[0] - r[0]) / eps;
      jac[1][c] = (rc[1] - r[1]) / eps;
    }
    const double det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
    if (!(std::abs(det) > 0.0)) break;
    const double step[2] = {(jac[1][1] * r[0] - jac[0][1] * r[1]) / det,
                            (-jac[1][0] * r[0] + jac[0][0] * r[1]) / det};
    // damped Newton: halve until the residual decreases
    double lambda = 1.0;
    for (int b = 0; b < 30; ++b, lambda *= 0.5) {
      double w[2] = {v[0] - lambda * step[0], v[1] - lambda * step[1]};
      double rn[2];
      try {
        residual(w, rn);
      } catch (const Error&) {
        continue;
      }
      if (std::hypot(rn[0], rn[1]) < std::hypot(r[0], r[1])) {
        v[0] = w[0];
        v[1] = w[1];
        r[0] = rn[0];
        r[1] = rn[1];
        break;
      }
    }
  }
  if (!(std::hypot(r[0], r[1]) <= 1e-10)) fail(ErrorKind::numerical_failure, "fisher_rao_shoot: shooting did not converge");
  return FisherRaoShooting{p0, v[0], v[1], rk4_steps};
}

GeodesicPoint gaussian_geodesic(const GaussianPoint& p0, const GaussianPoint& p1, double t, GeodesicKind kind,
                                 const GridSpec& grid) {
  check_t(t);
  if (!(p0.sigma > 0.0) || !(p1.sigma > 0.0)) fail(ErrorKind::invalid_argument, "gaussian_geodesic: sigma must be positive");
  if (kind == GeodesicKind::mixture) return grid_geodesic(to_grid(p0, grid), to_grid(p1, grid), t, kind);
  if (t == 0.0) return p0;
  if (t == 1.0) return p1;
  switch (kind) {
    case GeodesicKind::wasserstein:
      return GaussianPoint{(1.0 - t) * p0.mu + t * p1.mu, (1.0 - t) * p0.sigma + t * p1.sigma};
    case GeodesicKind::exponential: {
      const double prec0 = 1.0 / (p0.sigma * p0.sigma), prec1 = 1.0 / (p1.sigma * p1.sigma);
      const double prec = (1.0 - t) * prec0 + t * prec1;
      const double lin = (1.0 - t) * p0.mu * prec0 + t * p1.mu * prec1;
      return GaussianPoint{lin / prec, 1.0 / std::sqrt(prec)};
    }
    case GeodesicKind::fisher_rao:
      return fisher_rao_shoot(p0, p1).at(t);
    case GeodesicKind::mixture:
      break;
  }
  fail(ErrorKind::invalid_argument, "gaussian_geodesic: unknown kind");
}

GridDensity as_grid(const GeodesicPoint& g, const GridSpec& grid) {
  if (const auto* p = std::get_if<GaussianPoint>(&g)) return to_grid(*p, grid);
  return std::get<GridDensity>(g);
}

std::vector<GeodesicPoint> median_trajectory(const GaussianPoint& p, const GaussianPoint& u,
                                             const GaussianPoint& v, GeodesicKind edge_kind,
                                             GeodesicKind uv_kind, std::size_t n_samples,
                                             const GridSpec& grid) {
  if (n_samples < 2) fail(ErrorKind::invalid_argument, "median_trajectory: n_samples must be >= 2");
  std::vector<GeodesicPoint> out;
  out.reserve(n_samples);
  for (std::size_t k = 0; k < n_samples; ++k) {
    const double s = static_cast<double>(k) / static_cast<double>(n_samples - 1);
    const GeodesicPoint g = gaussian_geodesic(u, v, s, uv_kind, grid);
    const auto* gp = std::get_if<GaussianPoint>(&g);
    if (gp && edge_kind != GeodesicKind::mixture) {
      out.push_back(gaussian_geodesic(p, *gp, 0.5, edge_kind, grid));
    } else {
      out.push_back(grid_geodesic(to_grid(p, grid), as_grid(g, grid), 0.5, edge_kind));
    }
  }
  return out;
}

}  // namespace wfr
