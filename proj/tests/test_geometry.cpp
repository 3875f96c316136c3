#include <doctest.h>

#include <cmath>
#include <variant>

#include "wfr/error.hpp"
#include "wfr/geometry.hpp"
#include "wfr/grid.hpp"

using namespace wfr;

namespace {

const GridSpec spec{-10.0, 10.0, 1024};

GridDensity gauss(double mu, double sigma) { return to_grid(GaussianPoint{mu, sigma}, spec); }

double max_abs_diff(const GridDensity& a, const GridDensity& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.n_cells; ++i) m = std::max(m, std::abs(a.values[i] - b.values[i]));
  return m;
}

const GaussianPoint& as_point(const GeodesicPoint& g) { return std::get<GaussianPoint>(g); }

}  // namespace

TEST_CASE("kind names round-trip") {
  for (GeodesicKind k : all_geodesic_kinds) CHECK(parse_geodesic_kind(to_string(k)) == k);
  CHECK_THROWS_AS(parse_geodesic_kind("hyperbolic"), Error);
}

TEST_CASE("grid geodesic endpoints, degenerate pairs and mass") {
  const GridDensity a = gauss(-1.0, 0.7), b = gauss(2.0, 1.5);
  for (GeodesicKind k : all_geodesic_kinds) {
    CAPTURE(to_string(k));
    CHECK(l1_distance(grid_geodesic(a, b, 0.0, k), a) < 1e-8);
    CHECK(l1_distance(grid_geodesic(a, b, 1.0, k), b) < 1e-8);
    for (double t : {0.1, 0.5, 0.83}) {
      CHECK(l1_distance(grid_geodesic(a, a, t, k), a) < 1e-8);
      CHECK(std::abs(grid_geodesic(a, b, t, k).mass() - 1.0) < 1e-8);
    }
  }
}

TEST_CASE("grid geodesic closed forms") {
  const GridDensity a = gauss(0.0, 1.0), b = gauss(2.0, 1.0);
  CHECK(l1_distance(grid_geodesic(a, b, 0.5, GeodesicKind::exponential), gauss(1.0, 1.0)) < 1e-3);

  // normalized geometric mean of N(m0, s0^2), N(m1, s1^2) has precision (1-t)/s0^2 + t/s1^2
  const GridDensity c = gauss(-1.0, 0.5), d = gauss(3.0, 2.0);
  const double t = 0.3, prec = (1.0 - t) / 0.25 + t / 4.0, mean = ((1.0 - t) * -1.0 / 0.25 + t * 3.0 / 4.0) / prec;
  CHECK(l1_distance(grid_geodesic(c, d, t, GeodesicKind::exponential), gauss(mean, 1.0 / std::sqrt(prec))) < 1e-3);

  // quantile interpolation of Gaussians is Gaussian with linear (mu, sigma)
  CHECK(l1_distance(grid_geodesic(c, d, 0.5, GeodesicKind::wasserstein), gauss(1.0, 1.25)) < 1e-2);

  GridDensity mix = grid_geodesic(a, b, 0.25, GeodesicKind::mixture);
  for (std::size_t i = 0; i < mix.n_cells; ++i) {
    CHECK(mix.values[i] == doctest::Approx(0.75 * a.values[i] + 0.25 * b.values[i]).epsilon(1e-9));
  }
}

TEST_CASE("exponential and Fisher-Rao are symmetric under reversal") {
  const GridDensity a = gauss(-1.0, 0.7), b = gauss(2.0, 1.5);
  for (GeodesicKind k : {GeodesicKind::exponential, GeodesicKind::fisher_rao}) {
    for (double t : {0.2, 0.5, 0.9}) {
      CHECK(max_abs_diff(grid_geodesic(a, b, t, k), grid_geodesic(b, a, 1.0 - t, k)) < 1e-10);
    }
  }
}

TEST_CASE("zero densities are rejected where logs or ratios are needed") {
  GridDensity a = gauss(0.0, 1.0);
  a.values[10] = 0.0;
  const GridDensity b = gauss(1.0, 1.0);
  CHECK_THROWS_AS(grid_geodesic(a, b, 0.5, GeodesicKind::exponential), Error);
  CHECK_THROWS_AS(grid_geodesic(a, b, 0.5, GeodesicKind::fisher_rao), Error);
  CHECK_NOTHROW(grid_geodesic(a, b, 0.5, GeodesicKind::mixture));
  CHECK_THROWS_AS(grid_geodesic(a, gauss(0.0, 1.0), 1.5, GeodesicKind::mixture), Error);
}

TEST_CASE("Hellinger segment is a straight line in the square-root embedding") {
  const GridDensity a = gauss(-2.0, 0.6), b = gauss(1.5, 1.8);
  const double total = hellinger_distance(a, b);
  CHECK(total > 0.1);
  for (double t = 0.0; t <= 1.0; t += 0.05) {
    const GridDensity mid = hellinger_segment(a, b, t);
    CHECK(std::abs(hellinger_distance(a, mid) + hellinger_distance(mid, b) - total) < 1e-6);
    CHECK(std::abs(hellinger_distance(a, mid) - t * total) < 1e-6);
  }
}

TEST_CASE("Gaussian-family geodesics") {
  const GaussianPoint p0{0.0, 1.0}, p1{2.0, 3.0};
  const auto w = as_point(gaussian_geodesic(p0, p1, 0.5, GeodesicKind::wasserstein));
  CHECK(w.mu == doctest::Approx(1.0));
  CHECK(w.sigma == doctest::Approx(2.0));
  const auto e = as_point(gaussian_geodesic(GaussianPoint{0.0, 1.0}, GaussianPoint{2.0, 1.0}, 0.5, GeodesicKind::exponential));
  CHECK(e.mu == doctest::Approx(1.0));
  CHECK(e.sigma == doctest::Approx(1.0));
  CHECK(std::holds_alternative<GridDensity>(gaussian_geodesic(p0, p1, 0.5, GeodesicKind::mixture)));
  CHECK_THROWS_AS(gaussian_geodesic(p0, p1, -0.1, GeodesicKind::wasserstein), Error);
  CHECK_THROWS_AS(gaussian_geodesic(p0, p1, 1.1, GeodesicKind::fisher_rao), Error);

  for (GeodesicKind k : {GeodesicKind::wasserstein, GeodesicKind::exponential, GeodesicKind::fisher_rao}) {
    const auto a = as_point(gaussian_geodesic(p0, p1, 0.0, k)), b = as_point(gaussian_geodesic(p0, p1, 1.0, k));
    CHECK(std::abs(a.mu - p0.mu) < 1e-10);
    CHECK(std::abs(a.sigma - p0.sigma) < 1e-10);
    CHECK(std::abs(b.mu - p1.mu) < 1e-8);
    CHECK(std::abs(b.sigma - p1.sigma) < 1e-8);
  }
  // natural-parameter averaging agrees with the normalized geometric mean on the grid
  const GaussianPoint c{-1.0, 0.5}, d{3.0, 2.0};
  const auto en = as_point(gaussian_geodesic(c, d, 0.3, GeodesicKind::exponential));
  CHECK(l1_distance(to_grid(en, spec), grid_geodesic(to_grid(c, spec), to_grid(d, spec), 0.3, GeodesicKind::exponential)) < 1e-3);
}

TEST_CASE("Fisher-Rao shooting") {
  const GaussianPoint pairs[][2] = {{{0.0, 1.0}, {2.0, 3.0}}, {{-3.0, 0.5}, {4.0, 0.5}}, {{1.0, 0.3}, {1.0, 4.0}},
                                    {{0.0, 1.0}, {0.0, 1.0}}};
  for (const auto& pr : pairs) {
    const FisherRaoShooting sh = fisher_rao_shoot(pr[0], pr[1]);
    const GaussianPoint end = sh.at(1.0);
    CHECK(std::abs(end.mu - pr[1].mu) < 1e-8);
    CHECK(std::abs(end.sigma - pr[1].sigma) < 1e-8);
    CHECK(sh.length() == doctest::Approx(fisher_rao_distance(pr[0], pr[1])).epsilon(1e-6));
    // constant speed: the half curve has half the length
    const FisherRaoShooting half = fisher_rao_shoot(pr[0], sh.at(0.5));
    CHECK(half.length() == doctest::Approx(0.5 * sh.length()).epsilon(1e-6));
  }
  // pure scale change: the metric reduces to sqrt(2) |d log sigma|
  CHECK(fisher_rao_distance({0.0, 1.0}, {0.0, std::exp(1.5)}) == doctest::Approx(1.5 * std::sqrt(2.0)));
  // equal-sigma geodesics bulge to larger sigma
  CHECK(fisher_rao_shoot({-3.0, 0.5}, {4.0, 0.5}).at(0.5).sigma > 0.5);
}

TEST_CASE("median trajectories") {
  const GaussianPoint p{0.0, 1.0}, u{-2.0, 0.6}, v{2.0, 1.6};
  SUBCASE("u = v is constant") {
    for (GeodesicKind i : {GeodesicKind::wasserstein, GeodesicKind::exponential, GeodesicKind::fisher_rao}) {
      const auto traj = median_trajectory(p, u, u, i, GeodesicKind::fisher_rao, 5);
      const auto mid = as_point(gaussian_geodesic(p, u, 0.5, i));
      REQUIRE(traj.size() == 5);
      for (const auto& g : traj) {
        CHECK(as_point(g).mu == doctest::Approx(mid.mu));
        CHECK(as_point(g).sigma == doctest::Approx(mid.sigma));
      }
    }
  }
  SUBCASE("collinear Wasserstein points give a straight segment") {
    const GaussianPoint a{0.0, 1.0}, b{1.0, 2.0}, c{3.0, 4.0};
    const auto traj = median_trajectory(a, b, c, GeodesicKind::wasserstein, GeodesicKind::wasserstein, 9);
    const auto first = as_point(traj.front()), last = as_point(traj.back());
    for (const auto& g : traj) {
      const auto q = as_point(g);
      const double cross = (q.mu - first.mu) * (last.sigma - first.sigma) - (q.sigma - first.sigma) * (last.mu - first.mu);
      CHECK(std::abs(cross) < 1e-12);
    }
  }
  SUBCASE("p = u starts at u") {
    const auto traj = median_trajectory(u, u, v, GeodesicKind::exponential, GeodesicKind::wasserstein, 4);
    CHECK(as_point(traj.front()).mu == doctest::Approx(u.mu));
    CHECK(as_point(traj.front()).sigma == doctest::Approx(u.sigma));
  }
  SUBCASE("mixture edges live on the grid") {
    const auto traj = median_trajectory(p, u, v, GeodesicKind::mixture, GeodesicKind::fisher_rao, 3);
    for (const auto& g : traj) CHECK(std::abs(std::get<GridDensity>(g).mass() - 1.0) < 1e-8);
  }
  CHECK_THROWS_AS(median_trajectory(p, u, v, GeodesicKind::wasserstein, GeodesicKind::wasserstein, 1), Error);
}
