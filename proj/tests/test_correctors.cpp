#include <doctest.h>

#include <cmath>
#include <numbers>

#include "wfr/correctors.hpp"
#include "wfr/error.hpp"
#include "wfr/fields.hpp"
#include "wfr/models.hpp"
#include "wfr/rng.hpp"

using namespace wfr;

namespace {
using V = std::vector<double>;
}

TEST_CASE("geometric_eval") {
  const V s{0.7, -1.2};
  auto g = geometric_eval(s, s, 0.3, 2.0);
  CHECK(g.psi == 0.0);
  CHECK(g.guided_score == s);

  const V s1{1.5}, s2{-0.25};
  g = geometric_eval(s1, s2, 0.0, 1.0);
  CHECK(g.psi == 0.0);
  CHECK(g.guided_score[0] == 1.5);

  // N(0,1), N(2,1) at x: s1 = -x, s2 = -(x-2)
  const double x = 0.8;
  g = geometric_eval(V{-x}, V{-(x - 2.0)}, 0.5, 1.0);
  CHECK(g.psi == doctest::Approx(-0.5));
  CHECK(g.guided_score[0] == doctest::Approx(-(x - 1.0)));
  CHECK(g.alpha1 == doctest::Approx(0.5));

  CHECK_THROWS_AS(geometric_eval(V{1.0}, V{1.0, 2.0}, 0.5, 1.0), Error);
}

TEST_CASE("fisher_rao_eval") {
  auto g = fisher_rao_eval(V{0.1}, V{0.4}, 0.0, 0.5, 1.0);
  CHECK(g.alpha1 == doctest::Approx(0.5));
  CHECK(g.alpha2 == doctest::Approx(0.5));

  g = fisher_rao_eval(V{0.0}, V{2.0}, 0.0, 0.5, 1.0);
  CHECK(g.psi == doctest::Approx(-0.25));

  g = fisher_rao_eval(V{0.3}, V{-1.1}, 2.0, 1.0, 1.5);
  CHECK(g.alpha2 == 1.0);
  CHECK(g.psi == 0.0);
  CHECK(g.guided_score[0] == doctest::Approx(-1.1));

  SUBCASE("extreme log-ratio stays finite") {
    g = fisher_rao_eval(V{1.0}, V{-1.0}, 1500.0, 0.5, 1.0);
    CHECK(g.alpha2 == doctest::Approx(1.0));
    g = fisher_rao_eval(V{1.0}, V{-1.0}, -1500.0, 0.5, 1.0);
    CHECK(g.alpha1 == doctest::Approx(1.0));
    CHECK(std::isfinite(g.psi));
  }
}

TEST_CASE("mixture_eval") {
  auto g = mixture_eval(V{1.0}, V{3.0}, 0.0, 0.5);
  CHECK(g.alpha1 == doctest::Approx(0.5));
  CHECK(g.alpha2 == doctest::Approx(0.5));
  CHECK(g.psi == 0.0);
  g = mixture_eval(V{1.0}, V{3.0}, 0.7, 0.0);
  CHECK(g.guided_score[0] == 1.0);
  g = mixture_eval(V{1.0}, V{3.0}, std::log(3.0), 0.5);
  CHECK(g.alpha2 == doctest::Approx(0.75));
}

TEST_CASE("corrector properties on random inputs") {
  RngStream rng(11, StreamPurpose::diagnostic, 0, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const V s1{2.0 * rng.normal(), 2.0 * rng.normal()}, s2{2.0 * rng.normal(), 2.0 * rng.normal()};
    const double a = 0.01 + 0.98 * rng.uniform();
    const double ell = 3.0 * rng.normal();
    const double sigma = 0.1 + 2.0 * rng.uniform();
    const double b = a;

    // mixture identity: a1|s1|^2 + a2|s2|^2 - |a1 s1 + a2 s2|^2 = a1 a2 |s1 - s2|^2
    const double a1 = 1.0 - a, a2 = a;
    double lhs = 0.0, diff2 = 0.0;
    V mix(2);
    for (int i = 0; i < 2; ++i) {
      lhs += a1 * s1[i] * s1[i] + a2 * s2[i] * s2[i];
      mix[i] = a1 * s1[i] + a2 * s2[i];
      diff2 += (s1[i] - s2[i]) * (s1[i] - s2[i]);
    }
    lhs -= mix[0] * mix[0] + mix[1] * mix[1];
    CHECK(std::abs(lhs - a1 * a2 * diff2) < 1e-10);

    const auto geo = geometric_eval(s1, s2, b, sigma);
    const auto fr = fisher_rao_eval(s1, s2, ell, b, sigma);
    const auto mx = mixture_eval(s1, s2, ell, b);
    CHECK(geo.psi <= 0.0);
    CHECK(fr.psi <= 0.0);
    CHECK(mx.psi == 0.0);
    CHECK(std::abs(fr.alpha1 + fr.alpha2 - 1.0) < 1e-12);
    CHECK(std::abs(mx.alpha1 + mx.alpha2 - 1.0) < 1e-12);

    for (double endpoint : {0.0, 1.0}) {
      const V& pure = endpoint == 0.0 ? s1 : s2;
      for (const auto& g : {geometric_eval(s1, s2, endpoint, sigma), fisher_rao_eval(s1, s2, ell, endpoint, sigma),
                            mixture_eval(s1, s2, ell, endpoint)}) {
        CHECK(g.psi == 0.0);
        CHECK(g.guided_score == pure);
      }
    }
  }
}

TEST_CASE("guided scores match the target densities") {
  const auto q1 = GaussianMixtureModel::gaussian({0.0}, 1.0);
  const auto q2 = GaussianMixtureModel::gaussian({2.0}, 1.0);
  const double beta = 0.3, h = 1e-5;
  for (double x = -4.0; x <= 6.0; x += 0.37) {
    const V xs{x};
    const V s1 = q1.score(xs), s2 = q2.score(xs);
    // Gaussian product: N((1-b) mu1 + b mu2, 1)
    const auto geo = geometric_eval(s1, s2, beta, 1.0);
    CHECK(std::abs(geo.guided_score[0] + (x - 2.0 * beta)) < 1e-8);

    auto log_fr = [&](double y) {
      const double r = (1.0 - beta) * std::exp(0.5 * q1.log_density(y)) + beta * std::exp(0.5 * q2.log_density(y));
      return 2.0 * std::log(r);
    };
    const double ell = q2.log_density(x) - q1.log_density(x);
    const auto fr = fisher_rao_eval(s1, s2, ell, beta, 1.0);
    const double fd = (log_fr(x + h) - log_fr(x - h)) / (2.0 * h);
    CHECK(std::abs(fr.guided_score[0] - fd) < 1e-5);

    auto log_mix = [&](double y) {
      return std::log((1.0 - beta) * std::exp(q1.log_density(y)) + beta * std::exp(q2.log_density(y)));
    };
    const auto mx = mixture_eval(s1, s2, ell, beta);
    CHECK(std::abs(mx.guided_score[0] - (log_mix(x + h) - log_mix(x - h)) / (2.0 * h)) < 1e-5);
  }
}

TEST_CASE("log-ratio drift") {
  const V s{0.4}, f{-0.2}, v{1.3};
  CHECK(logratio_drift(s, s, -1.0, -1.0, f, v, 1.0) == 0.0);
  CHECK(logratio_drift(s, s, -1.0, -1.0, f, v, 2.0) == 0.0);
  CHECK_THROWS_AS(logratio_drift(s, V{1.0, 2.0}, 0.0, 0.0, f, v, 1.0), Error);

  // d/ds ell along the sampling clock equals -d/dt of the exact log-ratio
  // of the noised models.
  auto check_against_exact = [](const FieldSet& fields, double tol) {
    const double dt = 1e-5;
    double worst = 0.0;
    for (double t : {0.15, 0.4, 0.8}) {
      for (double x = -3.0; x <= 4.0; x += 0.5) {
        const V xs{x};
        const FieldSlice at = fields.at(t);
        const V s1 = at.q1.score(xs), s2 = at.q2.score(xs);
        V f(1);
        at.drift_base(xs, f);
        const double model = logratio_time_derivative(s1, s2, at.q1.score_divergence(xs),
                                                      at.q2.score_divergence(xs), f, at.sigma);
        const double exact = -(fields.at(t + dt).log_ratio(xs) - fields.at(t - dt).log_ratio(xs)) / (2.0 * dt);
        worst = std::max(worst, std::abs(model - exact) / std::max(1.0, std::abs(exact)));
      }
    }
    CHECK(worst < tol);
  };
  SUBCASE("equal variances, pure Brownian noising") {
    check_against_exact(FieldSet(GaussianMixtureModel::gaussian({0.0}, 1.0), GaussianMixtureModel::gaussian({2.0}, 1.0),
                                 DiffusionSchedule::constant(0.0, 1.0)),
                        1e-3);
  }
  SUBCASE("unequal variances under VP, where the Laplacian term matters") {
    check_against_exact(FieldSet(GaussianMixtureModel::gaussian({0.0}, 0.3), GaussianMixtureModel::gaussian({2.0}, 2.5),
                                 DiffusionSchedule::vp_linear(0.1, 20.0)),
                        1e-5);
  }
  SUBCASE("mixtures under VP") {
    check_against_exact(
        FieldSet(GaussianMixtureModel::from_weights({{-1.0}, {1.0}}, {0.2, 0.5}, {0.5, 0.5}),
                 GaussianMixtureModel::from_weights({{2.0}, {0.0}}, {1.5, 0.1}, {0.3, 0.7}),
                 DiffusionSchedule::vp_linear(0.1, 20.0)),
        1e-5);
  }
}

TEST_CASE("elementary lemmas pointwise") {
  for (double x : {-2.0, -0.5, 0.0, 1.0, 3.0}) {
    CHECK(drift_to_fr_rate(V{-x}, -1.0, V{-x}) == doctest::Approx(1.0 - x * x));
    CHECK(diffusion_to_fr_rate(V{-x}, -1.0, 1.0) == doctest::Approx(0.5 * (x * x - 1.0)));
    CHECK(diffusion_to_fr_rate(V{-x}, -1.0, 0.0) == 0.0);
  }
  CHECK(drift_to_fr_rate(V{0.0}, 0.0, V{-3.0}) == 0.0);
  CHECK(drift_to_fr_rate(V{2.5}, 0.0, V{0.0}) == 0.0);

  // E_mu[psi] = 0 under N(0,1) for both rates
  double e_diff = 0.0, e_drift = 0.0;
  const double dx = 1e-3;
  for (double x = -10.0; x <= 10.0; x += dx) {
    const double w = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi) * dx;
    e_diff += w * diffusion_to_fr_rate(V{-x}, -1.0, 1.0);
    e_drift += w * drift_to_fr_rate(V{-x}, -1.0, V{-x});
  }
  CHECK(std::abs(e_diff) < 1e-9);
  CHECK(std::abs(e_drift) < 1e-9);

  CHECK(diffusion_to_drift(V{0.0}, 1.0)[0] == 0.0);
  CHECK(diffusion_to_drift(V{-2.0}, 1.0)[0] == doctest::Approx(1.0));
  CHECK(diffusion_to_drift(V{-2.0}, 2.0)[0] == doctest::Approx(4.0));
}

TEST_CASE("InterpolationSpec validation") {
  CHECK_NOTHROW((InterpolationSpec{InterpolationKind::geometric, 1.7}.validate()));
  CHECK_THROWS_AS((InterpolationSpec{InterpolationKind::mixture, 1.2}.validate()), Error);
  CHECK_THROWS_AS((InterpolationSpec{InterpolationKind::fisher_rao, -0.1}.validate()), Error);
  CHECK(logistic(800.0) == 1.0);
  CHECK(logistic(-800.0) >= 0.0);
}
