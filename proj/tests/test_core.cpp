#include <doctest.h>

#include <cmath>
#include <limits>

#include "wfr/core.hpp"
#include "wfr/error.hpp"

using namespace wfr;

static ErrorKind kind_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::invalid_argument;
}

TEST_CASE("time schedule grid") {
  TimeSchedule rev(1.0, 0.0, 4);
  CHECK(rev.direction() == TimeDirection::reverse);
  CHECK(rev.step_size() == doctest::Approx(0.25));
  CHECK(rev.time_at(0) == 1.0);
  CHECK(rev.time_at(4) == 0.0);
  for (std::size_t k = 0; k < 4; ++k) CHECK(rev.time_at(k + 1) < rev.time_at(k));

  TimeSchedule fwd(0.0, 0.5, 3);
  CHECK(fwd.direction() == TimeDirection::forward);
  CHECK(fwd.time_at(3) == 0.5);

  CHECK(kind_of([] { TimeSchedule(1.0, 0.0, 0); }) == ErrorKind::invalid_argument);
  CHECK(kind_of([] { TimeSchedule(0.3, 0.3, 5); }) == ErrorKind::invalid_argument);
}

TEST_CASE("make_ensemble") {
  SUBCASE("single particle at the origin") {
    const Ensemble e = make_ensemble(1, 2, [](RngStream&, std::span<double> x) { x[0] = x[1] = 0.0; }, 3);
    CHECK(e.size() == 1);
    CHECK(e.position(0)[0] == 0.0);
    CHECK(e.log_w(0) == 0.0);
    CHECK(e.ell(0) == 0.0);
    CHECK(e.alive(0));
  }
  SUBCASE("standard normal mean within the CLT bound") {
    const Ensemble e = make_ensemble(1000, 2, standard_normal_init(), 42, 1.0);
    CHECK(e.time() == 1.0);
    for (std::size_t c = 0; c < 2; ++c) {
      double m = 0.0;
      for (std::size_t k = 0; k < e.size(); ++k) m += e.position(k)[c];
      m /= 1000.0;
      CHECK(std::abs(m) < 4.0 / std::sqrt(1000.0));
    }
  }
  SUBCASE("same seed gives identical ensembles") {
    const Ensemble a = make_ensemble(1000, 1, standard_normal_init(), 42);
    const Ensemble b = make_ensemble(1000, 1, standard_normal_init(), 42);
    const Ensemble c = make_ensemble(1000, 1, standard_normal_init(), 43);
    CHECK(a == b);
    CHECK_FALSE(a == c);
  }
  CHECK(kind_of([] { make_ensemble(0, 1, standard_normal_init(), 1); }) == ErrorKind::invalid_argument);
}

TEST_CASE("normalized_weights") {
  Ensemble e(4, 1);
  auto p = normalized_weights(e);
  for (double v : p) CHECK(v == doctest::Approx(0.25).epsilon(1e-15));

  Ensemble two(2, 1);
  two.log_w(1) = std::log(3.0);
  p = normalized_weights(two);
  CHECK(p[0] == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(p[1] == doctest::Approx(0.75).epsilon(1e-14));

  two.log_w(0) = 1000.0;
  two.log_w(1) = 1000.0;
  p = normalized_weights(two);
  CHECK(p[0] == 0.5);
  CHECK(p[1] == 0.5);

  SUBCASE("shift invariance and normalization") {
    Ensemble s(5, 1);
    for (std::size_t k = 0; k < 5; ++k) s.log_w(k) = 0.3 * static_cast<double>(k) - 1.0;
    const auto before = normalized_weights(s);
    for (std::size_t k = 0; k < 5; ++k) s.log_w(k) += 123.456;
    const auto after = normalized_weights(s);
    double total = 0.0;
    for (std::size_t k = 0; k < 5; ++k) {
      CHECK(std::abs(before[k] - after[k]) < 1e-12);
      total += after[k];
    }
    CHECK(std::abs(total - 1.0) < 1e-12);
  }
  SUBCASE("dead particles get zero weight") {
    Ensemble d(3, 1);
    d.kill(1);
    p = normalized_weights(d);
    CHECK(p[1] == 0.0);
    CHECK(p[0] == doctest::Approx(0.5));
  }
  SUBCASE("all -inf is degenerate") {
    Ensemble d(2, 1);
    d.log_w(0) = d.log_w(1) = -std::numeric_limits<double>::infinity();
    CHECK(kind_of([&] { normalized_weights(d); }) == ErrorKind::degenerate_ensemble);
  }
}

TEST_CASE("log_sum_exp") {
  const double v[] = {std::log(1.0), std::log(3.0)};
  CHECK(log_sum_exp(v) == doctest::Approx(std::log(4.0)));
  const double big[] = {1000.0, 1000.0};
  CHECK(log_sum_exp(big) == doctest::Approx(1000.0 + std::log(2.0)));
  const double none[] = {-INFINITY, -INFINITY};
  CHECK(std::isinf(log_sum_exp(none)));
}

TEST_CASE("particle round trip") {
  Ensemble e(2, 2);
  e.set_particle(1, Particle{{1.0, 2.0}, -0.5, 0.25, true});
  const Particle p = e.particle(1);
  CHECK(p.x == std::vector<double>{1.0, 2.0});
  CHECK(p.log_w == -0.5);
  CHECK(p.ell == 0.25);
  CHECK(kind_of([&] { e.set_particle(0, Particle{{1.0}, 0, 0, true}); }) == ErrorKind::invalid_argument);
}
