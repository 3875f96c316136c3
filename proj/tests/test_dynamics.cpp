#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "wfr/dynamics.hpp"
#include "wfr/error.hpp"
#include "wfr/models.hpp"
#include "wfr/reaction.hpp"

using namespace wfr;

namespace {

FieldSet gaussian_pair(DiffusionSchedule sched, bool frozen = false) {
  return FieldSet(GaussianMixtureModel::gaussian({0.0}, 1.0), GaussianMixtureModel::gaussian({2.0}, 1.0),
                  std::move(sched), frozen);
}

SamplerSettings base_settings(FieldSet fields, InterpolationKind kind, double beta) {
  return SamplerSettings{.fields = std::move(fields), .interp = {kind, beta}};
}

double mean_x(const Ensemble& e) {
  double m = 0.0;
  for (std::size_t k = 0; k < e.size(); ++k) m += e.position(k)[0];
  return m / static_cast<double>(e.size());
}

double var_x(const Ensemble& e) {
  const double m = mean_x(e);
  double v = 0.0;
  for (std::size_t k = 0; k < e.size(); ++k) v += (e.position(k)[0] - m) * (e.position(k)[0] - m);
  return v / static_cast<double>(e.size());
}

}  // namespace

TEST_CASE("null dynamics leave the ensemble in place") {
  const FieldSet fields(GaussianMixtureModel::gaussian({0.0}, 1.0), GaussianMixtureModel::gaussian({0.0}, 1.0),
                        DiffusionSchedule::constant(0.0, 0.0), true);
  auto s = base_settings(fields, InterpolationKind::geometric, 0.5);
  s.n_steps = 50;
  s.particles = 200;
  const Ensemble start = make_ensemble(200, 1, s.init, s.seed, 1.0);
  const RunResult r = run(s);
  for (std::size_t k = 0; k < start.size(); ++k) {
    CHECK(r.final_ensemble.position(k)[0] == start.position(k)[0]);
    CHECK(r.final_ensemble.log_w(k) == 0.0);
  }
  CHECK(r.final_ensemble.time() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("beta = 0 reproduces the plain reverse process") {
  auto s = base_settings(gaussian_pair(DiffusionSchedule::vp_linear(0.1, 20.0)), InterpolationKind::geometric, 0.0);
  s.particles = 20000;
  const RunResult r = run(s);
  CHECK(std::abs(var_x(r.final_ensemble) - 1.0) < 0.05);
  CHECK(std::abs(mean_x(r.final_ensemble)) < 0.05);
  for (double lw : r.final_ensemble.log_weights()) CHECK(lw == 0.0);
}

TEST_CASE("geometric weights on a frozen equal-variance pair grow linearly") {
  auto s = base_settings(gaussian_pair(DiffusionSchedule::constant(0.0, 1.0), true), InterpolationKind::geometric, 0.5);
  s.particles = 300;
  s.n_steps = 100;
  s.t_start = 1.0;
  s.t_end = 0.25;
  s.resample.reset();
  const RunResult r = run(s);
  for (double lw : r.final_ensemble.log_weights()) CHECK(std::abs(lw - (-0.5 * 0.75)) < 1e-10);
  CHECK(r.log_normalizer == doctest::Approx(-0.375).epsilon(1e-10));
}

TEST_CASE("mixture weights stay zero and ell follows the exact log-ratio") {
  auto s = base_settings(gaussian_pair(DiffusionSchedule::vp_linear(0.1, 20.0)), InterpolationKind::mixture, 0.5);
  s.particles = 2000;
  s.snapshot_times = {0.5};
  const RunResult r = run(s);
  for (double lw : r.final_ensemble.log_weights()) CHECK(lw == 0.0);
  CHECK(r.resample_count == 0);

  REQUIRE(r.snapshots.size() == 1);
  const Ensemble& mid = r.snapshots[0].ensemble;
  const FieldSlice slice = s.fields.at(mid.time());
  double err = 0.0;
  for (std::size_t k = 0; k < mid.size(); ++k) err += std::abs(mid.ell(k) - slice.log_ratio(mid.position(k)));
  CHECK(err / static_cast<double>(mid.size()) < 0.05);
}

TEST_CASE("ell starts at the exact log-ratio") {
  auto s = base_settings(gaussian_pair(DiffusionSchedule::constant(0.0, 1.0), true), InterpolationKind::fisher_rao, 0.5);
  s.n_steps = 0;
  s.particles = 50;
  const RunResult r = run(s);
  const Ensemble& e = r.snapshots.at(0).ensemble;
  for (std::size_t k = 0; k < e.size(); ++k) {
    const double x = e.position(k)[0];
    CHECK(e.ell(k) == doctest::Approx(2.0 * x - 2.0));
  }
}

TEST_CASE("n_steps = 0 echoes the initial ensemble") {
  auto s = base_settings(gaussian_pair(DiffusionSchedule::vp_linear(0.1, 20.0)), InterpolationKind::geometric, 0.5);
  s.n_steps = 0;
  s.particles = 100;
  s.seed = 4;
  const RunResult r = run(s);
  REQUIRE(r.snapshots.size() == 1);
  CHECK(r.snapshots[0].t == 1.0);
  CHECK(r.snapshots[0].ensemble == make_ensemble(100, 1, s.init, 4, 1.0));
  CHECK(r.ess_trace.empty());
}

TEST_CASE("ULA on a quadratic well relaxes to its Gibbs variance") {
  Ensemble e = make_ensemble(20000, 1, [](RngStream& rng, std::span<double> x) { x[0] = 3.0 + 0.1 * rng.normal(); }, 5);
  for (std::uint64_t i = 0; i < 1000; ++i) ula_step(e, QuadraticWell{1.0}, 0.01, 1.0, 5, i);
  // discrete chain stationary variance 1 / (1 - h/2)
  CHECK(std::abs(var_x(e) - 1.0 / (1.0 - 0.005)) < 0.05);
  CHECK(std::abs(mean_x(e)) < 0.05);
  CHECK(e.time() == doctest::Approx(10.0));
}

TEST_CASE("ULA in a deep double well is metastable") {
  Ensemble e = make_ensemble(4000, 1, [](RngStream& rng, std::span<double> x) { x[0] = 1.0 + 0.1 * rng.normal(); }, 6);
  for (std::uint64_t i = 0; i < 1000; ++i) ula_step(e, DoubleWellTarget(8.0, 1.0), 0.002, 1.0, 6, i);
  const auto right = std::count_if(e.positions().begin(), e.positions().end(), [](double x) { return x > 0.0; });
  CHECK(static_cast<double>(right) / 4000.0 > 0.95);
  CHECK(std::abs(mean_x(e) - 1.0) < 0.1);
}

TEST_CASE("resampling cadence and bookkeeping") {
  auto s = base_settings(gaussian_pair(DiffusionSchedule::vp_linear(0.1, 20.0)), InterpolationKind::geometric, 0.5);
  s.particles = 500;
  s.n_steps = 100;
  s.resample = ResampleScheme{ResampleKind::systematic, ResampleTrigger::every_n(10)};
  const RunResult every = run(s);
  CHECK(every.resample_count == 10);
  for (double lw : every.final_ensemble.log_weights()) CHECK(lw == 0.0);
  CHECK(every.ess_trace.size() == 100);
  CHECK(every.time_trace.back() == doctest::Approx(0.0).epsilon(1e-12));

  s.resample.reset();
  const RunResult never = run(s);
  CHECK(never.resample_count == 0);
  CHECK(std::abs(every.log_normalizer - (-0.5)) < 0.05);
  CHECK(std::abs(never.log_normalizer - (-0.5)) < 0.05);
  CHECK(std::is_sorted(never.ess_trace.rbegin(), never.ess_trace.rend()));
}

TEST_CASE("jump mode keeps uniform weights and estimates the normalizer") {
  // N(0,1) and N(2,0.5): the geometric midpoint is N(4/3, 2/3) and
  // log Z = -(1/4)(4/1.5) - (1/2) log(1.5 / (2 sqrt(0.5))).
  const double log_z = -(1.0 / 1.5) - 0.5 * std::log(1.5 / (2.0 * std::sqrt(0.5)));
  const FieldSet fields(GaussianMixtureModel::gaussian({0.0}, 1.0), GaussianMixtureModel::gaussian({2.0}, 0.5),
                        DiffusionSchedule::vp_linear(0.1, 20.0));
  auto s = base_settings(fields, InterpolationKind::geometric, 0.5);
  s.particles = 20000;
  s.reaction = ReactionMode::jump;
  const RunResult jump = run(s);
  for (double lw : jump.final_ensemble.log_weights()) CHECK(lw == 0.0);
  CHECK(jump.jump_count > 0);
  CHECK(std::abs(jump.log_normalizer - log_z) < 0.03);
  CHECK(std::abs(mean_x(jump.final_ensemble) - 4.0 / 3.0) < 0.05);
  CHECK(std::abs(var_x(jump.final_ensemble) - 2.0 / 3.0) < 0.05);

  s.reaction = ReactionMode::reweight;
  const RunResult reweight = run(s);
  CHECK(std::abs(reweight.log_normalizer - log_z) < 0.03);

  s.interp = {InterpolationKind::mixture, 0.5};
  s.reaction = ReactionMode::jump;
  s.particles = 500;
  CHECK(run(s).jump_count == 0);
}

TEST_CASE("snapshots land on the requested times") {
  auto s = base_settings(gaussian_pair(DiffusionSchedule::vp_linear(0.1, 20.0)), InterpolationKind::fisher_rao, 0.5);
  s.particles = 100;
  s.snapshot_times = {1.0, 0.5, 0.25, 0.0};
  const RunResult r = run(s);
  REQUIRE(r.snapshots.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(r.snapshots[i].t == s.snapshot_times[i]);
    CHECK(std::abs(r.snapshots[i].ensemble.time() - s.snapshot_times[i]) < 1e-9);
  }
}

TEST_CASE("runs are deterministic in the seed") {
  auto s = base_settings(gaussian_pair(DiffusionSchedule::vp_linear(0.1, 20.0)), InterpolationKind::fisher_rao, 0.5);
  s.particles = 300;
  s.n_steps = 80;
  s.seed = 12;
  const RunResult a = run(s), b = run(s);
  CHECK(a.final_ensemble == b.final_ensemble);
  CHECK(a.log_normalizer == b.log_normalizer);
  s.seed = 13;
  CHECK_FALSE(run(s).final_ensemble == a.final_ensemble);
}

TEST_CASE("run argument validation") {
  auto s = base_settings(gaussian_pair(DiffusionSchedule::vp_linear(0.1, 20.0)), InterpolationKind::geometric, 0.5);
  s.t_start = 0.0;
  s.t_end = 1.0;
  CHECK_THROWS_AS(run(s), Error);
  s = base_settings(gaussian_pair(DiffusionSchedule::vp_linear(0.1, 20.0)), InterpolationKind::geometric, 0.5);
  s.particles = 0;
  CHECK_THROWS_AS(run(s), Error);
  s.particles = 10;
  s.interp = {InterpolationKind::mixture, 2.0};
  CHECK_THROWS_AS(run(s), Error);
}
