#include <algorithm>
#include <cmath>
#include <vector>

#include "wfr/error.hpp"
#include "wfr/kernels.hpp"

namespace wfr::kernels {

namespace {

void check_step(const Ensemble& e, const FieldSlice& slice, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) fail(ErrorKind::invalid_argument, "em step: h must be positive");
  if (slice.dim() != e.dim()) fail(ErrorKind::invalid_argument, "em step: field and ensemble dimensions differ");
}

GuidedEvaluation reference_guided(const InterpolationSpec& interp, const std::vector<double>& s1,
                                  const std::vector<double>& s2, double ell, double sigma) {
  switch (interp.kind) {
    case InterpolationKind::geometric: return geometric_eval(s1, s2, interp.beta, sigma);
    case InterpolationKind::fisher_rao: return fisher_rao_eval(s1, s2, ell, interp.beta, sigma);
    case InterpolationKind::mixture: return mixture_eval(s1, s2, ell, interp.beta);
  }
  fail(ErrorKind::invalid_argument, "em step: unknown interpolation kind");
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double a) { return std::isfinite(a); });
}

EmStepStats finish(const std::vector<double>& increments, const std::vector<double>& drift_abs,
                   const Ensemble& e) {
  EmStepStats stats;
  double total = 0.0;
  std::size_t n = 0;
  for (std::size_t k = 0; k < increments.size(); ++k) {
    stats.max_abs_drift = std::max(stats.max_abs_drift, drift_abs[k]);
    if (e.alive(k)) {
      total += increments[k];
      ++n;
    }
  }
  stats.mean_log_w_increment = n > 0 ? total / static_cast<double>(n) : 0.0;
  return stats;
}

}  // namespace

EmStepStats em_step_serial(Ensemble& e, const FieldSlice& slice, const InterpolationSpec& interp,
                           double h, std::uint64_t seed, std::uint64_t step_index) {
  check_step(e, slice, h);
  const std::size_t d = e.dim();
  const double sigma = slice.sigma;
  const double noise_scale = sigma * std::sqrt(h);
  const bool track = interp.tracks_ratio();
  std::vector<double> increments(e.size(), 0.0);
  std::vector<double> drift_abs(e.size(), 0.0);

  for (std::size_t k = 0; k < e.size(); ++k) {
    if (!e.alive(k)) continue;
    const auto pos = e.position(k);
    const std::vector<double> x(pos.begin(), pos.end());

    const std::vector<double> s1 = slice.q1.score(x);
    const std::vector<double> s2 = slice.q2.score(x);
    const double div1 = slice.q1.score_divergence(x);
    const double div2 = slice.q2.score_divergence(x);
    const GuidedEvaluation g = reference_guided(interp, s1, s2, e.ell(k), sigma);

    std::vector<double> f(d);
    slice.drift_base(x, f);
    std::vector<double> v(d);
    for (std::size_t i = 0; i < d; ++i) v[i] = -f[i] + sigma * sigma * g.guided_score[i];

    RngStream rng(seed, StreamPurpose::em_step, step_index, k);
    std::vector<double> xi(d);
    for (double& z : xi) z = rng.normal();

    if (track) {
      const double ell_drift = logratio_drift(s1, s2, div1, div2, f, v, sigma);
      double grad_dot_xi = 0.0;
      for (std::size_t i = 0; i < d; ++i) grad_dot_xi += (s2[i] - s1[i]) * xi[i];
      e.ell(k) = e.ell(k) + ell_drift * h + noise_scale * grad_dot_xi;
    }
    increments[k] = g.psi * h;
    e.log_w(k) = e.log_w(k) + increments[k];
    for (std::size_t i = 0; i < d; ++i) {
      pos[i] = x[i] + v[i] * h + noise_scale * xi[i];
      drift_abs[k] = std::max(drift_abs[k], std::abs(v[i]));
    }
    if (!all_finite(pos) || !std::isfinite(e.log_w(k)) || !std::isfinite(e.ell(k))) e.kill(k);
  }
  e.set_time(e.time() - h);
  return finish(increments, drift_abs, e);
}

EmStepStats em_step_parallel(Ensemble& e, const FieldSlice& slice, const InterpolationSpec& interp,
                             double h, std::uint64_t seed, std::uint64_t step_index) {
  check_step(e, slice, h);
  const std::size_t d = e.dim();
  const double sigma = slice.sigma;
  const double noise_scale = sigma * std::sqrt(h);
  const bool track = interp.tracks_ratio();
  const auto n = static_cast<std::ptrdiff_t>(e.size());
  std::vector<double> increments(e.size(), 0.0);
  std::vector<double> drift_abs(e.size(), 0.0);

#pragma omp parallel
  {
    std::vector<double> x(d), s1(d), s2(d), guided(d), f(d), v(d), xi(d);
#pragma omp for schedule(static)
    for (std::ptrdiff_t kk = 0; kk < n; ++kk) {
      const auto k = static_cast<std::size_t>(kk);
      if (!e.alive(k)) continue;
      const auto pos = e.position(k);
      std::copy(pos.begin(), pos.end(), x.begin());

      const double div1 = slice.q1.evaluate(x, s1).score_divergence;
      const double div2 = slice.q2.evaluate(x, s2).score_divergence;
      const GuidedTerms g = guided_eval_into(interp, s1, s2, e.ell(k), sigma, guided);

      slice.drift_base(x, f);
      for (std::size_t i = 0; i < d; ++i) v[i] = -f[i] + sigma * sigma * guided[i];

      RngStream rng(seed, StreamPurpose::em_step, step_index, k);
      for (double& z : xi) z = rng.normal();

      if (track) {
        const double ell_drift = logratio_drift(s1, s2, div1, div2, f, v, sigma);
        double grad_dot_xi = 0.0;
        for (std::size_t i = 0; i < d; ++i) grad_dot_xi += (s2[i] - s1[i]) * xi[i];
        e.ell(k) = e.ell(k) + ell_drift * h + noise_scale * grad_dot_xi;
      }
      increments[k] = g.psi * h;
      e.log_w(k) = e.log_w(k) + increments[k];
      for (std::size_t i = 0; i < d; ++i) {
        pos[i] = x[i] + v[i] * h + noise_scale * xi[i];
        drift_abs[k] = std::max(drift_abs[k], std::abs(v[i]));
      }
      if (!all_finite(pos) || !std::isfinite(e.log_w(k)) || !std::isfinite(e.ell(k))) e.kill(k);
    }
  }
  e.set_time(e.time() - h);
  return finish(increments, drift_abs, e);
}

std::vector<double> corrector_values(const Ensemble& e, const FieldSlice& slice,
                                     const InterpolationSpec& interp, bool parallel) {
  const std::size_t d = e.dim();
  const auto n = static_cast<std::ptrdiff_t>(e.size());
  std::vector<double> psi(e.size(), std::nan(""));
#pragma omp parallel if (parallel)
  {
    std::vector<double> s1(d), s2(d), guided(d);
#pragma omp for schedule(static)
    for (std::ptrdiff_t kk = 0; kk < n; ++kk) {
      const auto k = static_cast<std::size_t>(kk);
      if (!e.alive(k)) continue;
      const auto x = e.position(k);
      slice.q1.evaluate(x, s1);
      slice.q2.evaluate(x, s2);
      psi[k] = guided_eval_into(interp, s1, s2, e.ell(k), slice.sigma, guided).psi;
    }
  }
  return psi;
}

}  // namespace wfr::kernels
