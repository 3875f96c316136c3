#include "wfr/reaction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wfr/error.hpp"

namespace wfr {

void ResampleScheme::validate() const {
  if (trigger.kind == ResampleTrigger::Kind::every_n && trigger.n < 1) {
    fail(ErrorKind::invalid_argument, "resample trigger: every_n needs n >= 1");
  }
  if (trigger.kind == ResampleTrigger::Kind::ess_below &&
      !(trigger.fraction > 0.0 && trigger.fraction <= 1.0)) {
    fail(ErrorKind::invalid_argument, "resample trigger: ess fraction must lie in (0,1]");
  }
}

bool ResampleScheme::should_resample(const Ensemble& e, std::size_t steps_done) const {
  switch (trigger.kind) {
    case ResampleTrigger::Kind::every_n: return steps_done > 0 && steps_done % trigger.n == 0;
    case ResampleTrigger::Kind::ess_below:
      return ess(e) < trigger.fraction * static_cast<double>(e.size());
  }
  return false;
}

double snis_expectation(const Ensemble& e, const PositionFn& phi) {
  const std::vector<double> p = normalized_weights(e);
  double acc = 0.0;
  for (std::size_t k = 0; k < e.size(); ++k) {
    if (p[k] > 0.0) acc += p[k] * phi(e.position(k));
  }
  return acc;
}

double log_normalizer_estimate(const Ensemble& e) {
  std::vector<double> lw;
  lw.reserve(e.size());
  for (std::size_t k = 0; k < e.size(); ++k) {
    if (e.alive(k)) lw.push_back(e.log_w(k));
  }
  const double lse = log_sum_exp(lw);
  if (!std::isfinite(lse)) fail(ErrorKind::degenerate_ensemble, "log_normalizer_estimate: no finite weight");
  return lse - std::log(static_cast<double>(e.size()));
}

double ess(const Ensemble& e) {
  const std::vector<double> p = normalized_weights(e);
  double s2 = 0.0;
  for (double pk : p) s2 += pk * pk;
  return 1.0 / s2;
}

std::vector<std::size_t> offspring_counts(std::span<const double> weights, std::size_t n_offspring,
                                          ResampleKind kind, RngStream& rng) {
  const std::size_t k = weights.size();
  // Cumulative weights scaled by n_offspring so uniform weights give integer edges.
  std::vector<double> cumulative(k);
  const double scale = static_cast<double>(n_offspring);
  double running = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    running += scale * weights[i];
    cumulative[i] = running;
  }
  const double total = running;
  std::vector<std::size_t> counts(k, 0);
  auto bucket_of = [&](double position) {
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), position);
    auto idx = static_cast<std::size_t>(it - cumulative.begin());
    idx = std::min(idx, k - 1);
    while (weights[idx] <= 0.0 && idx > 0) --idx;  // never land on a zero-weight slot
    return idx;
  };

  if (kind == ResampleKind::systematic) {
    const double u = rng.uniform();
    std::size_t idx = 0;
    for (std::size_t i = 0; i < n_offspring; ++i) {
      const double position = (u + static_cast<double>(i)) * total / scale;
      while (idx + 1 < k && cumulative[idx] <= position) ++idx;
      std::size_t chosen = idx;
      while (weights[chosen] <= 0.0 && chosen > 0) --chosen;
      ++counts[chosen];
    }
  } else {
    for (std::size_t i = 0; i < n_offspring; ++i) ++counts[bucket_of(rng.uniform() * total)];
  }
  return counts;
}

Ensemble resample(const Ensemble& e, const ResampleScheme& scheme, RngStream& rng) {
  scheme.validate();
  const std::vector<double> p = normalized_weights(e);
  const std::vector<std::size_t> counts = offspring_counts(p, e.size(), scheme.kind, rng);
  Ensemble out(e.size(), e.dim(), e.time());
  std::size_t slot = 0;
  for (std::size_t k = 0; k < e.size(); ++k) {
    for (std::size_t c = 0; c < counts[k]; ++c, ++slot) {
      const auto from = e.position(k);
      std::copy(from.begin(), from.end(), out.position(slot).begin());
      out.ell(slot) = e.ell(k);
    }
  }
  return out;
}

double discrete_adjoint_check(std::span<const double> p, std::span<const double> psi) {
  const std::size_t n = p.size();
  if (n == 0 || psi.size() != n) fail(ErrorKind::invalid_argument, "discrete_adjoint_check: size mismatch");
  double mass = 0.0;
  for (double pi : p) {
    if (!(pi > 0.0)) fail(ErrorKind::invalid_argument, "discrete_adjoint_check: p must be positive");
    mass += pi;
  }
  if (std::abs(mass - 1.0) > 1e-9) fail(ErrorKind::invalid_argument, "discrete_adjoint_check: p must sum to 1");

  double mean = 0.0;
  for (std::size_t x = 0; x < n; ++x) mean += p[x] * psi[x];
  std::vector<double> excess(n), rate(n);
  double positive_mass = 0.0;
  for (std::size_t x = 0; x < n; ++x) {
    excess[x] = psi[x] - mean;
    rate[x] = std::max(0.0, -excess[x]);
    positive_mass += std::max(0.0, excess[x]) * p[x];
  }
  // W(x, y) = lambda(x) J(y | x), J(y | x) = (psi(y) - mean)^+ p(y) / positive_mass.
  std::vector<double> w(n * n, 0.0);
  if (positive_mass > 0.0) {
    for (std::size_t x = 0; x < n; ++x) {
      for (std::size_t y = 0; y < n; ++y) {
        w[x * n + y] = rate[x] * std::max(0.0, excess[y]) * p[y] / positive_mass;
      }
    }
  }
  double residual = 0.0;
  for (std::size_t x = 0; x < n; ++x) {
    double inflow = 0.0, outflow = 0.0;
    for (std::size_t y = 0; y < n; ++y) {
      inflow += w[y * n + x] * p[y];
      outflow += w[x * n + y];
    }
    const double adjoint = inflow - p[x] * outflow;
    residual = std::max(residual, std::abs(adjoint - p[x] * excess[x]));
  }
  return residual;
}

}  // namespace wfr
