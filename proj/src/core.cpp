#include "wfr/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wfr/error.hpp"

namespace wfr {

TimeSchedule::TimeSchedule(double t_start, double t_end, std::size_t n_steps)
    : t_start_(t_start), t_end_(t_end), n_steps_(n_steps) {
  if (n_steps == 0) fail(ErrorKind::invalid_argument, "time schedule: n_steps must be >= 1");
  if (!std::isfinite(t_start) || !std::isfinite(t_end) || t_start == t_end) {
    fail(ErrorKind::invalid_argument, "time schedule: t_start and t_end must be finite and distinct");
  }
  direction_ = t_end > t_start ? TimeDirection::forward : TimeDirection::reverse;
  h_ = std::abs(t_end - t_start) / static_cast<double>(n_steps);
}

double TimeSchedule::time_at(std::size_t k) const {
  if (k > n_steps_) fail(ErrorKind::invalid_argument, "time schedule: step index out of range");
  if (k == n_steps_) return t_end_;
  const double frac = static_cast<double>(k) / static_cast<double>(n_steps_);
  return t_start_ + frac * (t_end_ - t_start_);
}

Ensemble::Ensemble(std::size_t k, std::size_t dim, double time)
    : dim_(dim), time_(time), x_(k * dim, 0.0), log_w_(k, 0.0), ell_(k, 0.0), alive_(k, 1) {
  if (k == 0) fail(ErrorKind::invalid_argument, "ensemble: particle count must be >= 1");
  if (dim == 0) fail(ErrorKind::invalid_argument, "ensemble: dimension must be >= 1");
}

std::size_t Ensemble::alive_count() const {
  return static_cast<std::size_t>(std::count(alive_.begin(), alive_.end(), std::uint8_t{1}));
}

Particle Ensemble::particle(std::size_t k) const {
  const auto x = position(k);
  return Particle{{x.begin(), x.end()}, log_w_[k], ell_[k], alive(k)};
}

void Ensemble::set_particle(std::size_t k, const Particle& p) {
  if (p.x.size() != dim_) fail(ErrorKind::invalid_argument, "ensemble: particle dimension mismatch");
  std::copy(p.x.begin(), p.x.end(), position(k).begin());
  log_w_[k] = p.log_w;
  ell_[k] = p.ell;
  alive_[k] = p.alive ? 1 : 0;
}

Ensemble make_ensemble(std::size_t k, std::size_t dim, const InitSampler& init_sampler,
                       std::uint64_t seed, double t_start) {
  Ensemble e(k, dim, t_start);
  for (std::size_t i = 0; i < k; ++i) {
    RngStream rng(seed, StreamPurpose::init, 0, i);
    init_sampler(rng, e.position(i));
  }
  return e;
}

InitSampler standard_normal_init() {
  return [](RngStream& rng, std::span<double> x) {
    for (double& xi : x) xi = rng.normal();
  };
}

double log_sum_exp(std::span<const double> v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double a : v) m = std::max(m, a);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double a : v) s += std::exp(a - m);
  return m + std::log(s);
}

std::vector<double> normalized_weights(const Ensemble& e) {
  const std::size_t k = e.size();
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < k; ++i) {
    if (e.alive(i)) m = std::max(m, e.log_w(i));
  }
  if (!(m > -std::numeric_limits<double>::infinity()) || !std::isfinite(m)) {
    fail(ErrorKind::degenerate_ensemble, "normalized_weights: no alive particle with finite log-weight");
  }
  std::vector<double> p(k, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    if (!e.alive(i)) continue;
    p[i] = std::exp(e.log_w(i) - m);
    total += p[i];
  }
  for (double& pi : p) pi /= total;
  return p;
}

}  // namespace wfr

namespace wfr {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::degenerate_ensemble: return "degenerate_ensemble";
    case ErrorKind::unsupported_model: return "unsupported_model";
    case ErrorKind::step_size: return "step_size";
    case ErrorKind::no_jump_target: return "no_jump_target";
    case ErrorKind::numerical_failure: return "numerical_failure";
    case ErrorKind::domain_error: return "domain_error";
    case ErrorKind::config_error: return "config_error";
  }
  return "unknown";
}

}  // namespace wfr
