#include "wfr/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "wfr/error.hpp"

namespace wfr {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

double squared_distance(std::span<const double> x, std::span<const double> mu) {
  double d2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - mu[i];
    d2 += d * d;
  }
  return d2;
}

double component_log_term(const GaussianComponent& c, std::span<const double> x) {
  const double d = static_cast<double>(x.size());
  return c.log_weight - 0.5 * d * (kLog2Pi + std::log(c.var)) -
         0.5 * squared_distance(x, c.mean) / c.var;
}

}  // namespace

GaussianMixtureModel::GaussianMixtureModel(std::vector<GaussianComponent> components)
    : components_(std::move(components)) {
  if (components_.empty()) fail(ErrorKind::invalid_argument, "mixture: no components");
  dim_ = components_.front().mean.size();
  if (dim_ == 0) fail(ErrorKind::invalid_argument, "mixture: zero-dimensional mean");
  double total = 0.0;
  for (const auto& c : components_) {
    if (c.mean.size() != dim_) fail(ErrorKind::invalid_argument, "mixture: component dimension mismatch");
    if (!(c.var > 0.0) || !std::isfinite(c.var)) {
      fail(ErrorKind::invalid_argument, "mixture: component variance must be positive and finite");
    }
    for (double m : c.mean) {
      if (!std::isfinite(m)) fail(ErrorKind::invalid_argument, "mixture: non-finite mean");
    }
    total += std::exp(c.log_weight);
  }
  if (std::abs(total - 1.0) > 1e-10) {
    fail(ErrorKind::invalid_argument, "mixture: component weights do not sum to 1");
  }
}

GaussianMixtureModel GaussianMixtureModel::from_weights(
    const std::vector<std::vector<double>>& means, const std::vector<double>& vars,
    const std::vector<double>& weights) {
  if (means.size() != vars.size() || means.size() != weights.size() || means.empty()) {
    fail(ErrorKind::invalid_argument, "mixture: means, vars and weights must have equal nonzero length");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) fail(ErrorKind::invalid_argument, "mixture: weights must be positive");
    total += w;
  }
  std::vector<GaussianComponent> comps;
  comps.reserve(means.size());
  for (std::size_t j = 0; j < means.size(); ++j) {
    comps.push_back({means[j], vars[j], std::log(weights[j] / total)});
  }
  return GaussianMixtureModel(std::move(comps));
}

GaussianMixtureModel GaussianMixtureModel::gaussian(std::vector<double> mean, double var) {
  return GaussianMixtureModel({GaussianComponent{std::move(mean), var, 0.0}});
}

MixturePointEval GaussianMixtureModel::evaluate(std::span<const double> x,
                                                std::span<double> score_out) const {
  const double d = static_cast<double>(dim_);
  if (components_.size() == 1) {
    const auto& c = components_.front();
    for (std::size_t i = 0; i < dim_; ++i) score_out[i] = -(x[i] - c.mean[i]) / c.var;
    return {component_log_term(c, x), -d / c.var};
  }

  double max_term = -std::numeric_limits<double>::infinity();
  for (const auto& c : components_) max_term = std::max(max_term, component_log_term(c, x));

  std::fill(score_out.begin(), score_out.end(), 0.0);
  double total = 0.0;
  double curvature = 0.0;  // sum_j r_j (-d/v_j + |s_j|^2), unnormalized
  for (const auto& c : components_) {
    const double w = std::exp(component_log_term(c, x) - max_term);
    double s2 = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
      const double sj = -(x[i] - c.mean[i]) / c.var;
      score_out[i] += w * sj;
      s2 += sj * sj;
    }
    curvature += w * (-d / c.var + s2);
    total += w;
  }
  double norm2 = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) {
    score_out[i] /= total;
    norm2 += score_out[i] * score_out[i];
  }
  return {max_term + std::log(total), curvature / total - norm2};
}

double GaussianMixtureModel::log_density(std::span<const double> x) const {
  if (components_.size() == 1) return component_log_term(components_.front(), x);
  double max_term = -std::numeric_limits<double>::infinity();
  for (const auto& c : components_) max_term = std::max(max_term, component_log_term(c, x));
  double total = 0.0;
  for (const auto& c : components_) total += std::exp(component_log_term(c, x) - max_term);
  return max_term + std::log(total);
}

void GaussianMixtureModel::score(std::span<const double> x, std::span<double> out) const {
  evaluate(x, out);
}

std::vector<double> GaussianMixtureModel::score(std::span<const double> x) const {
  std::vector<double> out(dim_);
  evaluate(x, out);
  return out;
}

double GaussianMixtureModel::score_divergence(std::span<const double> x) const {
  std::vector<double> tmp(dim_);
  return evaluate(x, tmp).score_divergence;
}

DiffusionSchedule DiffusionSchedule::vp_linear(double b_min, double b_max, double stationary_var) {
  if (!(b_min >= 0.0) || !(b_max >= b_min) || !(stationary_var > 0.0)) {
    fail(ErrorKind::invalid_argument, "vp schedule: need 0 <= b_min <= b_max and stationary_var > 0");
  }
  DiffusionSchedule s;
  s.family_ = ScheduleFamily::vp_linear;
  s.p0_ = b_min;
  s.p1_ = b_max;
  s.p2_ = stationary_var;
  return s;
}

DiffusionSchedule DiffusionSchedule::constant(double kappa, double sigma) {
  if (!(sigma >= 0.0) || !std::isfinite(kappa)) {
    fail(ErrorKind::invalid_argument, "constant schedule: need finite kappa and sigma >= 0");
  }
  DiffusionSchedule s;
  s.family_ = ScheduleFamily::constant;
  s.p0_ = kappa;
  s.p1_ = sigma;
  return s;
}

DiffusionSchedule DiffusionSchedule::custom(SigmaFn sigma, DriftFn drift) {
  DiffusionSchedule s;
  s.family_ = ScheduleFamily::custom;
  s.sigma_fn_ = std::move(sigma);
  s.drift_fn_ = std::move(drift);
  return s;
}

double DiffusionSchedule::sigma(double t) const {
  switch (family_) {
    case ScheduleFamily::vp_linear: {
      const double b = p0_ + t * (p1_ - p0_);
      return std::sqrt(std::max(b, 0.0) * p2_);
    }
    case ScheduleFamily::constant: return p1_;
    case ScheduleFamily::custom: return sigma_fn_(t);
  }
  return 0.0;
}

double DiffusionSchedule::kappa(double t) const {
  switch (family_) {
    case ScheduleFamily::vp_linear: return 0.5 * (p0_ + t * (p1_ - p0_));
    case ScheduleFamily::constant: return p0_;
    case ScheduleFamily::custom: break;
  }
  fail(ErrorKind::unsupported_model, "diffusion schedule: kappa undefined for custom drift");
}

void DiffusionSchedule::drift(double t, std::span<const double> x, std::span<double> out) const {
  if (family_ == ScheduleFamily::custom) {
    drift_fn_(t, x, out);
    return;
  }
  const double k = kappa(t);
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = -k * x[i];
}

double DiffusionSchedule::integrated_kappa(double s, double t) const {
  switch (family_) {
    case ScheduleFamily::vp_linear:
      return 0.5 * (p0_ * (t - s) + 0.5 * (p1_ - p0_) * (t * t - s * s));
    case ScheduleFamily::constant: return p0_ * (t - s);
    case ScheduleFamily::custom: break;
  }
  fail(ErrorKind::unsupported_model, "diffusion schedule: nonlinear drift has no closed-form transition");
}

double DiffusionSchedule::alpha(double s, double t) const { return std::exp(-integrated_kappa(s, t)); }

double DiffusionSchedule::noise_var(double s, double t) const {
  const double k_int = integrated_kappa(s, t);
  switch (family_) {
    case ScheduleFamily::vp_linear: return -p2_ * std::expm1(-2.0 * k_int);
    case ScheduleFamily::constant:
      if (p0_ == 0.0) return p1_ * p1_ * (t - s);
      return -p1_ * p1_ * std::expm1(-2.0 * k_int) / (2.0 * p0_);
    case ScheduleFamily::custom: break;
  }
  fail(ErrorKind::unsupported_model, "diffusion schedule: nonlinear drift has no closed-form transition");
}

GaussianMixtureModel ou_forward_marginal(const GaussianMixtureModel& m, double t,
                                         const DiffusionSchedule& sched, double t_from) {
  if (!sched.is_linear()) {
    fail(ErrorKind::unsupported_model, "ou_forward_marginal: drift must be linear (f_t(x) = -kappa_t x)");
  }
  if (!(t >= t_from)) fail(ErrorKind::invalid_argument, "ou_forward_marginal: t must be >= t_from");
  if (t == t_from) return m;
  const double a = sched.alpha(t_from, t);
  const double nv = sched.noise_var(t_from, t);
  std::vector<GaussianComponent> comps = m.components();
  for (auto& c : comps) {
    for (double& mu : c.mean) mu *= a;
    c.var = a * a * c.var + nv;
  }
  return GaussianMixtureModel(std::move(comps));
}

DoubleWellTarget::DoubleWellTarget(double a, double m) : barrier_height(a), well_separation(m) {
  if (!(a > 0.0) || !(m > 0.0)) fail(ErrorKind::invalid_argument, "double well: a and m must be positive");
}

double DoubleWellTarget::potential(double x) const {
  const double q = x * x - well_separation * well_separation;
  return barrier_height * q * q;
}

double DoubleWellTarget::gradient(double x) const {
  return 4.0 * barrier_height * x * (x * x - well_separation * well_separation);
}

double langevin_drift(const DoubleWellTarget& tgt, double x) { return -tgt.gradient(x); }

}  // namespace wfr
