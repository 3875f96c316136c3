#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace wfr {

struct GaussianComponent {
  std::vector<double> mean;
  double var = 1.0;  // isotropic
  double log_weight = 0.0;
};

// Point evaluation of a mixture: log q, grad log q, and Laplacian of log q.
struct MixturePointEval {
  double log_density;
  double score_divergence;
};

// Isotropic Gaussian mixture sum_j w_j N(mu_j, v_j I). Immutable.
class GaussianMixtureModel {
 public:
  // Component log-weights must already normalize to 1 within 1e-10.
  explicit GaussianMixtureModel(std::vector<GaussianComponent> components);

  // Builds from (mean, var, weight) triples, normalizing the weights.
  static GaussianMixtureModel from_weights(const std::vector<std::vector<double>>& means,
                                           const std::vector<double>& vars,
                                           const std::vector<double>& weights);
  static GaussianMixtureModel gaussian(std::vector<double> mean, double var);

  std::size_t dim() const noexcept { return dim_; }
  const std::vector<GaussianComponent>& components() const noexcept { return components_; }

  double log_density(std::span<const double> x) const;
  void score(std::span<const double> x, std::span<double> out) const;
  std::vector<double> score(std::span<const double> x) const;
  double score_divergence(std::span<const double> x) const;

  // One pass computing log q, the score (written to score_out) and div score.
  MixturePointEval evaluate(std::span<const double> x, std::span<double> score_out) const;

  // 1-D convenience.
  double log_density(double x) const { return log_density(std::span<const double>(&x, 1)); }

 private:
  std::vector<GaussianComponent> components_;
  std::size_t dim_;
};

enum class ScheduleFamily { vp_linear, constant, custom };

// sigma_t and the forward drift f_t(x). For the linear families the drift is
// f_t(x) = -kappa_t x, so component means contract by alpha = exp(-int kappa).
class DiffusionSchedule {
 public:
  using SigmaFn = std::function<double(double)>;
  using DriftFn = std::function<void(double, std::span<const double>, std::span<double>)>;

  // kappa_t = b(t)/2, sigma_t^2 = b(t) * stationary_var, b(t) = b_min + t (b_max - b_min).
  static DiffusionSchedule vp_linear(double b_min, double b_max, double stationary_var = 1.0);
  // kappa_t = kappa, sigma_t = sigma.
  static DiffusionSchedule constant(double kappa, double sigma);
  // Arbitrary drift; ou_forward_marginal rejects these.
  static DiffusionSchedule custom(SigmaFn sigma, DriftFn drift);

  ScheduleFamily family() const noexcept { return family_; }
  bool is_linear() const noexcept { return family_ != ScheduleFamily::custom; }

  double sigma(double t) const;
  double kappa(double t) const;  // linear families only
  void drift(double t, std::span<const double> x, std::span<double> out) const;

  // Mean factor and added noise variance of the forward transition s -> t
  // (s <= t): X_t = alpha X_s + sqrt(noise_var) Z.
  double alpha(double s, double t) const;
  double noise_var(double s, double t) const;

  double b_min() const noexcept { return p0_; }
  double b_max() const noexcept { return p1_; }
  double stationary_var() const noexcept { return p2_; }
  double kappa_const() const noexcept { return p0_; }
  double sigma_const() const noexcept { return p1_; }

 private:
  DiffusionSchedule() = default;
  double integrated_kappa(double s, double t) const;

  ScheduleFamily family_ = ScheduleFamily::constant;
  double p0_ = 0.0, p1_ = 0.0, p2_ = 1.0;
  SigmaFn sigma_fn_;
  DriftFn drift_fn_;
};

// Exact law at time t of the linear forward process started from `m` at
// time `t_from` (default 0). Throws unsupported_model for custom drifts.
GaussianMixtureModel ou_forward_marginal(const GaussianMixtureModel& m, double t,
                                         const DiffusionSchedule& sched, double t_from = 0.0);

// V(x) = a (x^2 - m^2)^2 in 1-D.
struct DoubleWellTarget {
  double barrier_height;
  double well_separation;

  DoubleWellTarget(double a, double m);
  double potential(double x) const;
  double gradient(double x) const;
};

// V(x) = (alpha/2) x^2.
struct QuadraticWell {
  double alpha = 1.0;
  double potential(double x) const { return 0.5 * alpha * x * x; }
  double gradient(double x) const { return alpha * x; }
};

// -grad V for the double well.
double langevin_drift(const DoubleWellTarget& tgt, double x);

}  // namespace wfr
