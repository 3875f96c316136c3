#pragma once

#include <cstddef>
#include <span>

#include "wfr/models.hpp"

namespace wfr {

// Both models and the schedule evaluated at a single time t.
struct FieldSlice {
  double t;
  double sigma;
  const DiffusionSchedule* schedule;
  GaussianMixtureModel q1;
  GaussianMixtureModel q2;

  std::size_t dim() const { return q1.dim(); }
  void drift_base(std::span<const double> x, std::span<double> out) const {
    schedule->drift(t, x, out);
  }
  // Exact log-ratio log(q2/q1) at x; used by oracles, never by the sampler.
  double log_ratio(std::span<const double> x) const {
    return q2.log_density(x) - q1.log_density(x);
  }
};

// Time-indexed drift f_t, diffusion sigma_t and the two model scores.
// The data-end models are noised analytically along the linear forward
// process; with frozen=true they are used as-is at every t.
class FieldSet {
 public:
  FieldSet(GaussianMixtureModel q1, GaussianMixtureModel q2, DiffusionSchedule schedule,
           bool frozen = false);

  std::size_t dim() const noexcept { return q1_.dim(); }
  bool frozen() const noexcept { return frozen_; }
  const DiffusionSchedule& schedule() const noexcept { return schedule_; }
  const GaussianMixtureModel& data_model(int which) const { return which == 1 ? q1_ : q2_; }

  FieldSlice at(double t) const;

 private:
  GaussianMixtureModel q1_;
  GaussianMixtureModel q2_;
  DiffusionSchedule schedule_;
  bool frozen_;
};

}  // namespace wfr
