#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "wfr/rng.hpp"

namespace wfr {

enum class TimeDirection { forward, reverse };

// Uniform time grid. For direction=reverse, t_start > t_end and the grid
// decreases; the step size h is always positive.
class TimeSchedule {
 public:
  TimeSchedule(double t_start, double t_end, std::size_t n_steps);

  double t_start() const noexcept { return t_start_; }
  double t_end() const noexcept { return t_end_; }
  std::size_t n_steps() const noexcept { return n_steps_; }
  TimeDirection direction() const noexcept { return direction_; }
  double step_size() const noexcept { return h_; }

  // Time after `k` steps, k in [0, n_steps]. The last point is exactly t_end.
  double time_at(std::size_t k) const;

 private:
  double t_start_;
  double t_end_;
  std::size_t n_steps_;
  TimeDirection direction_;
  double h_;
};

struct Particle {
  std::vector<double> x;
  double log_w = 0.0;
  double ell = 0.0;
  bool alive = true;
};

// K particles stored structure-of-arrays. Dead particles keep their slot
// until the next resampling barrier.
class Ensemble {
 public:
  Ensemble(std::size_t k, std::size_t dim, double time = 0.0);

  std::size_t size() const noexcept { return log_w_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  double time() const noexcept { return time_; }
  void set_time(double t) noexcept { time_ = t; }

  std::span<double> position(std::size_t k) { return {x_.data() + k * dim_, dim_}; }
  std::span<const double> position(std::size_t k) const { return {x_.data() + k * dim_, dim_}; }

  double& log_w(std::size_t k) { return log_w_[k]; }
  double log_w(std::size_t k) const { return log_w_[k]; }
  double& ell(std::size_t k) { return ell_[k]; }
  double ell(std::size_t k) const { return ell_[k]; }
  bool alive(std::size_t k) const { return alive_[k] != 0; }
  void kill(std::size_t k) { alive_[k] = 0; }

  std::span<double> positions() { return x_; }
  std::span<const double> positions() const { return x_; }
  std::span<double> log_weights() { return log_w_; }
  std::span<const double> log_weights() const { return log_w_; }
  std::span<const double> ells() const { return ell_; }

  std::size_t alive_count() const;

  Particle particle(std::size_t k) const;
  void set_particle(std::size_t k, const Particle& p);

  friend bool operator==(const Ensemble&, const Ensemble&) = default;

 private:
  std::size_t dim_;
  double time_;
  std::vector<double> x_;
  std::vector<double> log_w_;
  std::vector<double> ell_;
  std::vector<std::uint8_t> alive_;
};

using InitSampler = std::function<void(RngStream&, std::span<double>)>;

// Draws x_k from `init_sampler` using stream (seed, init, 0, k).
Ensemble make_ensemble(std::size_t k, std::size_t dim, const InitSampler& init_sampler,
                       std::uint64_t seed, double t_start = 0.0);

InitSampler standard_normal_init();

// Softmax of log_w over alive particles (dead entries are 0).
std::vector<double> normalized_weights(const Ensemble& e);

// log(sum exp(v)) over finite-or-(-inf) entries; -inf if all are -inf.
double log_sum_exp(std::span<const double> v);

}  // namespace wfr
