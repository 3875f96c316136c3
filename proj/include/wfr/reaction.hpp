#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "wfr/core.hpp"
#include "wfr/rng.hpp"

namespace wfr {

enum class ResampleKind { multinomial, systematic };

struct ResampleTrigger {
  enum class Kind { every_n, ess_below };
  Kind kind = Kind::ess_below;
  std::size_t n = 1;
  double fraction = 0.5;

  static ResampleTrigger every_n(std::size_t n) { return {Kind::every_n, n, 0.0}; }
  static ResampleTrigger ess_below(double fraction) { return {Kind::ess_below, 0, fraction}; }
};

struct ResampleScheme {
  ResampleKind kind = ResampleKind::systematic;
  ResampleTrigger trigger = ResampleTrigger::ess_below(0.5);

  void validate() const;
  // `steps_done` counts integration steps since the start of the run.
  bool should_resample(const Ensemble& e, std::size_t steps_done) const;
};

using PositionFn = std::function<double(std::span<const double>)>;

// sum_k softmax(log_w)_k phi(x_k) over alive particles.
double snis_expectation(const Ensemble& e, const PositionFn& phi);
// log((1/K) sum_k exp(log_w_k)); dead particles contribute zero mass.
double log_normalizer_estimate(const Ensemble& e);
// 1 / sum_k p_k^2.
double ess(const Ensemble& e);

// Offspring counts per ancestor for the given normalized weights.
std::vector<std::size_t> offspring_counts(std::span<const double> weights, std::size_t n_offspring,
                                          ResampleKind kind, RngStream& rng);

// K offspring from the normalized weights; log_w reset to 0, ell copied from
// ancestors, dead slots dropped. Time is preserved.
Ensemble resample(const Ensemble& e, const ResampleScheme& scheme, RngStream& rng);

// Index k with probability proportional to (psi_k - mean)^+ p_k where mean is
// the weighted mean of psi under the ensemble's normalized weights.
std::size_t jump_kernel_sample(const Ensemble& e, std::span<const double> psi_values, RngStream& rng);

struct JumpStepStats {
  double mean_psi;
  double max_rate;
  std::size_t jumps;
};

// One birth-death step of length h: particle k jumps with probability
// lambda_k h, lambda_k = (psi_k - mean)^-, onto a jump_kernel_sample target
// (position and ell are cloned). Uses stream (seed, jump, step_index, k) for
// particle k. Throws step_size if max lambda h > 1.
JumpStepStats jump_step(Ensemble& e, const PositionFn& psi, double h, std::uint64_t seed,
                        std::uint64_t step_index, bool parallel = true);
// Same, with psi already evaluated per particle.
JumpStepStats jump_step_values(Ensemble& e, std::span<const double> psi_values, double h,
                               std::uint64_t seed, std::uint64_t step_index, bool parallel = true);

// On a finite state space, builds lambda and J from the birth-death
// construction, evaluates the adjoint generator on p by brute force and
// returns max_x |J*[p](x) - p(x)(psi(x) - E_p psi)|.
double discrete_adjoint_check(std::span<const double> p, std::span<const double> psi);

}  // namespace wfr
