#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "wfr/core.hpp"
#include "wfr/correctors.hpp"
#include "wfr/fields.hpp"
#include "wfr/kernels.hpp"
#include "wfr/reaction.hpp"

namespace wfr {

enum class Execution { serial, parallel };

struct StepReport {
  double t_before;
  double t_after;
  double max_abs_drift;
  double mean_log_w_increment;
};

// One weighted Euler-Maruyama step of the guided reverse-time SDE. Time moves
// from e.time() to e.time() - h; fields are evaluated at the pre-step time
// and position. The corrector is accumulated uncentered.
StepReport weighted_em_step(Ensemble& e, const FieldSet& fields, const InterpolationSpec& interp,
                            double h, std::uint64_t seed, std::uint64_t step_index,
                            Execution exec = Execution::parallel);

// Unadjusted Langevin step for a 1-D potential applied coordinate-wise; time
// advances by `step`. Weights are untouched.
void ula_step(Ensemble& e, const kernels::Potential& potential, double step, double temperature,
              std::uint64_t seed, std::uint64_t step_index, Execution exec = Execution::parallel);

enum class ReactionMode {
  reweight,  // accumulate psi into log_w, resample per scheme
  jump,      // birth-death jumps with uniform weights
};

struct SamplerSettings {
  FieldSet fields;
  InterpolationSpec interp;
  double t_start = 1.0;
  double t_end = 0.0;
  std::size_t n_steps = 500;  // 0 echoes the initial ensemble
  std::size_t particles = 1000;
  std::optional<ResampleScheme> resample = ResampleScheme{};
  std::uint64_t seed = 0;
  std::vector<double> snapshot_times{};
  ReactionMode reaction = ReactionMode::reweight;
  InitSampler init = standard_normal_init();
  Execution exec = Execution::parallel;
};

struct Snapshot {
  double t;
  Ensemble ensemble;
};

struct RunResult {
  std::vector<Snapshot> snapshots;
  std::vector<double> ess_trace;  // after each step, before any resampling
  std::vector<double> time_trace;
  double log_normalizer = 0.0;    // accumulated across resampling events
  std::size_t resample_count = 0;
  std::size_t jump_count = 0;
  Ensemble final_ensemble;
};

// Initializes ell to the exact log-ratio at t_start when the kind tracks it,
// then integrates the weighted SDE over the schedule, applying the reaction
// (resampling or jumps) after every step, and records snapshots whose times
// fall on the step grid (within half a step).
RunResult run(const SamplerSettings& settings);

}  // namespace wfr
