#include "wfr/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "wfr/error.hpp"

namespace wfr {

StepReport weighted_em_step(Ensemble& e, const FieldSet& fields, const InterpolationSpec& interp,
                            double h, std::uint64_t seed, std::uint64_t step_index, Execution exec) {
  interp.validate();
  const double t_before = e.time();
  const FieldSlice slice = fields.at(t_before);
  const kernels::EmStepStats stats =
      exec == Execution::parallel ? kernels::em_step_parallel(e, slice, interp, h, seed, step_index)
                                  : kernels::em_step_serial(e, slice, interp, h, seed, step_index);
  return StepReport{t_before, e.time(), stats.max_abs_drift, stats.mean_log_w_increment};
}

void ula_step(Ensemble& e, const kernels::Potential& potential, double step, double temperature,
              std::uint64_t seed, std::uint64_t step_index, Execution exec) {
  if (exec == Execution::parallel) {
    kernels::ula_step_parallel(e, potential, step, temperature, seed, step_index);
  } else {
    kernels::ula_step_serial(e, potential, step, temperature, seed, step_index);
  }
}

namespace {

void take_snapshots(const Ensemble& e, double half_step, const std::vector<double>& wanted,
                    std::vector<bool>& taken, std::vector<Snapshot>& out) {
  for (std::size_t i = 0; i < wanted.size(); ++i) {
    if (!taken[i] && std::abs(e.time() - wanted[i]) <= half_step) {
      taken[i] = true;
      out.push_back(Snapshot{wanted[i], e});
    }
  }
}

}  // namespace

RunResult run(const SamplerSettings& s) {
  s.interp.validate();
  if (s.particles == 0) fail(ErrorKind::invalid_argument, "run: particle count must be >= 1");
  if (!(s.t_start > s.t_end)) {
    fail(ErrorKind::invalid_argument, "run: sampling runs in reverse time (t_start > t_end)");
  }
  if (s.resample) s.resample->validate();

  Ensemble e = make_ensemble(s.particles, s.fields.dim(), s.init, s.seed, s.t_start);
  if (s.interp.tracks_ratio()) {
    const FieldSlice start = s.fields.at(s.t_start);
    for (std::size_t k = 0; k < e.size(); ++k) e.ell(k) = start.log_ratio(e.position(k));
  }
  RunResult result{{}, {}, {}, 0.0, 0, 0, e};
  std::vector<bool> taken(s.snapshot_times.size(), false);

  if (s.n_steps == 0) {
    result.snapshots.push_back(Snapshot{s.t_start, e});
    return result;
  }

  const TimeSchedule schedule(s.t_start, s.t_end, s.n_steps);
  const double h = schedule.step_size();
  take_snapshots(e, 0.5 * h, s.snapshot_times, taken, result.snapshots);

  for (std::size_t i = 0; i < s.n_steps; ++i) {
    e.set_time(schedule.time_at(i));
    if (s.reaction == ReactionMode::jump) {
      const FieldSlice slice = s.fields.at(e.time());
      const std::vector<double> psi =
          kernels::corrector_values(e, slice, s.interp, s.exec == Execution::parallel);
      const JumpStepStats js = jump_step_values(e, psi, h, s.seed, i, s.exec == Execution::parallel);
      result.jump_count += js.jumps;
      result.log_normalizer += js.mean_psi * h;
      weighted_em_step(e, s.fields, s.interp, h, s.seed, i, s.exec);
      for (double& lw : e.log_weights()) lw = 0.0;
    } else {
      weighted_em_step(e, s.fields, s.interp, h, s.seed, i, s.exec);
    }
    e.set_time(schedule.time_at(i + 1));

    if (e.alive_count() == 0) fail(ErrorKind::degenerate_ensemble, "run: every particle died");
    result.ess_trace.push_back(ess(e));
    result.time_trace.push_back(e.time());

    if (s.reaction == ReactionMode::reweight && s.resample && s.resample->should_resample(e, i + 1)) {
      result.log_normalizer += log_normalizer_estimate(e);
      RngStream rng(s.seed, StreamPurpose::resample, i + 1, 0);
      e = resample(e, *s.resample, rng);
      ++result.resample_count;
    }
    take_snapshots(e, 0.5 * h, s.snapshot_times, taken, result.snapshots);
  }
  if (s.reaction == ReactionMode::reweight) result.log_normalizer += log_normalizer_estimate(e);
  result.final_ensemble = std::move(e);
  return result;
}

}  // namespace wfr
