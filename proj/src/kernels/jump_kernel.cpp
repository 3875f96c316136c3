#include <algorithm>
#include <cmath>
#include <vector>

#include "wfr/error.hpp"
#include "wfr/reaction.hpp"

namespace wfr {

namespace {

struct JumpTable {
  double mean_psi = 0.0;
  std::vector<double> cumulative;  // prefix sums of (psi_k - mean)^+ p_k
  double total = 0.0;
};

JumpTable build_jump_table(const Ensemble& e, std::span<const double> psi_values) {
  if (psi_values.size() != e.size()) {
    fail(ErrorKind::invalid_argument, "jump: psi_values length differs from ensemble size");
  }
  const std::vector<double> p = normalized_weights(e);
  JumpTable table;
  for (std::size_t k = 0; k < e.size(); ++k) {
    if (e.alive(k)) table.mean_psi += p[k] * psi_values[k];
  }
  table.cumulative.resize(e.size());
  double running = 0.0;
  for (std::size_t k = 0; k < e.size(); ++k) {
    if (e.alive(k)) running += std::max(0.0, psi_values[k] - table.mean_psi) * p[k];
    table.cumulative[k] = running;
  }
  table.total = running;
  return table;
}

std::size_t draw_target(const JumpTable& table, double u) {
  const double target = u * table.total;
  const auto it = std::upper_bound(table.cumulative.begin(), table.cumulative.end(), target);
  const auto idx = static_cast<std::size_t>(it - table.cumulative.begin());
  return std::min(idx, table.cumulative.size() - 1);
}

}  // namespace

std::size_t jump_kernel_sample(const Ensemble& e, std::span<const double> psi_values, RngStream& rng) {
  const JumpTable table = build_jump_table(e, psi_values);
  if (!(table.total > 0.0)) {
    fail(ErrorKind::no_jump_target, "jump_kernel_sample: no particle has psi above the mean");
  }
  return draw_target(table, rng.uniform());
}

JumpStepStats jump_step_values(Ensemble& e, std::span<const double> psi_values, double h,
                               std::uint64_t seed, std::uint64_t step_index, bool parallel) {
  if (!(h > 0.0)) fail(ErrorKind::invalid_argument, "jump_step: h must be positive");
  const JumpTable table = build_jump_table(e, psi_values);
  JumpStepStats stats{table.mean_psi, 0.0, 0};
  for (std::size_t k = 0; k < e.size(); ++k) {
    if (e.alive(k)) stats.max_rate = std::max(stats.max_rate, table.mean_psi - psi_values[k]);
  }
  if (stats.max_rate * h > 1.0) {
    fail(ErrorKind::step_size, "jump_step: max rate * h exceeds 1; shrink the step");
  }
  if (!(table.total > 0.0)) return stats;

  const Ensemble before = e;
  const std::size_t d = e.dim();
  const auto n = static_cast<std::ptrdiff_t>(e.size());
  std::vector<std::uint8_t> jumped(e.size(), 0);
#pragma omp parallel for schedule(static) if (parallel)
  for (std::ptrdiff_t kk = 0; kk < n; ++kk) {
    const auto k = static_cast<std::size_t>(kk);
    if (!before.alive(k)) continue;
    const double rate = std::max(0.0, table.mean_psi - psi_values[k]);
    RngStream rng(seed, StreamPurpose::jump, step_index, k);
    const double u_event = rng.uniform();
    const double u_target = rng.uniform();
    if (u_event < rate * h) {
      const std::size_t src = draw_target(table, u_target);
      const auto from = before.position(src);
      std::copy(from.begin(), from.begin() + static_cast<std::ptrdiff_t>(d), e.position(k).begin());
      e.ell(k) = before.ell(src);
      jumped[k] = 1;
    }
  }
  stats.jumps = static_cast<std::size_t>(std::count(jumped.begin(), jumped.end(), std::uint8_t{1}));
  return stats;
}

JumpStepStats jump_step(Ensemble& e, const PositionFn& psi, double h, std::uint64_t seed,
                        std::uint64_t step_index, bool parallel) {
  std::vector<double> values(e.size(), 0.0);
  for (std::size_t k = 0; k < e.size(); ++k) {
    if (e.alive(k)) values[k] = psi(e.position(k));
  }
  return jump_step_values(e, values, h, seed, step_index, parallel);
}

}  // namespace wfr
