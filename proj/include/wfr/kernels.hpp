#pragma once

// Per-particle update kernels. Each has a plain serial reference and an
// OpenMP version; both must produce bit-identical ensembles for any thread
// count (tests/test_kernels.cpp).

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "wfr/core.hpp"
#include "wfr/correctors.hpp"
#include "wfr/fields.hpp"
#include "wfr/models.hpp"

namespace wfr::kernels {

struct EmStepStats {
  double max_abs_drift = 0.0;
  double mean_log_w_increment = 0.0;
};

// x <- x + v h + sigma sqrt(h) xi, log_w <- log_w + psi h,
// ell <- ell + drift_ell h + sigma sqrt(h) <s2 - s1, xi>, all at the pre-step
// position, with xi from stream (seed, em_step, step_index, k).
EmStepStats em_step_serial(Ensemble& e, const FieldSlice& slice, const InterpolationSpec& interp,
                           double h, std::uint64_t seed, std::uint64_t step_index);
EmStepStats em_step_parallel(Ensemble& e, const FieldSlice& slice, const InterpolationSpec& interp,
                             double h, std::uint64_t seed, std::uint64_t step_index);

using Potential = std::variant<DoubleWellTarget, QuadraticWell>;

double potential_gradient(const Potential& v, double x);

// x <- x - grad V(x) step + sqrt(2 temperature step) xi, coordinate-wise.
void ula_step_serial(Ensemble& e, const Potential& v, double step, double temperature,
                     std::uint64_t seed, std::uint64_t step_index);
void ula_step_parallel(Ensemble& e, const Potential& v, double step, double temperature,
                       std::uint64_t seed, std::uint64_t step_index);

// Evaluates psi_k for every alive particle (dead entries are NaN).
std::vector<double> corrector_values(const Ensemble& e, const FieldSlice& slice,
                                     const InterpolationSpec& interp, bool parallel);

}  // namespace wfr::kernels
