#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "wfr/core.hpp"
#include "wfr/correctors.hpp"
#include "wfr/fields.hpp"
#include "wfr/grid.hpp"

namespace wfr {

// Coefficients of the 1-D Feynman-Kac PDE, advanced in the sampling clock:
//   dp/ds = -d/dx (v p) + (sigma^2/2) d2p/dx2 + (psi - E_p psi) p.
struct PdeCoefficients {
  // At schedule time t, fills v at the n+1 cell faces and psi at the n cell
  // centers, and returns sigma_t.
  std::function<double(double t, std::span<const double> faces, std::span<const double> centers,
                       std::span<double> face_velocity, std::span<double> cell_psi)>
      eval;
};

// Pointwise coefficients; a null psi means psi = 0.
PdeCoefficients make_pde_coefficients(std::function<double(double, double)> velocity,
                                      std::function<double(double)> sigma,
                                      std::function<double(double, double)> psi = {});

// Guided drift -f + sigma^2 s_guided and corrector psi of the interpolation,
// both evaluated with the exact log-ratio of the two noised models.
PdeCoefficients guided_pde_coefficients(const FieldSet& fields, const InterpolationSpec& interp);

struct PdeSolveOptions {
  std::vector<double> snapshot_times;
  // Split a schedule step into equal substeps (coefficients frozen at the
  // step's left time) instead of failing when the step breaks the CFL bound.
  bool substep = false;
  double cfl_safety = 0.45;
  double mass_tolerance = 1e-8;
};

struct GridTrajectory {
  std::vector<double> times;
  std::vector<GridDensity> densities;
};

// Explicit split scheme per step: MUSCL/van Leer upwind advection with SSP-RK2,
// centered diffusion, reaction exp(h (psi - E psi)) with renormalization.
// Zero density outside the grid. Records the initial density, every
// snapshot time that falls on the schedule grid, and the final density.
// Errors: step_size if h > min(dx / max|v|, dx^2 / sigma^2) without
// substepping; numerical_failure if transport changes the mass by more than
// mass_tolerance in a step.
GridTrajectory fk_pde_solve(const GridDensity& p0, const PdeCoefficients& coeffs,
                            const TimeSchedule& sched, const PdeSolveOptions& options = {});

// Grid discretization of the reversible diffusion generator
//   L f = (sigma^2/2) (f'' + (log pi)' f')
// by centered differences. Outputs are NaN where the stencil leaves the grid.
class GridGenerator {
 public:
  GridGenerator(double dx, std::vector<double> grad_log_pi, double sigma);
  // pi = N(0, 1/alpha) on the cell centers of `grid`.
  static GridGenerator ou(const GridDensity& grid, double alpha, double sigma = 1.4142135623730951);

  std::vector<double> apply(std::span<const double> f) const;
  double dx() const noexcept { return dx_; }
  double sigma() const noexcept { return sigma_; }

 private:
  double dx_;
  std::vector<double> grad_log_pi_;
  double sigma_;
};

// 1/2 (L(fg) - f Lg - g Lf)
std::vector<double> gamma_operator(std::span<const double> f, std::span<const double> g,
                                   const GridGenerator& L);
// 1/2 (L Gamma(f) - 2 Gamma(f, Lf))
std::vector<double> gamma2_operator(std::span<const double> f, const GridGenerator& L);

struct Chi2Report {
  double lhs;       // 1/2 d/dt Var_pi(rho), by an extrapolated difference in time
  double rhs;
  double residual;  // |lhs - rhs|
};

// Both sides of the chi-square dissipation identity for p = rho pi evolving
// under the reversible diffusion toward pi (noise level sigma) plus the frozen
// reaction g. `rho` holds relative-density values on pi's grid.
Chi2Report chi2_dissipation_residual(const GridDensity& rho, const std::function<double(double)>& g,
                                     const GridDensity& pi, double sigma, double h = 1e-4);

enum class OuObservable { linear, quadratic };

// Closed-form OU semigroup for dX = -alpha X dt + sqrt(2) dW in 1-D:
//   P_t x   = e^{-alpha t} x
//   P_t x^2 = e^{-2 alpha t} x^2 + (1 - e^{-2 alpha t}) / alpha
struct OuSemigroup {
  OuObservable kind;
  double alpha;
  double t;

  double apply(double x) const;
  // Var_pi(P_t x) / Var_pi(x)
  double variance_ratio() const;
};

OuSemigroup ou_semigroup(OuObservable kind, double alpha, double t);

struct VarianceDecayReport {
  double estimate;  // Monte Carlo Var_pi(P_t x) / Var_pi(x)
  double exact;
  double relative_error;
};

// x_i ~ pi = N(0, 1/alpha); P_t x at each x_i from `inner` ULA paths with
// the given step. The inner-path noise is removed from Var(P_t x) with the
// unbiased within-group variance.
VarianceDecayReport mc_variance_decay(double alpha, double t, std::size_t k, std::size_t inner,
                                      double step, std::uint64_t seed, bool parallel = true);

}  // namespace wfr
