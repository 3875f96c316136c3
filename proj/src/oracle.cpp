#include "wfr/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include "wfr/error.hpp"
#include "wfr/kernels.hpp"

namespace wfr {

PdeCoefficients make_pde_coefficients(std::function<double(double, double)> velocity,
                                      std::function<double(double)> sigma,
                                      std::function<double(double, double)> psi) {
  PdeCoefficients c;
  c.eval = [velocity = std::move(velocity), sigma = std::move(sigma), psi = std::move(psi)](
               double t, std::span<const double> faces, std::span<const double> centers,
               std::span<double> face_v, std::span<double> cell_psi) {
    for (std::size_t j = 0; j < faces.size(); ++j) face_v[j] = velocity ? velocity(t, faces[j]) : 0.0;
    for (std::size_t i = 0; i < centers.size(); ++i) cell_psi[i] = psi ? psi(t, centers[i]) : 0.0;
    return sigma ? sigma(t) : 0.0;
  };
  return c;
}

PdeCoefficients guided_pde_coefficients(const FieldSet& fields, const InterpolationSpec& interp) {
  if (fields.dim() != 1) fail(ErrorKind::unsupported_model, "grid oracle: models must be 1-D");
  interp.validate();
  PdeCoefficients c;
  c.eval = [fields, interp](double t, std::span<const double> faces, std::span<const double> centers,
                            std::span<double> face_v, std::span<double> cell_psi) {
    const FieldSlice slice = fields.at(t);
    const double sigma = slice.sigma;
    double s1 = 0.0, s2 = 0.0, guided = 0.0, f = 0.0;
    auto eval_at = [&](double x) {
      const std::span<const double> xs(&x, 1);
      const double l1 = slice.q1.evaluate(xs, std::span<double>(&s1, 1)).log_density;
      const double l2 = slice.q2.evaluate(xs, std::span<double>(&s2, 1)).log_density;
      return guided_eval_into(interp, std::span<const double>(&s1, 1), std::span<const double>(&s2, 1),
                              l2 - l1, sigma, std::span<double>(&guided, 1));
    };
    for (std::size_t j = 0; j < faces.size(); ++j) {
      eval_at(faces[j]);
      const double x = faces[j];
      slice.drift_base(std::span<const double>(&x, 1), std::span<double>(&f, 1));
      face_v[j] = -f + sigma * sigma * guided;
    }
    for (std::size_t i = 0; i < centers.size(); ++i) cell_psi[i] = eval_at(centers[i]).psi;
    return sigma;
  };
  return c;
}

namespace {

double van_leer(double a, double b) {
  return a * b > 0.0 ? 2.0 * a * b / (a + b) : 0.0;
}

// Divergence of the MUSCL upwind flux; cells outside the grid are zero.
void advection_rate(std::span<const double> p, std::span<const double> face_v, double dx,
                    std::vector<double>& flux, std::vector<double>& out) {
  const std::size_t n = p.size();
  auto at = [&](std::ptrdiff_t i) {
    return (i < 0 || i >= static_cast<std::ptrdiff_t>(n)) ? 0.0 : p[static_cast<std::size_t>(i)];
  };
  auto slope = [&](std::ptrdiff_t i) { return van_leer(at(i) - at(i - 1), at(i + 1) - at(i)); };
  for (std::size_t j = 0; j <= n; ++j) {
    const auto jj = static_cast<std::ptrdiff_t>(j);
    const double v = face_v[j];
    const double state = v > 0.0 ? at(jj - 1) + 0.5 * slope(jj - 1) : at(jj) - 0.5 * slope(jj);
    flux[j] = v * state;
  }
  for (std::size_t i = 0; i < n; ++i) out[i] = -(flux[i + 1] - flux[i]) / dx;
}

class SplitStepper {
 public:
  explicit SplitStepper(std::size_t n) : flux_(n + 1), k1_(n), k2_(n), stage_(n), tmp_(n) {}

  void advect(std::vector<double>& p, std::span<const double> face_v, double dx, double h) {
    double vmax = 0.0;
    for (double v : face_v) vmax = std::max(vmax, std::abs(v));
    if (vmax == 0.0) return;
    // SSP-RK2 with a limited reconstruction stays positive for CFL <= 1/2.
    const auto m = static_cast<std::size_t>(std::max(1.0, std::ceil(h * vmax / dx / 0.5)));
    const double hs = h / static_cast<double>(m);
    for (std::size_t r = 0; r < m; ++r) {
      advection_rate(p, face_v, dx, flux_, k1_);
      for (std::size_t i = 0; i < p.size(); ++i) stage_[i] = p[i] + hs * k1_[i];
      advection_rate(stage_, face_v, dx, flux_, k2_);
      for (std::size_t i = 0; i < p.size(); ++i) {
        p[i] = std::max(0.0, 0.5 * p[i] + 0.5 * (stage_[i] + hs * k2_[i]));
      }
    }
  }

  void diffuse(std::vector<double>& p, double sigma, double dx, double h) {
    const double r = 0.5 * sigma * sigma * h / (dx * dx);
    if (r == 0.0) return;
    const std::size_t n = p.size();
    for (std::size_t i = 0; i < n; ++i) {
      const double left = i > 0 ? p[i - 1] : 0.0;
      const double right = i + 1 < n ? p[i + 1] : 0.0;
      tmp_[i] = p[i] + r * (right - 2.0 * p[i] + left);
    }
    p.swap(tmp_);
  }

 private:
  std::vector<double> flux_, k1_, k2_, stage_, tmp_;
};

double sum_mass(const std::vector<double>& p, double dx) {
  double s = 0.0;
  for (double v : p) s += v;
  return s * dx;
}

}  // namespace

GridTrajectory fk_pde_solve(const GridDensity& p0, const PdeCoefficients& coeffs,
                            const TimeSchedule& sched, const PdeSolveOptions& options) {
  if (!coeffs.eval) fail(ErrorKind::invalid_argument, "fk_pde_solve: missing coefficients");
  const std::size_t n = p0.n_cells;
  const double dx = p0.dx();
  const std::vector<double> faces = p0.edges();
  const std::vector<double> centers = p0.centers();
  std::vector<double> face_v(n + 1), psi(n);

  GridDensity cur = p0;
  cur.normalize();
  GridTrajectory out;
  out.times.push_back(sched.t_start());
  out.densities.push_back(cur);

  const double h = sched.step_size();
  std::vector<bool> taken(options.snapshot_times.size(), false);
  auto record = [&](double t, bool force) {
    bool want = force;
    for (std::size_t i = 0; i < taken.size(); ++i) {
      if (!taken[i] && std::abs(t - options.snapshot_times[i]) <= 0.5 * h) {
        taken[i] = true;
        want = true;
      }
    }
    if (want && out.times.back() != t) {
      out.times.push_back(t);
      out.densities.push_back(cur);
    }
  };
  record(sched.t_start(), false);

  SplitStepper stepper(n);
  std::vector<double>& p = cur.values;
  for (std::size_t k = 0; k < sched.n_steps(); ++k) {
    const double t = sched.time_at(k);
    const double sigma = coeffs.eval(t, faces, centers, face_v, psi);
    double vmax = 0.0;
    for (double v : face_v) vmax = std::max(vmax, std::abs(v));
    for (double v : face_v) {
      if (!std::isfinite(v)) fail(ErrorKind::numerical_failure, "fk_pde_solve: non-finite velocity");
    }
    const double adv_limit = vmax > 0.0 ? dx / vmax : std::numeric_limits<double>::infinity();
    const double diff_limit = sigma > 0.0 ? dx * dx / (sigma * sigma) : std::numeric_limits<double>::infinity();
    const double limit = std::min(adv_limit, diff_limit);
    std::size_t m = 1;
    if (h > limit) {
      if (!options.substep) {
        fail(ErrorKind::step_size, "fk_pde_solve: step " + std::to_string(h) + " exceeds CFL bound " +
                                       std::to_string(limit));
      }
      m = static_cast<std::size_t>(std::ceil(h / (options.cfl_safety * limit)));
    }
    const double hs = h / static_cast<double>(m);
    for (std::size_t r = 0; r < m; ++r) {
      const double before = sum_mass(p, dx);
      stepper.advect(p, face_v, dx, hs);
      stepper.diffuse(p, sigma, dx, hs);
      const double after = sum_mass(p, dx);
      if (!(std::abs(after - before) <= options.mass_tolerance)) {
        fail(ErrorKind::numerical_failure, "fk_pde_solve: transport mass drift " +
                                               std::to_string(after - before) + " at t=" + std::to_string(t));
      }
      double mean = 0.0;
      for (std::size_t i = 0; i < n; ++i) mean += psi[i] * p[i];
      mean = mean * dx / after;
      for (std::size_t i = 0; i < n; ++i) {
        if (p[i] > 0.0) p[i] *= std::exp(hs * (psi[i] - mean));
      }
      cur.normalize();
    }
    record(sched.time_at(k + 1), k + 1 == sched.n_steps());
  }
  return out;
}

GridGenerator::GridGenerator(double dx, std::vector<double> grad_log_pi, double sigma)
    : dx_(dx), grad_log_pi_(std::move(grad_log_pi)), sigma_(sigma) {
  if (!(dx > 0.0)) fail(ErrorKind::invalid_argument, "GridGenerator: dx must be positive");
  if (!(sigma >= 0.0)) fail(ErrorKind::invalid_argument, "GridGenerator: sigma must be >= 0");
}

GridGenerator GridGenerator::ou(const GridDensity& grid, double alpha, double sigma) {
  if (!(alpha > 0.0)) fail(ErrorKind::invalid_argument, "GridGenerator::ou: alpha must be positive");
  std::vector<double> g(grid.n_cells);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = -alpha * grid.center(i);
  return GridGenerator(grid.dx(), std::move(g), sigma);
}

std::vector<double> GridGenerator::apply(std::span<const double> f) const {
  if (f.size() != grad_log_pi_.size()) fail(ErrorKind::invalid_argument, "GridGenerator: size mismatch");
  const std::vector<double> d1 = centered_derivative(f, dx_);
  const std::vector<double> d2 = centered_laplacian(f, dx_);
  std::vector<double> out(f.size());
  const double half_var = 0.5 * sigma_ * sigma_;
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = half_var * (d2[i] + grad_log_pi_[i] * d1[i]);
  return out;
}

std::vector<double> gamma_operator(std::span<const double> f, std::span<const double> g,
                                   const GridGenerator& L) {
  if (f.size() != g.size()) fail(ErrorKind::invalid_argument, "gamma_operator: size mismatch");
  std::vector<double> fg(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) fg[i] = f[i] * g[i];
  const std::vector<double> lfg = L.apply(fg), lf = L.apply(f), lg = L.apply(g);
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = 0.5 * (lfg[i] - f[i] * lg[i] - g[i] * lf[i]);
  return out;
}

std::vector<double> gamma2_operator(std::span<const double> f, const GridGenerator& L) {
  const std::vector<double> gf = gamma_operator(f, f, L);
  const std::vector<double> lgf = L.apply(gf);
  const std::vector<double> lf = L.apply(f);
  const std::vector<double> cross = gamma_operator(f, lf, L);
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = 0.5 * (lgf[i] - 2.0 * cross[i]);
  return out;
}

Chi2Report chi2_dissipation_residual(const GridDensity& rho, const std::function<double(double)>& g,
                                     const GridDensity& pi, double sigma, double h) {
  if (!rho.same_grid(pi)) fail(ErrorKind::invalid_argument, "chi2_dissipation_residual: grids differ");
  const std::size_t n = pi.n_cells;
  const double dx = pi.dx();
  for (std::size_t i = 0; i < n; ++i) {
    if (!(rho.values[i] > 0.0)) fail(ErrorKind::invalid_argument, "chi2_dissipation_residual: rho must be positive");
    if (!(pi.values[i] > 0.0)) fail(ErrorKind::invalid_argument, "chi2_dissipation_residual: pi must be positive");
  }
  GridDensity ref = pi;
  ref.normalize();
  GridDensity p0(pi.lo, pi.hi, n);
  for (std::size_t i = 0; i < n; ++i) p0.values[i] = rho.values[i] * ref.values[i];
  p0.normalize();

  std::vector<double> log_pi(n);
  for (std::size_t i = 0; i < n; ++i) log_pi[i] = std::log(ref.values[i]);
  // (sigma^2/2) (log pi)' at the faces; the end faces reuse their neighbor.
  std::vector<double> face_drift(n + 1);
  for (std::size_t j = 1; j < n; ++j) face_drift[j] = 0.5 * sigma * sigma * (log_pi[j] - log_pi[j - 1]) / dx;
  face_drift[0] = face_drift[1];
  face_drift[n] = face_drift[n - 1];
  std::vector<double> g_cells(n);
  for (std::size_t i = 0; i < n; ++i) g_cells[i] = g(pi.center(i));

  PdeCoefficients coeffs;
  coeffs.eval = [&](double, std::span<const double>, std::span<const double>, std::span<double> fv,
                    std::span<double> cp) {
    std::copy(face_drift.begin(), face_drift.end(), fv.begin());
    std::copy(g_cells.begin(), g_cells.end(), cp.begin());
    return sigma;
  };
  auto chi2 = [&](const GridDensity& p) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += p.values[i] * p.values[i] / ref.values[i];
    return s * dx - 1.0;
  };
  const double var0 = chi2(p0);
  // Richardson combination of the differences over h and h/2 cancels the
  // O(h) bias of the one-sided difference.
  const double rate_full = (chi2(fk_pde_solve(p0, coeffs, TimeSchedule(0.0, h, 1)).densities.back()) - var0) / h;
  const double rate_half =
      (chi2(fk_pde_solve(p0, coeffs, TimeSchedule(0.0, 0.5 * h, 1)).densities.back()) - var0) / (0.5 * h);
  const double lhs = 0.5 * (2.0 * rate_half - rate_full);

  std::vector<double> r(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = p0.values[i] / ref.values[i];
  const std::vector<double> dr = centered_derivative(r, dx);
  double energy = 0.0, reaction = 0.0, mean_g = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = ref.values[i] * dx;
    if (std::isfinite(dr[i])) energy += 0.5 * sigma * sigma * dr[i] * dr[i] * w;
    reaction += r[i] * (r[i] - 1.0) * g_cells[i] * w;
    mean_g += r[i] * g_cells[i] * w;
  }
  const double rhs = -energy + reaction - mean_g * var0;
  return Chi2Report{lhs, rhs, std::abs(lhs - rhs)};
}

double OuSemigroup::apply(double x) const {
  const double d = std::exp(-alpha * t);
  if (kind == OuObservable::linear) return d * x;
  return d * d * x * x + (1.0 - d * d) / alpha;
}

double OuSemigroup::variance_ratio() const {
  if (kind == OuObservable::linear) return std::exp(-2.0 * alpha * t);
  // Var of e^{-2 a t} x^2 over Var of x^2
  return std::exp(-4.0 * alpha * t);
}

OuSemigroup ou_semigroup(OuObservable kind, double alpha, double t) {
  if (!(alpha > 0.0)) fail(ErrorKind::invalid_argument, "ou_semigroup: alpha must be positive");
  if (!(t >= 0.0)) fail(ErrorKind::invalid_argument, "ou_semigroup: t must be >= 0");
  return OuSemigroup{kind, alpha, t};
}

VarianceDecayReport mc_variance_decay(double alpha, double t, std::size_t k, std::size_t inner,
                                      double step, std::uint64_t seed, bool parallel) {
  if (k < 2 || inner < 2) fail(ErrorKind::invalid_argument, "mc_variance_decay: need k, inner >= 2");
  if (!(step > 0.0) || !(t >= 0.0)) fail(ErrorKind::invalid_argument, "mc_variance_decay: bad step or t");
  const OuSemigroup exact = ou_semigroup(OuObservable::linear, alpha, t);
  const auto n_steps = static_cast<std::size_t>(std::llround(t / step));
  const double h = n_steps > 0 ? t / static_cast<double>(n_steps) : 0.0;

  Ensemble e(k * inner, 1, 0.0);
  std::vector<double> x0(k);
  for (std::size_t i = 0; i < k; ++i) {
    RngStream rng(seed, StreamPurpose::diagnostic, 0, i);
    x0[i] = rng.normal() / std::sqrt(alpha);
    for (std::size_t j = 0; j < inner; ++j) e.position(i * inner + j)[0] = x0[i];
  }
  const kernels::Potential well = QuadraticWell{alpha};
  for (std::size_t s = 0; s < n_steps; ++s) {
    if (parallel) {
      kernels::ula_step_parallel(e, well, h, 1.0, seed, s);
    } else {
      kernels::ula_step_serial(e, well, h, 1.0, seed, s);
    }
  }

  auto sample_var = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double a : v) m += a;
    m /= static_cast<double>(v.size());
    double s = 0.0;
    for (double a : v) s += (a - m) * (a - m);
    return s / static_cast<double>(v.size() - 1);
  };
  std::vector<double> group_mean(k);
  double within = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    double m = 0.0;
    for (std::size_t j = 0; j < inner; ++j) m += e.position(i * inner + j)[0];
    m /= static_cast<double>(inner);
    double s = 0.0;
    for (std::size_t j = 0; j < inner; ++j) {
      const double d = e.position(i * inner + j)[0] - m;
      s += d * d;
    }
    within += s / static_cast<double>(inner - 1);
    group_mean[i] = m;
  }
  within /= static_cast<double>(k);
  const double var_p = sample_var(group_mean) - within / static_cast<double>(inner);
  const double estimate = var_p / sample_var(x0);
  const double ex = exact.variance_ratio();
  return VarianceDecayReport{estimate, ex, std::abs(estimate - ex) / ex};
}

}  // namespace wfr
