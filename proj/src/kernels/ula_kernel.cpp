#include <cmath>

#include "wfr/error.hpp"
#include "wfr/kernels.hpp"

namespace wfr::kernels {

double potential_gradient(const Potential& v, double x) {
  return std::visit([x](const auto& pot) { return pot.gradient(x); }, v);
}

namespace {

void check_ula(double step, double temperature) {
  if (!(step > 0.0)) fail(ErrorKind::invalid_argument, "ula step: step must be positive");
  if (!(temperature >= 0.0)) fail(ErrorKind::invalid_argument, "ula step: temperature must be >= 0");
}

inline void ula_particle(Ensemble& e, std::size_t k, const Potential& v, double step,
                         double noise_scale, std::uint64_t seed, std::uint64_t step_index) {
  RngStream rng(seed, StreamPurpose::ula_step, step_index, k);
  bool finite = true;
  for (double& x : e.position(k)) {
    const double xi = rng.normal();
    x = x - potential_gradient(v, x) * step + noise_scale * xi;
    finite = finite && std::isfinite(x);
  }
  if (!finite) e.kill(k);
}

}  // namespace

void ula_step_serial(Ensemble& e, const Potential& v, double step, double temperature,
                     std::uint64_t seed, std::uint64_t step_index) {
  check_ula(step, temperature);
  const double noise_scale = std::sqrt(2.0 * temperature * step);
  for (std::size_t k = 0; k < e.size(); ++k) {
    if (e.alive(k)) ula_particle(e, k, v, step, noise_scale, seed, step_index);
  }
  e.set_time(e.time() + step);
}

void ula_step_parallel(Ensemble& e, const Potential& v, double step, double temperature,
                       std::uint64_t seed, std::uint64_t step_index) {
  check_ula(step, temperature);
  const double noise_scale = std::sqrt(2.0 * temperature * step);
  const auto n = static_cast<std::ptrdiff_t>(e.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    if (e.alive(static_cast<std::size_t>(k))) {
      ula_particle(e, static_cast<std::size_t>(k), v, step, noise_scale, seed, step_index);
    }
  }
  e.set_time(e.time() + step);
}

}  // namespace wfr::kernels
