#include "wfr/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wfr/error.hpp"

namespace wfr {

std::vector<double> weighted_histogram(std::span<const double> x, std::span<const double> w, double lo, double hi,
                                       std::size_t n_bins) {
  if (x.size() != w.size()) fail(ErrorKind::invalid_argument, "weighted_histogram: size mismatch");
  if (!(hi > lo) || n_bins == 0) fail(ErrorKind::invalid_argument, "weighted_histogram: bad range");
  std::vector<double> h(n_bins + 2, 0.0);
  const double width = (hi - lo) / static_cast<double>(n_bins);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (w[i] == 0.0) continue;
    std::size_t b;
    if (x[i] < lo) {
      b = 0;
    } else if (x[i] >= hi) {
      b = n_bins + 1;
    } else {
      b = 1 + std::min(n_bins - 1, static_cast<std::size_t>((x[i] - lo) / width));
    }
    h[b] += w[i];
  }
  return h;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  if (n > 1) v.back() = hi;
  return v;
}

double total_variation(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) fail(ErrorKind::invalid_argument, "total_variation: size mismatch");
  const double sp = std::accumulate(p.begin(), p.end(), 0.0);
  const double sq = std::accumulate(q.begin(), q.end(), 0.0);
  if (!(sp > 0.0) || !(sq > 0.0)) fail(ErrorKind::invalid_argument, "total_variation: empty distribution");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] / sp - q[i] / sq);
  return 0.5 * s;
}

double wasserstein1(std::span<const double> x, std::span<const double> wx, std::span<const double> y,
                    std::span<const double> wy) {
  if (x.size() != wx.size() || y.size() != wy.size()) fail(ErrorKind::invalid_argument, "wasserstein1: size mismatch");
  struct Atom {
    double pos;
    double dw;  // +mass for x, -mass for y
  };
  const double sx = std::accumulate(wx.begin(), wx.end(), 0.0);
  const double sy = std::accumulate(wy.begin(), wy.end(), 0.0);
  if (!(sx > 0.0) || !(sy > 0.0)) fail(ErrorKind::invalid_argument, "wasserstein1: empty sample");
  std::vector<Atom> atoms;
  atoms.reserve(x.size() + y.size());
  for (std::size_t i = 0; i < x.size(); ++i) atoms.push_back({x[i], wx[i] / sx});
  for (std::size_t i = 0; i < y.size(); ++i) atoms.push_back({y[i], -wy[i] / sy});
  std::stable_sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.pos < b.pos; });
  // integral of |F_x - F_y|
  double diff = 0.0, total = 0.0;
  for (std::size_t i = 0; i + 1 < atoms.size(); ++i) {
    diff += atoms[i].dw;
    total += std::abs(diff) * (atoms[i + 1].pos - atoms[i].pos);
  }
  return total;
}

Moments weighted_moments(std::span<const double> x, std::span<const double> w) {
  if (x.size() != w.size() || x.empty()) fail(ErrorKind::invalid_argument, "weighted_moments: bad input");
  double sw = 0.0, m = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += w[i];
    m += w[i] * x[i];
  }
  if (!(sw > 0.0)) fail(ErrorKind::invalid_argument, "weighted_moments: zero total weight");
  m /= sw;
  double v = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) v += w[i] * (x[i] - m) * (x[i] - m);
  return {m, v / sw};
}

WeightedSample weighted_coordinate(const Ensemble& e, std::size_t c) {
  if (c >= e.dim()) fail(ErrorKind::invalid_argument, "weighted_coordinate: coordinate out of range");
  WeightedSample s;
  s.w = normalized_weights(e);
  s.x.resize(e.size());
  for (std::size_t k = 0; k < e.size(); ++k) s.x[k] = e.alive(k) ? e.position(k)[c] : 0.0;
  return s;
}

}  // namespace wfr
