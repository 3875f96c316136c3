#include "wfr/correctors.hpp"

#include <cmath>
#include <string>

#include "wfr/error.hpp"

namespace wfr {

namespace {

void check_same_dim(std::span<const double> a, std::span<const double> b, const char* where) {
  if (a.size() != b.size()) {
    fail(ErrorKind::invalid_argument, std::string(where) + ": dimension mismatch");
  }
}

double squared_gap(std::span<const double> s1, std::span<const double> s2) {
  double d2 = 0.0;
  for (std::size_t i = 0; i < s1.size(); ++i) {
    const double d = s1[i] - s2[i];
    d2 += d * d;
  }
  return d2;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Weight on q2 given the log of the q2:q1 ratio entering the blend, i.e.
// beta r / ((1 - beta) + beta r) with r = exp(log_ratio).
void blend_weights(double log_ratio, double beta, double& w1, double& w2) {
  if (beta <= 0.0) {
    w1 = 1.0;
    w2 = 0.0;
  } else if (beta >= 1.0) {
    w1 = 0.0;
    w2 = 1.0;
  } else {
    const double z = log_ratio + std::log(beta) - std::log1p(-beta);
    w2 = logistic(z);
    w1 = logistic(-z);
  }
}

void combine(std::span<const double> s1, std::span<const double> s2, double w1, double w2,
             std::span<double> out) {
  for (std::size_t i = 0; i < s1.size(); ++i) out[i] = w1 * s1[i] + w2 * s2[i];
}

GuidedEvaluation to_evaluation(const InterpolationSpec& interp, std::span<const double> s1,
                               std::span<const double> s2, double ell, double sigma_t) {
  GuidedEvaluation ev{std::vector<double>(s1.size()), 0.0, 0.0, 0.0};
  const GuidedTerms t = guided_eval_into(interp, s1, s2, ell, sigma_t, ev.guided_score);
  ev.psi = t.psi;
  ev.alpha1 = t.alpha1;
  ev.alpha2 = t.alpha2;
  return ev;
}

}  // namespace

double logistic(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void InterpolationSpec::validate() const {
  if (!std::isfinite(beta)) fail(ErrorKind::invalid_argument, "interpolation: beta must be finite");
  if (kind != InterpolationKind::geometric && (beta < 0.0 || beta > 1.0)) {
    fail(ErrorKind::invalid_argument, "interpolation: beta must lie in [0,1] for mixture and fisher_rao");
  }
}

GuidedTerms guided_eval_into(const InterpolationSpec& interp, std::span<const double> s1,
                             std::span<const double> s2, double ell, double sigma_t,
                             std::span<double> guided_out) {
  check_same_dim(s1, s2, "guided_eval");
  const double beta = interp.beta;
  switch (interp.kind) {
    case InterpolationKind::geometric: {
      const double w1 = 1.0 - beta;
      combine(s1, s2, w1, beta, guided_out);
      const double psi = 0.5 * sigma_t * sigma_t * beta * (beta - 1.0) * squared_gap(s1, s2);
      return {psi, w1, beta};
    }
    case InterpolationKind::fisher_rao: {
      double a1, a2;
      blend_weights(0.5 * ell, beta, a1, a2);
      combine(s1, s2, a1, a2, guided_out);
      const double psi = -0.25 * sigma_t * sigma_t * a1 * a2 * squared_gap(s1, s2);
      return {psi, a1, a2};
    }
    case InterpolationKind::mixture: {
      double w1, w2;
      blend_weights(ell, beta, w1, w2);
      combine(s1, s2, w1, w2, guided_out);
      return {0.0, w1, w2};
    }
  }
  fail(ErrorKind::invalid_argument, "guided_eval: unknown interpolation kind");
}

GuidedEvaluation geometric_eval(std::span<const double> s1, std::span<const double> s2, double beta,
                                double sigma_t) {
  if (sigma_t < 0.0) fail(ErrorKind::invalid_argument, "geometric_eval: sigma_t must be >= 0");
  return to_evaluation({InterpolationKind::geometric, beta}, s1, s2, 0.0, sigma_t);
}

GuidedEvaluation fisher_rao_eval(std::span<const double> s1, std::span<const double> s2, double ell,
                                 double beta, double sigma_t) {
  const InterpolationSpec spec{InterpolationKind::fisher_rao, beta};
  spec.validate();
  if (!std::isfinite(ell)) fail(ErrorKind::invalid_argument, "fisher_rao_eval: ell must be finite");
  return to_evaluation(spec, s1, s2, ell, sigma_t);
}

GuidedEvaluation mixture_eval(std::span<const double> s1, std::span<const double> s2, double ell,
                              double beta) {
  const InterpolationSpec spec{InterpolationKind::mixture, beta};
  spec.validate();
  if (!std::isfinite(ell)) fail(ErrorKind::invalid_argument, "mixture_eval: ell must be finite");
  return to_evaluation(spec, s1, s2, ell, 0.0);
}

double logratio_time_derivative(std::span<const double> s1, std::span<const double> s2, double div_s1,
                                double div_s2, std::span<const double> f_t_x, double sigma_t) {
  check_same_dim(s1, s2, "logratio_time_derivative");
  check_same_dim(s1, f_t_x, "logratio_time_derivative");
  const double half_var = 0.5 * sigma_t * sigma_t;
  const double lap_ell = div_s2 - div_s1;
  double f_dot_grad = 0.0;
  for (std::size_t i = 0; i < s1.size(); ++i) f_dot_grad += f_t_x[i] * (s2[i] - s1[i]);
  return f_dot_grad - half_var * lap_ell - half_var * (dot(s2, s2) - dot(s1, s1));
}

double logratio_drift(std::span<const double> s1, std::span<const double> s2, double div_s1,
                      double div_s2, std::span<const double> f_t_x, std::span<const double> v_guided,
                      double sigma_t) {
  check_same_dim(s1, v_guided, "logratio_drift");
  const double dt_ell = logratio_time_derivative(s1, s2, div_s1, div_s2, f_t_x, sigma_t);
  double v_dot_grad = 0.0;
  for (std::size_t i = 0; i < s1.size(); ++i) v_dot_grad += v_guided[i] * (s2[i] - s1[i]);
  return dt_ell + v_dot_grad + 0.5 * sigma_t * sigma_t * (div_s2 - div_s1);
}

double drift_to_fr_rate(std::span<const double> v, double div_v, std::span<const double> score) {
  check_same_dim(v, score, "drift_to_fr_rate");
  return -div_v - dot(v, score);
}

double diffusion_to_fr_rate(std::span<const double> score, double score_div, double sigma_t) {
  if (sigma_t < 0.0) fail(ErrorKind::invalid_argument, "diffusion_to_fr_rate: sigma_t must be >= 0");
  return 0.5 * sigma_t * sigma_t * (score_div + dot(score, score));
}

std::vector<double> diffusion_to_drift(std::span<const double> score, double sigma_t) {
  if (sigma_t < 0.0) fail(ErrorKind::invalid_argument, "diffusion_to_drift: sigma_t must be >= 0");
  std::vector<double> v(score.size());
  const double c = -0.5 * sigma_t * sigma_t;
  for (std::size_t i = 0; i < score.size(); ++i) v[i] = c * score[i];
  return v;
}

}  // namespace wfr
