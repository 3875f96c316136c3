#pragma once

#include <span>
#include <vector>

namespace wfr {

enum class InterpolationKind { geometric, mixture, fisher_rao };

// Target family between q1 (beta = 0) and q2 (beta = 1):
//   geometric   q1^(1-beta) q2^beta                (beta may be any real)
//   mixture     (1-beta) q1 + beta q2              (beta in [0,1])
//   fisher_rao  ((1-beta) sqrt q1 + beta sqrt q2)^2 (beta in [0,1])
struct InterpolationSpec {
  InterpolationKind kind = InterpolationKind::geometric;
  double beta = 0.5;

  void validate() const;
  // Mixture and Fisher-Rao weights depend on the tracked log-ratio.
  bool tracks_ratio() const { return kind != InterpolationKind::geometric; }
};

struct GuidedEvaluation {
  std::vector<double> guided_score;
  double psi;     // uncentered corrector potential
  double alpha1;  // state-dependent model weights
  double alpha2;
};

// Scalar parts of a guided evaluation; the guided score goes to a caller buffer.
struct GuidedTerms {
  double psi;
  double alpha1;
  double alpha2;
};

GuidedEvaluation geometric_eval(std::span<const double> s1, std::span<const double> s2, double beta,
                                double sigma_t);
GuidedEvaluation fisher_rao_eval(std::span<const double> s1, std::span<const double> s2, double ell,
                                 double beta, double sigma_t);
GuidedEvaluation mixture_eval(std::span<const double> s1, std::span<const double> s2, double ell,
                              double beta);

// Dispatch on interp.kind, writing the guided score into `guided_out`.
// Allocation-free; the per-kind functions above are built on it.
GuidedTerms guided_eval_into(const InterpolationSpec& interp, std::span<const double> s1,
                             std::span<const double> s2, double ell, double sigma_t,
                             std::span<double> guided_out);

// Deterministic drift of d ell_t(X_t) per unit of sampling time, for X
// following dX = v_guided dt + sigma dW. The martingale part
// sigma <s2 - s1, dW> is added by the integrator with the state's own noise.
double logratio_drift(std::span<const double> s1, std::span<const double> s2, double div_s1,
                      double div_s2, std::span<const double> f_t_x, std::span<const double> v_guided,
                      double sigma_t);

// d/dt log(q2/q1) per unit of sampling time (the log-ratio PDE right-hand side).
double logratio_time_derivative(std::span<const double> s1, std::span<const double> s2, double div_s1,
                                double div_s2, std::span<const double> f_t_x, double sigma_t);

// psi = -div v - <v, score>: continuity-equation transport as a reaction rate.
double drift_to_fr_rate(std::span<const double> v, double div_v, std::span<const double> score);
// psi = (sigma^2/2)(div score + |score|^2): heat flow as a reaction rate.
double diffusion_to_fr_rate(std::span<const double> score, double score_div, double sigma_t);
// v = -(sigma^2/2) score: heat flow as transport.
std::vector<double> diffusion_to_drift(std::span<const double> score, double sigma_t);

// Numerically stable logistic 1/(1+exp(-z)).
double logistic(double z);

}  // namespace wfr
