#pragma once

// Log-concavity deficits of t -> gamma(e^t K) and their local counterparts:
// the multiplicative midpoint deficit (weak and coordinatewise-strong form),
// the second derivative of log gamma(e^{td} K) from restricted moments, the
// exact midpoint-gap identity, and restricted Poincare-type gaps.

#include "gaussblab/body.hpp"
#include "gaussblab/function_spec.hpp"
#include "gaussblab/measure.hpp"

namespace gaussblab {

struct DeficitReport {
  Vec x, y;  // endpoint log-scalings
  MeasureEstimate gamma_lo, gamma_hi, gamma_mid;
  double epsilon = 0.0;
  double epsilon_error = 0.0;
  std::string engine;  // closed_form | monte_carlo
};

// epsilon = gamma(sqrt(ab)K) / sqrt(gamma(aK) gamma(bK)) - 1 for 0 < a < b.
DeficitReport deficit(const BodyPtr& body, double a, double b,
                      MeasureEngine engine = MeasureEngine::Auto, const McConfig& mc = {});

// epsilon = gamma(e^{(x+y)/2}K) / sqrt(gamma(e^x K) gamma(e^y K)) - 1.
// All three measures share one sample stream; the error is the delta-method
// propagation of the joint indicator covariance.
DeficitReport strong_deficit(const BodyPtr& body, const Vec& x, const Vec& y,
                             MeasureEngine engine = MeasureEngine::Auto, const McConfig& mc = {});

struct HessianEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::string method;  // closed_form | monte_carlo
  std::int64_t accepted = 0;
};

// V''(t) for V(t) = log gamma(e^{td} K), evaluated from moments of e^{td} K:
//   Var(sum_i d_i x_i^2) - 2 sum_i d_i^2 E[x_i^2].
HessianEstimate log_measure_hessian(const BodyPtr& body, const Vec& direction, double t,
                                    const McConfig& mc = {});

struct MidpointGap {
  double lhs = 0.0;       // V((x+y)/2) + beta
  double rhs = 0.0;       // (V(x) + V(y)) / 2
  double beta = 0.0;
  double residual = 0.0;  // |lhs - rhs|
  double error_budget = 0.0;
  double quad_error = 0.0;
  int quad_nodes = 0;
  std::string engine;
};

// Exact representation of the midpoint concavity defect of V(z) = log gamma(e^z K):
// beta = (1/8) integral_{-1}^{1} (1-|t|) <Hess V(z(t)) (x-y), x-y> dt with
// z(t) = ((1-t)x + (1+t)y)/2, evaluated by composite midpoint quadrature.
MidpointGap midpoint_gap_identity(const BodyPtr& body, const Vec& x, const Vec& y, int quad_nodes,
                                  const McConfig& mc = {});

enum class PoincareMode { General, EvenHalf };

struct PoincareGap {
  double variance = 0.0, variance_err = 0.0;
  double dirichlet = 0.0, dirichlet_err = 0.0;
  double gap = 0.0, gap_err = 0.0;  // dirichlet - variance
  std::int64_t accepted = 0;
};

// Restricted Poincare gap: Var_K(f) against E_K|grad f|^2 (halved in the even
// mode, which requires an even f).
PoincareGap poincare_gap(const BodyPtr& body, const FunctionSpec& f, PoincareMode mode,
                         const McConfig& mc = {});

}  // namespace gaussblab
