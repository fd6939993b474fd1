#pragma once

// Maximal-Gaussian-measure position: fixed-point ascent over volume-preserving
// maps T = e^D with D symmetric traceless (the rotational part of T is
// irrelevant by the rotation invariance of gamma).  The ascent direction is
// the traceless gradient of t -> log gamma(e^{tD}TK) at 0, namely
// (tr M / n) I - M for the restricted second-moment matrix M.

#include "gaussblab/body.hpp"
#include "gaussblab/measure.hpp"

#include <stdexcept>
#include <vector>

namespace gaussblab {

class MgmStallError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MgmState {
  Mat d;  // symmetric traceless generator
  Mat t;  // e^d, det renormalized to 1
  Mat m;  // second-moment matrix of gamma restricted to t K
  double residual = 0.0;
  MeasureEstimate objective;
  int iteration = 0;
  double step = 0.0;  // last accepted step
};

struct MgmOptions {
  double tol = 1e-3;
  int max_iter = 200;
  double step0 = 0.5;
  double step_floor = 1e-6;
  McConfig mc;
};

// ||M - (tr M / n) I||_F / (tr M / n); throws on nonpositive trace.
double isotropy_residual(const Mat& m);

// (tr M / n) I - M.
Mat ascent_direction(const Mat& m);

Mat project_traceless_symmetric(const Mat& d);

// Matrix exponential with the determinant renormalized to 1.
Mat volume_preserving_exp(const Mat& d);

MgmState mgm_init(const BodyPtr& body, const Mat& d0, const McConfig& mc);

// One ascent step with backtracking halving from `step`; a step is accepted
// when the (common-random-number) objective does not drop by more than three
// standard errors.  Throws MgmStallError at the step floor.
MgmState mgm_step(const BodyPtr& body, const MgmState& state, double step, const McConfig& mc);

struct MgmTrajectoryPoint {
  int iteration = 0;
  double objective = 0.0;
  double objective_error = 0.0;
  double residual = 0.0;
  double step = 0.0;
};

struct MgmResult {
  MgmState state;
  std::vector<MgmTrajectoryPoint> trajectory;
  bool converged = false;
};

MgmResult mgm_solve(const BodyPtr& body, const MgmOptions& opts, const Mat& d0);
MgmResult mgm_solve(const BodyPtr& body, const MgmOptions& opts);  // d0 = 0

struct ConcavityNode {
  double t = 0.0;
  double log_measure = 0.0;
};
struct ConcavityProbe {
  std::vector<ConcavityNode> nodes;
  double min_slack = 0.0;     // min over interior nodes of the chord-concavity slack
  double error_budget = 0.0;  // 3 sigma at the minimizing node
  std::string engine;
};

// Midpoint (chord) concavity of t -> log gamma(e^{tD} K) on a grid, evaluated
// from one shared sample stream.
ConcavityProbe log_concavity_probe(const BodyPtr& body, const Mat& d,
                                   const std::vector<double>& grid, const McConfig& mc);

struct GradientCheck {
  double analytic = 0.0;   // -tr(direction * M)
  double finite_diff = 0.0;
  double combined_error = 0.0;
};

// Directional derivative of t -> log gamma(e^{t dir} T K) at 0 against a
// Richardson central difference with shared streams.
GradientCheck mgm_gradient_check(const BodyPtr& body, const Mat& t_map, const Mat& direction,
                                 double fd_step, const McConfig& mc);

struct UniquenessReport {
  std::vector<MgmResult> runs;
  double max_objective_gap = 0.0;
  double max_objective_gap_budget = 0.0;  // 3 sigma for the widest pair
  bool objectives_consistent = false;
  double max_spectral_gap = 0.0;    // between sorted spectra of the final M's
  double max_procrustes_gap = 0.0;  // min_Q ||T_i T_j^{-1} - Q||_F over pairs
};

// Multi-start uniqueness experiment; final objectives are compared on one
// fresh common stream.
UniquenessReport uniqueness_experiment(const BodyPtr& body, int starts, const MgmOptions& opts);

}  // namespace gaussblab
