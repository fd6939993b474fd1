#pragma once

// Quantitative-stability machinery: in-radius threshold evaluators for the
// weak and strong deficit dichotomies, the technical dichotomy quantity, audits
// of the isoperimetric / ball-integral / Mills-sandwich bounds, the strip
// sharpness sweep, the Gaussian trace inequality check, Poincare stability
// witnesses, quadratic-form boundary checks, and calibration of the absolute
// constants from a corpus.

#include "gaussblab/bineq.hpp"
#include "gaussblab/body.hpp"
#include "gaussblab/function_spec.hpp"
#include "gaussblab/measure.hpp"

#include <map>
#include <optional>

namespace gaussblab {

struct ConstantsRecord {
  double c_weak = 1.0;   // inside the log of the weak upper branch
  double C_weak = 1.0;   // weak/strong lower-branch prefactor
  double c_prop = 1.0;   // smallness threshold delta_0 of the dichotomy premise
  double C_prop = 1.0;   // dichotomy lower-branch prefactor
  double c_ball = 1.0;   // ball-integral lower bounds
  double c_iso = 1.0;    // small-measure isoperimetric lower bound
  double C_q = 1.0;      // quadratic boundary bound prefactor
  std::string provenance = "default";
  std::map<std::string, std::string> binding;  // constant -> binding case
};

struct ThresholdPair {
  std::optional<double> r_hi;  // absent when the log argument is nonpositive
  double r_lo = 0.0;
  bool log_flagged = false;
};

// Weak form: r_hi = (1/b) sqrt(log(c log(b/a)^2 / (n^2 eps))),
//            r_lo = (C sqrt(n)/a) eps^{1/(n+1)} log(b/a)^{-2/(n+1)}.
ThresholdPair weak_thresholds(int n, double a, double b, double eps, const ConstantsRecord& cr);

// Strong form: r_hi = |e^y|^{-1} sqrt(log(delta^2 alpha beta / (eps n^2))),
//              r_lo = C |e^x|^{-1} sqrt(n) eps^{1/(n+1)} (delta^2 alpha beta)^{-1/(n+1)}.
// x and y are reordered internally so that |e^x| <= |e^y|.
ThresholdPair strong_thresholds(int n, Vec x, Vec y, double delta, double alpha, double beta,
                                double eps, const ConstantsRecord& cr);

enum class Branch { UpperBranch, LowerBranch, Violated, Inconclusive };
const char* branch_name(Branch b);

struct StabilityVerdict {
  double r = 0.0;
  double r_error = 0.0;
  ThresholdPair thresholds;
  Branch branch = Branch::Inconclusive;
};

// Places a measured in-radius against the thresholds; error bars that straddle
// a boundary yield Inconclusive rather than a false branch claim.
StabilityVerdict classify_radius(double r, double r_error, const ThresholdPair& thresholds);

struct DichotomyReport {
  double q = 0.0, q_error = 0.0;
  double r = 0.0;
  double upper_threshold = 0.0;  // sqrt(log Q), when Q > 1
  double lower_threshold = 0.0;  // C_prop sqrt(n) Q^{-1/(n+1)}
  Branch branch = Branch::Inconclusive;
  MeasureEstimate mass, perim;
  double ball_moment = 0.0;
};

// Q = gamma(K)/int_{rB}|x|^2 dgamma + gamma(K)/(r gamma^+(bd K)) and the
// branch it forces on r.
DichotomyReport dichotomy_quantity(const BodyPtr& body, const McConfig& mc,
                                   const ConstantsRecord& cr);

struct AuditRow {
  std::string kind;
  std::string detail;
  double lhs = 0.0, rhs = 0.0, slack = 0.0;
  double lhs_error = 0.0;
  bool skipped = false;
  std::string skip_reason;
  double implied_constant = 0.0;  // extremal constant making the bound tight
};

AuditRow audit_iso_big(const BodyPtr& body, const McConfig& mc);
AuditRow audit_iso_small(const BodyPtr& body, const McConfig& mc, const ConstantsRecord& cr);
std::vector<AuditRow> audit_ball_mass(int n, const ConstantsRecord& cr);
AuditRow audit_ball_moment(int n, double r, const ConstantsRecord& cr);
std::vector<AuditRow> audit_komatsu(double r);
AuditRow audit_strip_perimeter(const BodyPtr& body, const McConfig& mc);

// Radius of the ball whose Gaussian mass equals the mass of the unit-width
// symmetric strip (threshold radius of the strip-perimeter bound).
double strip_perimeter_min_radius(int dim);

struct SharpnessRow {
  double r = 0.0;
  double eps = 0.0;
  double implied_c = 0.0;  // R / sqrt(log(1 + 1/eps))
};
std::vector<SharpnessRow> strip_sharpness(double a, double b, const std::vector<double>& r_grid);

struct TraceReport {
  double lhs = 0.0, lhs_error = 0.0;  // boundary integral of g^2
  double rhs = 0.0, rhs_error = 0.0;  // (1/r) int_K (n g^2 + |grad g|^2)
  double slack = 0.0;                 // rhs - lhs
  double r = 0.0;
};
TraceReport trace_check(const BodyPtr& body, const FunctionSpec& g, const McConfig& mc);

struct PoincareWitness {
  Vec theta;                 // variational minimizer E_K[grad f]
  double epsilon = 0.0, epsilon_error = 0.0;
  double w12_residual = 0.0, w12_residual_error = 0.0;  // E_K|grad f - theta|^2
  double boundary_moment = 0.0, boundary_moment_error = 0.0;
  double bound_w12 = 0.0;       // 4 eps
  double bound_boundary = 0.0;  // 2(n+1) gamma(K) eps / r
  bool w12_ok = false;
  bool boundary_ok = false;     // reported, not asserted
  bool contradiction = false;   // eps < -3 error
};
PoincareWitness poincare_stability_witness(const BodyPtr& body, const FunctionSpec& f,
                                           const McConfig& mc);

struct QuadRow {
  int index = 0;
  double boundary_moment = 0.0, boundary_moment_error = 0.0;  // B_i
  double rhs = 0.0;
  double implied_constant = 0.0;
};
struct QuadReport {
  double epsilon = 0.0, epsilon_error = 0.0;  // 2 E|Tx|^2 - Var<Tx,x>, >= 0 up to noise
  bool flagged_negative = false;
  double envelope = 0.0;  // (gamma^+/int_{rB}|x|^2 + 1/r) n^2 gamma(K)
  std::vector<QuadRow> rows;
};
QuadReport quad_boundary_check(const BodyPtr& body, const Mat& t_matrix, const McConfig& mc,
                               const ConstantsRecord& cr);

struct CalibrationConfig {
  std::uint64_t seed = 1;
  std::int64_t samples = 200'000;
  int deficit_bodies = 40;
  std::string corpus_id = "corpus-v1";
};

// Extremal constants making every constant-bearing audit hold with nonnegative
// slack across the standard corpus; per-constant binding cases are recorded.
ConstantsRecord calibrate_constants(const CalibrationConfig& config);

}  // namespace gaussblab
