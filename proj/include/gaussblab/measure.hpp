#pragma once

// Gaussian measure, restricted-moment, perimeter and boundary-normal
// estimators over symmetric convex bodies.  Everything stochastic is driven by
// an index-addressable sample stream, so results are pure functions of
// (seed, samples, partition_count) and common-random-number comparisons are
// exact by construction.

#include "gaussblab/body.hpp"

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gaussblab {

struct McConfig {
  std::uint64_t seed = 1;
  std::int64_t samples = 1'000'000;
  int partition_count = 1;
};

struct MeasureEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::string method = "closed_form";  // closed_form | quadrature_1d | monte_carlo
  std::int64_t samples = 0;
  std::uint64_t seed = 0;
  int partition_count = 1;
};

struct ValueWithError {
  double value = 0.0;
  double std_error = 0.0;
};

class UnresolvableMassError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class MeasureEngine { Auto, ClosedForm, MonteCarlo };

// Closed-form gamma(K) where the algebra admits one (balls, strips, boxes,
// products of those, spherical ellipsoids, and folded images thereof).
std::optional<double> closed_form_measure(const BodyPtr& body);

MeasureEstimate measure(const BodyPtr& body, MeasureEngine engine = MeasureEngine::Auto,
                        const McConfig& mc = {});

// Common-random-number joint estimation of several bodies in one pass.
// `covariance` holds the per-sample indicator covariance for delta-method
// error propagation of ratios and differences.
struct JointMeasure {
  std::vector<double> values;
  Mat covariance;
  std::int64_t samples = 0;
  std::uint64_t seed = 0;
};
JointMeasure measure_joint(const std::vector<BodyPtr>& bodies, const McConfig& mc);

// As above for arbitrary indicator predicates over the Gaussian sample.
JointMeasure indicator_joint(int dim, const std::vector<std::function<bool(const Vec&)>>& preds,
                             const McConfig& mc);

struct MomentSummary {
  MeasureEstimate mass;
  Mat second_moment;       // E[x_i x_j | K]
  Mat second_moment_err;
  double mean_sq = 0.0;    // E[|x|^2 | K]
  double mean_sq_err = 0.0;
  double mean_quart = 0.0; // E[|x|^4 | K]
  double mean_quart_err = 0.0;
  Vec coord_fourth;        // E[x_i^4 | K]
  Vec coord_fourth_err;
  std::int64_t accepted = 0;
  bool closed_form = false;
};

// Restricted Gaussian moments; exact coordinatewise path for separable bodies,
// self-normalized rejection sampling otherwise.  Throws UnresolvableMassError
// when no sample lands in the body.
MomentSummary moments(const BodyPtr& body, const McConfig& mc);

// integral_{rB} |x|^2 dgamma = n P(chi^2_{n+2} <= r^2).
double ball_truncated_second_moment(int dim, double radius);

enum class PerimeterEngine { Auto, Facet, ParallelDiff, ClosedForm };

MeasureEstimate perimeter(const BodyPtr& body, PerimeterEngine engine = PerimeterEngine::Auto,
                          const McConfig& mc = {}, double step = 1e-2);

// gamma_boundary mass of each symmetric facet pair of a polytopal body.
struct FacetMass {
  FacetPair facet;
  double pair_mass = 0.0;
  double pair_mass_err = 0.0;
};
std::vector<FacetMass> facet_masses(const BodyPtr& body, const McConfig& mc);

// integral over all facets of g dgamma_boundary (both members of each pair).
ValueWithError boundary_integral(const BodyPtr& body,
                                 const std::function<double(const Vec&)>& g, const McConfig& mc);

struct BoundaryStats {
  MeasureEstimate perimeter;
  std::vector<ValueWithError> dir_second_moment;  // one per requested direction
  ValueWithError omega_mass;
};

// Boundary-normal statistics of a polytopal body: direction-weighted second
// moments and the mass of {x in bd K : sum_{i in sigma} (n_x^i)^2 >= alpha}.
BoundaryStats boundary_stats(const BodyPtr& body, const std::vector<Vec>& directions,
                             const std::vector<int>& sigma, double alpha, const McConfig& mc);

}  // namespace gaussblab
