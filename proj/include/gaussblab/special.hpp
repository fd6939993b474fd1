#pragma once

// Scalar special functions for the standard Gaussian measure: CDF, quantile,
// Mills-type tail integral, isoperimetric profile, symmetric-strip mass, and
// chi / chi-square helpers used for measures and moments of centered balls.

namespace gaussblab::special {

inline constexpr double kSqrt2 = 1.4142135623730950488;
inline constexpr double kSqrt2Pi = 2.5066282746310005024;

// Standard normal density.
double norm_pdf(double x);

// Standard normal CDF, Phi(x) = gamma((-inf, x]).  Relative error ~1e-15
// (complementary error function path, accurate in both tails).
double norm_cdf(double x);

// Inverse CDF on (0,1).  AS241 rational initializer followed by two Newton
// corrections; |Phi(norm_inv_cdf(p)) - p| <= 1e-12 over the representable range.
double norm_inv_cdf(double p);

// Mills-type tail integral  integral_R^inf exp(-s^2/2) ds  (no 1/sqrt(2pi)).
double upper_mills(double r);

// Gaussian isoperimetric profile I(p) = norm_pdf(norm_inv_cdf(p)), p in (0,1).
// Extended by continuity with I(0) = I(1) = 0.
double iso_profile(double p);

// gamma of the symmetric strip {|s| <= r} in one dimension, 2 Phi(r) - 1.
double strip_mass(double r);

// CDF of the chi-square distribution with `dof` degrees of freedom.
double chi_square_cdf(int dof, double x);

// gamma_n(r B) for the centered Euclidean ball of radius r in dimension n.
double ball_measure(int dim, double radius);

// Density of |Z| at r for an n-dimensional standard Gaussian Z; equals the
// Gaussian perimeter of the centered ball of radius r.
double chi_pdf(int dim, double r);

// Radius r with ball_measure(dim, r) = p, by bisection to 1e-10.
double ball_radius_for_mass(int dim, double p);

// Restricted second and fourth moments of a standard Gaussian coordinate on
// [-a, a]:  E[x^2 | |x|<=a]  and  E[x^4 | |x|<=a].  Zero at a = 0.
double truncated_m2(double a);
double truncated_m4(double a);

}  // namespace gaussblab::special
