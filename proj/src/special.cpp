#include "gaussblab/special.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <stdexcept>

namespace gaussblab::special {

double norm_pdf(double x) { return std::exp(-0.5 * x * x) / kSqrt2Pi; }

double norm_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

namespace {

// ALGORITHM AS241 (Wichura 1988), the PPND16 variant: normal deviate for a
// lower tail area, accurate to roughly 1 part in 1e16 before the Newton polish.
double as241(double p) {
  constexpr double split1 = 0.425, split2 = 5.0;
  constexpr double const1 = 0.180625, const2 = 1.6;

  const double q = p - 0.5;
  if (std::fabs(q) <= split1) {
    const double r = const1 - q * q;
    return q *
           (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                 6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
               1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
             1.3314166789178437745e+2) * r + 3.3871328727963666080e0) /
           (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                 3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
               5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
             4.2313330701600911252e+1) * r + 1.0);
  }
  double r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double z;
  if (r <= split2) {
    r -= const2;
    z = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
            3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
          4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
            6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
          2.05319162663775882187e0) * r + 1.0);
  } else {
    r -= split2;
    z = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
            2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
          5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
              1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
            1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
          5.99832206555887937690e-1) * r + 1.0);
  }
  return (q < 0.0) ? -z : z;
}

}  // namespace

double norm_inv_cdf(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("norm_inv_cdf: argument must lie in (0,1)");
  }
  double z = as241(p);
  for (int k = 0; k < 2; ++k) {
    const double d = norm_pdf(z);
    if (d < 1e-300) break;  // deep tail; the initializer is already exact there
    z -= (norm_cdf(z) - p) / d;
  }
  return z;
}

double upper_mills(double r) { return std::sqrt(M_PI / 2.0) * std::erfc(r / kSqrt2); }

double iso_profile(double p) {
  if (p < 0.0 || p > 1.0) {
    throw std::domain_error("iso_profile: argument must lie in [0,1]");
  }
  if (p == 0.0 || p == 1.0) return 0.0;
  return norm_pdf(norm_inv_cdf(p));
}

double strip_mass(double r) {
  if (r < 0.0) throw std::domain_error("strip_mass: half-width must be >= 0");
  return std::erf(r / kSqrt2);
}

double chi_square_cdf(int dof, double x) {
  if (dof < 1) throw std::domain_error("chi_square_cdf: dof must be >= 1");
  if (x <= 0.0) return 0.0;
  return boost::math::gamma_p(0.5 * dof, 0.5 * x);
}

double ball_measure(int dim, double radius) {
  if (radius < 0.0) throw std::domain_error("ball_measure: radius must be >= 0");
  return chi_square_cdf(dim, radius * radius);
}

double chi_pdf(int dim, double r) {
  if (r < 0.0) return 0.0;
  if (r == 0.0) return dim == 1 ? 2.0 / kSqrt2Pi : 0.0;
  const double log_pdf = (dim - 1) * std::log(r) - 0.5 * r * r -
                         (0.5 * dim - 1.0) * std::log(2.0) - std::lgamma(0.5 * dim);
  return std::exp(log_pdf);
}

double ball_radius_for_mass(int dim, double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("ball_radius_for_mass: mass must lie in (0,1)");
  }
  double lo = 0.0, hi = 1.0;
  while (ball_measure(dim, hi) < p) hi *= 2.0;
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    (ball_measure(dim, mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double truncated_m2(double a) {
  if (a < 0.0) throw std::domain_error("truncated_m2: half-width must be >= 0");
  if (a == 0.0) return 0.0;
  return 1.0 - 2.0 * a * norm_pdf(a) / strip_mass(a);
}

double truncated_m4(double a) {
  if (a < 0.0) throw std::domain_error("truncated_m4: half-width must be >= 0");
  if (a == 0.0) return 0.0;
  return 3.0 * truncated_m2(a) - 2.0 * a * a * a * norm_pdf(a) / strip_mass(a);
}

}  // namespace gaussblab::special
