#pragma once

// Test functions with exact values and gradients: linear forms <v,x>,
// quadratic forms <Tx,x> + c, and sparse multivariate polynomials.

#include "gaussblab/body.hpp"

#include <vector>

namespace gaussblab {

class FunctionSpec {
 public:
  struct Term {
    double coef;
    Eigen::VectorXi powers;  // exponent per coordinate
  };

  static FunctionSpec linear(const Vec& v);
  static FunctionSpec quadratic(const Mat& t, double c);
  static FunctionSpec polynomial(int dim, std::vector<Term> terms);
  static FunctionSpec constant(int dim, double c);

  double value(const Vec& x) const;
  Vec gradient(const Vec& x) const;
  int dim() const { return dim_; }

  // Spot check f(p) == f(-p) on deterministic random points.
  bool is_even_on_samples(int points = 32) const;

  enum class Kind { Linear, Quadratic, Polynomial };
  Kind kind() const { return kind_; }
  const Vec& linear_coeffs() const { return v_; }
  const Mat& quadratic_matrix() const { return t_; }
  double quadratic_offset() const { return c_; }
  const std::vector<Term>& terms() const { return terms_; }

 private:
  FunctionSpec() = default;
  Kind kind_ = Kind::Linear;
  int dim_ = 0;
  Vec v_;
  Mat t_;
  double c_ = 0.0;
  std::vector<Term> terms_;
};

}  // namespace gaussblab
