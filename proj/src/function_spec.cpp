#include "gaussblab/function_spec.hpp"

#include "gaussblab/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace gaussblab {

FunctionSpec FunctionSpec::linear(const Vec& v) {
  FunctionSpec f;
  f.kind_ = Kind::Linear;
  f.dim_ = static_cast<int>(v.size());
  f.v_ = v;
  return f;
}

FunctionSpec FunctionSpec::quadratic(const Mat& t, double c) {
  if (t.rows() != t.cols()) throw std::invalid_argument("quadratic: matrix must be square");
  if ((t - t.transpose()).cwiseAbs().maxCoeff() > 1e-10 * (1.0 + t.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument("quadratic: matrix must be symmetric");
  }
  FunctionSpec f;
  f.kind_ = Kind::Quadratic;
  f.dim_ = static_cast<int>(t.rows());
  f.t_ = 0.5 * (t + t.transpose());
  f.c_ = c;
  return f;
}

FunctionSpec FunctionSpec::polynomial(int dim, std::vector<Term> terms) {
  for (const auto& term : terms) {
    if (term.powers.size() != dim) {
      throw std::invalid_argument("polynomial: term power vector has wrong dimension");
    }
    if (term.powers.minCoeff() < 0) {
      throw std::invalid_argument("polynomial: negative exponent");
    }
  }
  FunctionSpec f;
  f.kind_ = Kind::Polynomial;
  f.dim_ = dim;
  f.terms_ = std::move(terms);
  return f;
}

FunctionSpec FunctionSpec::constant(int dim, double c) {
  return polynomial(dim, {Term{c, Eigen::VectorXi::Zero(dim)}});
}

namespace {

double ipow(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

}  // namespace

double FunctionSpec::value(const Vec& x) const {
  if (x.size() != dim_) throw std::invalid_argument("function value: dimension mismatch");
  switch (kind_) {
    case Kind::Linear:
      return v_.dot(x);
    case Kind::Quadratic:
      return x.dot(t_ * x) + c_;
    case Kind::Polynomial: {
      double total = 0.0;
      for (const auto& term : terms_) {
        double v = term.coef;
        for (int i = 0; i < dim_; ++i) v *= ipow(x[i], term.powers[i]);
        total += v;
      }
      return total;
    }
  }
  return 0.0;
}

Vec FunctionSpec::gradient(const Vec& x) const {
  if (x.size() != dim_) throw std::invalid_argument("function gradient: dimension mismatch");
  switch (kind_) {
    case Kind::Linear:
      return v_;
    case Kind::Quadratic:
      return 2.0 * (t_ * x);
    case Kind::Polynomial: {
      Vec g = Vec::Zero(dim_);
      for (const auto& term : terms_) {
        for (int i = 0; i < dim_; ++i) {
          if (term.powers[i] == 0) continue;
          double v = term.coef * term.powers[i] * ipow(x[i], term.powers[i] - 1);
          for (int j = 0; j < dim_; ++j) {
            if (j != i) v *= ipow(x[j], term.powers[j]);
          }
          g[i] += v;
        }
      }
      return g;
    }
  }
  return Vec::Zero(dim_);
}

bool FunctionSpec::is_even_on_samples(int points) const {
  Splitmix rng(0xeeefULL);
  Vec p(dim_);
  for (int k = 0; k < points; ++k) {
    for (int i = 0; i < dim_; ++i) p[i] = 2.0 * rng.normal();
    const double plus = value(p), minus = value(-p);
    if (std::fabs(plus - minus) > 1e-9 * (1.0 + std::fabs(plus))) return false;
  }
  return true;
}

}  // namespace gaussblab
