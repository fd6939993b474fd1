#include "gaussblab/bineq.hpp"

#include "gaussblab/rng.hpp"
#include "gaussblab/special.hpp"

#include <cmath>

namespace gaussblab {

namespace sp = special;

namespace {

MeasureEstimate closed_estimate(double value) {
  MeasureEstimate est;
  est.value = value;
  est.method = "closed_form";
  return est;
}

MeasureEstimate mc_estimate(double value, double std_error, const McConfig& mc) {
  MeasureEstimate est;
  est.value = value;
  est.std_error = std_error;
  est.method = "monte_carlo";
  est.samples = mc.samples;
  est.seed = mc.seed;
  est.partition_count = mc.partition_count;
  return est;
}

}  // namespace

DeficitReport strong_deficit(const BodyPtr& body, const Vec& x, const Vec& y,
                             MeasureEngine engine, const McConfig& mc) {
  if (x.size() != body->dim() || y.size() != body->dim()) {
    throw std::invalid_argument("strong_deficit: dimension mismatch");
  }
  BodyPtr lo = normalize(scale_diag(body, x));
  BodyPtr hi = normalize(scale_diag(body, y));
  BodyPtr mid = normalize(scale_diag(body, 0.5 * (x + y)));

  DeficitReport report;
  report.x = x;
  report.y = y;

  if (engine != MeasureEngine::MonteCarlo) {
    auto p_lo = closed_form_measure(lo);
    auto p_hi = closed_form_measure(hi);
    auto p_mid = closed_form_measure(mid);
    if (p_lo && p_hi && p_mid) {
      if (*p_lo <= 0.0 || *p_hi <= 0.0) {
        throw UnresolvableMassError("deficit: an endpoint body has zero Gaussian mass");
      }
      report.gamma_lo = closed_estimate(*p_lo);
      report.gamma_hi = closed_estimate(*p_hi);
      report.gamma_mid = closed_estimate(*p_mid);
      report.epsilon = *p_mid / std::sqrt(*p_lo * *p_hi) - 1.0;
      report.engine = "closed_form";
      return report;
    }
    if (engine == MeasureEngine::ClosedForm) {
      throw std::invalid_argument("strong_deficit: no closed form for this body");
    }
  }

  JointMeasure joint = measure_joint({lo, hi, mid}, mc);
  const double p_lo = joint.values[0], p_hi = joint.values[1], p_mid = joint.values[2];
  if (p_lo <= 0.0 || p_hi <= 0.0) {
    throw UnresolvableMassError("deficit: endpoint mass below Monte Carlo resolution");
  }
  const double root = std::sqrt(p_lo * p_hi);
  const double ratio = p_mid / root;
  Eigen::Vector3d grad(-0.5 * ratio / p_lo, -0.5 * ratio / p_hi, 1.0 / root);
  const double var =
      std::max(0.0, grad.dot(joint.covariance * grad)) / static_cast<double>(mc.samples);
  const double n = static_cast<double>(mc.samples);
  report.gamma_lo = mc_estimate(p_lo, std::sqrt(p_lo * (1 - p_lo) / n), mc);
  report.gamma_hi = mc_estimate(p_hi, std::sqrt(p_hi * (1 - p_hi) / n), mc);
  report.gamma_mid = mc_estimate(p_mid, std::sqrt(p_mid * (1 - p_mid) / n), mc);
  report.epsilon = ratio - 1.0;
  report.epsilon_error = std::sqrt(var);
  report.engine = "monte_carlo";
  return report;
}

DeficitReport deficit(const BodyPtr& body, double a, double b, MeasureEngine engine,
                      const McConfig& mc) {
  if (!(a > 0.0 && b > a)) throw std::invalid_argument("deficit: need 0 < a < b");
  const int n = body->dim();
  return strong_deficit(body, Vec::Constant(n, std::log(a)), Vec::Constant(n, std::log(b)),
                        engine, mc);
}

HessianEstimate log_measure_hessian(const BodyPtr& body, const Vec& direction, double t,
                                    const McConfig& mc) {
  if (direction.size() != body->dim()) {
    throw std::invalid_argument("log_measure_hessian: dimension mismatch");
  }
  BodyPtr scaled = normalize(scale_diag(body, t * direction));

  if (auto blocks = separable_blocks(scaled)) {
    bool closed = true;
    double total = 0.0;
    for (const auto& block : *blocks) {
      if (block.kind == SeparableBlock::Kind::BallBlock) {
        closed = false;  // cross-covariances inside the ball block; fall to MC
        break;
      }
      if (block.kind == SeparableBlock::Kind::Full) continue;  // m4-m2^2-2m2 = 0
      const double a = block.radius;
      if (a == 0.0) throw UnresolvableMassError("log_measure_hessian: degenerate body");
      const double m2 = sp::truncated_m2(a), m4 = sp::truncated_m4(a);
      const double d = direction[block.coords[0]];
      total += d * d * (m4 - m2 * m2 - 2.0 * m2);
    }
    if (closed) {
      HessianEstimate out;
      out.value = total;
      out.method = "closed_form";
      return out;
    }
  }

  if (mc.samples < 10'000) {
    throw std::invalid_argument("log_measure_hessian: need at least 10000 samples");
  }
  const int n = scaled->dim();
  GaussianStream stream(mc.seed);
  Vec z(n);
  // per-accepted-sample vector (Y^2, Y, W) with Y = sum d_i x_i^2, W = sum d_i^2 x_i^2
  Eigen::Vector3d sum = Eigen::Vector3d::Zero();
  Eigen::Matrix3d cross = Eigen::Matrix3d::Zero();
  std::int64_t accepted = 0;
  for (std::int64_t i = 0; i < mc.samples; ++i) {
    stream.fill(i, z.data(), n);
    if (!scaled->contains(z)) continue;
    ++accepted;
    double yv = 0.0, wv = 0.0;
    for (int c = 0; c < n; ++c) {
      const double sq = z[c] * z[c];
      yv += direction[c] * sq;
      wv += direction[c] * direction[c] * sq;
    }
    Eigen::Vector3d v(yv * yv, yv, wv);
    sum += v;
    cross += v * v.transpose();
  }
  if (accepted == 0) {
    throw UnresolvableMassError("log_measure_hessian: no sample landed in the body");
  }
  const double m = static_cast<double>(accepted);
  Eigen::Vector3d mean = sum / m;
  Eigen::Matrix3d cov = cross / m - mean * mean.transpose();
  Eigen::Vector3d grad(1.0, -2.0 * mean[1], -2.0);
  HessianEstimate out;
  out.value = mean[0] - mean[1] * mean[1] - 2.0 * mean[2];
  out.std_error = std::sqrt(std::max(0.0, grad.dot(cov * grad)) / m);
  out.method = "monte_carlo";
  out.accepted = accepted;
  return out;
}

namespace {

struct BetaQuadrature {
  double value = 0.0;
  double mc_variance = 0.0;
};

BetaQuadrature beta_quadrature(const BodyPtr& body, const Vec& x, const Vec& y, int nodes,
                               const McConfig& mc, std::uint64_t seed_salt) {
  const Vec d = x - y;
  const double h = 2.0 / nodes;
  BetaQuadrature out;
  for (int k = 0; k < nodes; ++k) {
    const double t = -1.0 + (k + 0.5) * h;
    const Vec z = 0.5 * ((1.0 - t) * x + (1.0 + t) * y);
    McConfig node_mc = mc;
    node_mc.seed = derive_seed(mc.seed, seed_salt + static_cast<std::uint64_t>(k));
    HessianEstimate hess = log_measure_hessian(scale_diag(body, z), d, 0.0, node_mc);
    const double weight = (h / 8.0) * (1.0 - std::fabs(t));
    out.value += weight * hess.value;
    out.mc_variance += weight * weight * hess.std_error * hess.std_error;
  }
  return out;
}

}  // namespace

MidpointGap midpoint_gap_identity(const BodyPtr& body, const Vec& x, const Vec& y, int quad_nodes,
                                  const McConfig& mc) {
  if (quad_nodes < 8) throw std::invalid_argument("midpoint_gap_identity: need >= 8 nodes");
  if (x.size() != body->dim() || y.size() != body->dim()) {
    throw std::invalid_argument("midpoint_gap_identity: dimension mismatch");
  }

  MidpointGap out;
  out.quad_nodes = quad_nodes;

  BodyPtr lo = normalize(scale_diag(body, x));
  BodyPtr hi = normalize(scale_diag(body, y));
  BodyPtr mid = normalize(scale_diag(body, 0.5 * (x + y)));
  auto c_lo = closed_form_measure(lo), c_hi = closed_form_measure(hi),
       c_mid = closed_form_measure(mid);

  double v_lo, v_hi, v_mid, var_combo = 0.0;
  if (c_lo && c_hi && c_mid) {
    if (*c_lo <= 0.0 || *c_hi <= 0.0 || *c_mid <= 0.0) {
      throw UnresolvableMassError("midpoint_gap_identity: zero mass at an endpoint");
    }
    v_lo = std::log(*c_lo);
    v_hi = std::log(*c_hi);
    v_mid = std::log(*c_mid);
    out.engine = "closed_form";
  } else {
    JointMeasure joint = measure_joint({lo, hi, mid}, mc);
    if (joint.values[0] <= 0.0 || joint.values[1] <= 0.0 || joint.values[2] <= 0.0) {
      throw UnresolvableMassError("midpoint_gap_identity: mass below Monte Carlo resolution");
    }
    v_lo = std::log(joint.values[0]);
    v_hi = std::log(joint.values[1]);
    v_mid = std::log(joint.values[2]);
    // residual combination c = (-1/2, -1/2, 1) on the logs
    Eigen::Vector3d grad(-0.5 / joint.values[0], -0.5 / joint.values[1], 1.0 / joint.values[2]);
    var_combo =
        std::max(0.0, grad.dot(joint.covariance * grad)) / static_cast<double>(mc.samples);
    out.engine = "monte_carlo";
  }

  BetaQuadrature full = beta_quadrature(body, x, y, quad_nodes, mc, 1000);
  BetaQuadrature half = beta_quadrature(body, x, y, quad_nodes / 2, mc, 5000);
  out.beta = full.value;
  out.quad_error = std::fabs(full.value - half.value);
  out.lhs = v_mid + out.beta;
  out.rhs = 0.5 * (v_lo + v_hi);
  out.residual = std::fabs(out.lhs - out.rhs);
  out.error_budget = 3.0 * std::sqrt(var_combo + full.mc_variance) + out.quad_error;
  return out;
}

PoincareGap poincare_gap(const BodyPtr& body, const FunctionSpec& f, PoincareMode mode,
                         const McConfig& mc) {
  if (f.dim() != body->dim()) throw std::invalid_argument("poincare_gap: dimension mismatch");
  if (mode == PoincareMode::EvenHalf && !f.is_even_on_samples()) {
    throw std::invalid_argument("poincare_gap: even_half mode requires an even function");
  }
  const double dir_scale = mode == PoincareMode::EvenHalf ? 0.5 : 1.0;
  BodyPtr norm = normalize(body);
  const int n = norm->dim();
  GaussianStream stream(mc.seed);
  Vec z(n);
  // per-accepted-sample vector (g, f^2, f) with g = |grad f|^2
  Eigen::Vector3d sum = Eigen::Vector3d::Zero();
  Eigen::Matrix3d cross = Eigen::Matrix3d::Zero();
  std::int64_t accepted = 0;
  for (std::int64_t i = 0; i < mc.samples; ++i) {
    stream.fill(i, z.data(), n);
    if (!norm->contains(z)) continue;
    ++accepted;
    const double fv = f.value(z);
    const double gv = f.gradient(z).squaredNorm();
    Eigen::Vector3d v(gv, fv * fv, fv);
    sum += v;
    cross += v * v.transpose();
  }
  if (accepted == 0) {
    throw UnresolvableMassError("poincare_gap: no sample landed in the body");
  }
  const double m = static_cast<double>(accepted);
  Eigen::Vector3d mean = sum / m;
  Eigen::Matrix3d cov = cross / m - mean * mean.transpose();
  PoincareGap out;
  out.accepted = accepted;
  out.variance = mean[1] - mean[2] * mean[2];
  out.dirichlet = dir_scale * mean[0];
  out.gap = out.dirichlet - out.variance;
  Eigen::Vector3d grad_var(0.0, 1.0, -2.0 * mean[2]);
  Eigen::Vector3d grad_dir(dir_scale, 0.0, 0.0);
  Eigen::Vector3d grad_gap = grad_dir - grad_var;
  out.variance_err = std::sqrt(std::max(0.0, grad_var.dot(cov * grad_var)) / m);
  out.dirichlet_err = std::sqrt(std::max(0.0, grad_dir.dot(cov * grad_dir)) / m);
  out.gap_err = std::sqrt(std::max(0.0, grad_gap.dot(cov * grad_gap)) / m);
  return out;
}

}  // namespace gaussblab
