#include "gaussblab/mgm.hpp"

#include "gaussblab/corpus.hpp"
#include "gaussblab/rng.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <sstream>

namespace gaussblab {

double isotropy_residual(const Mat& m) {
  const int n = static_cast<int>(m.rows());
  const double tau = m.trace() / n;
  if (!(tau > 0.0)) throw std::invalid_argument("isotropy_residual: nonpositive trace");
  return (m - tau * Mat::Identity(n, n)).norm() / tau;
}

Mat ascent_direction(const Mat& m) {
  const int n = static_cast<int>(m.rows());
  return (m.trace() / n) * Mat::Identity(n, n) - m;
}

Mat project_traceless_symmetric(const Mat& d) {
  const int n = static_cast<int>(d.rows());
  Mat sym = 0.5 * (d + d.transpose());
  return sym - (sym.trace() / n) * Mat::Identity(n, n);
}

Mat volume_preserving_exp(const Mat& d) {
  Mat t = d.exp();
  const int n = static_cast<int>(d.rows());
  const double det = t.determinant();
  if (!(det > 0.0)) throw std::runtime_error("volume_preserving_exp: nonpositive determinant");
  return t / std::pow(det, 1.0 / n);
}

bool is_bounded_body(const BodyPtr& body);

namespace {

struct ObjectivePair {
  double current = 0.0;
  double candidate = 0.0;
  double diff_error = 0.0;  // std error of (candidate - current)
  MeasureEstimate candidate_estimate;
};

ObjectivePair objective_pair(const BodyPtr& body_cur, const BodyPtr& body_cand,
                             const McConfig& mc) {
  ObjectivePair out;
  auto cf_cur = closed_form_measure(body_cur);
  auto cf_cand = closed_form_measure(body_cand);
  if (cf_cur && cf_cand) {
    out.current = *cf_cur;
    out.candidate = *cf_cand;
    out.candidate_estimate.value = *cf_cand;
    out.candidate_estimate.method = "closed_form";
    return out;
  }
  JointMeasure joint = measure_joint({body_cur, body_cand}, mc);
  out.current = joint.values[0];
  out.candidate = joint.values[1];
  const double var = std::max(
      0.0, joint.covariance(0, 0) + joint.covariance(1, 1) - 2.0 * joint.covariance(0, 1));
  out.diff_error = std::sqrt(var / static_cast<double>(mc.samples));
  out.candidate_estimate.value = joint.values[1];
  out.candidate_estimate.std_error =
      std::sqrt(std::max(0.0, joint.covariance(1, 1)) / static_cast<double>(mc.samples));
  out.candidate_estimate.method = "monte_carlo";
  out.candidate_estimate.samples = mc.samples;
  out.candidate_estimate.seed = mc.seed;
  out.candidate_estimate.partition_count = mc.partition_count;
  return out;
}

MeasureEstimate objective_single(const BodyPtr& positioned, const McConfig& mc) {
  return measure(positioned, MeasureEngine::Auto, mc);
}

}  // namespace

bool is_bounded_body(const BodyPtr& body) {
  BodyPtr norm = normalize(body);
  const auto& node = norm->node();
  if (std::get_if<Ball>(&node) || std::get_if<Box>(&node) || std::get_if<Ellipsoid>(&node)) {
    return true;
  }
  if (const auto* strip = std::get_if<Strip>(&node)) {
    (void)strip;
    return norm->dim() == 1;
  }
  if (const auto* poly = std::get_if<HPolytope>(&node)) {
    return Eigen::ColPivHouseholderQR<Mat>(poly->normals).rank() == norm->dim();
  }
  if (const auto* prod = std::get_if<Product>(&node)) {
    for (const auto& block : prod->blocks) {
      if (!block.factor || !is_bounded_body(block.factor)) return false;
    }
    return true;
  }
  if (const auto* image = std::get_if<LinearImage>(&node)) {
    return is_bounded_body(image->inner);
  }
  return false;
}

MgmState mgm_init(const BodyPtr& body, const Mat& d0, const McConfig& mc) {
  if (!is_bounded_body(body)) {
    throw std::invalid_argument("mgm: body must be bounded");
  }
  if (!(in_radius_certified(body).value > 0.0)) {
    throw std::invalid_argument("mgm: body must have positive in-radius");
  }
  MgmState state;
  state.d = project_traceless_symmetric(d0);
  state.t = volume_preserving_exp(state.d);
  BodyPtr positioned = normalize(linear_image(body, state.t));
  MomentSummary mom = moments(positioned, mc);
  state.m = mom.second_moment;
  state.residual = isotropy_residual(state.m);
  state.objective = objective_single(positioned, mc);
  state.iteration = 0;
  state.step = 0.0;
  return state;
}

MgmState mgm_step(const BodyPtr& body, const MgmState& state, double step, const McConfig& mc) {
  if (!(step > 0.0)) throw std::invalid_argument("mgm_step: step must be positive");
  const Mat delta = ascent_direction(state.m);
  BodyPtr body_cur = normalize(linear_image(body, state.t));
  double trial = step;
  while (true) {
    Mat d_new = project_traceless_symmetric(state.d + trial * delta);
    Mat t_new = volume_preserving_exp(d_new);
    BodyPtr body_new = normalize(linear_image(body, t_new));
    ObjectivePair pair = objective_pair(body_cur, body_new, mc);
    if (pair.candidate >= pair.current * (1.0 - 1e-12) - 3.0 * pair.diff_error) {
      MgmState next;
      next.d = d_new;
      next.t = t_new;
      MomentSummary mom = moments(body_new, mc);
      next.m = mom.second_moment;
      next.residual = isotropy_residual(next.m);
      next.objective = pair.candidate_estimate;
      next.iteration = state.iteration + 1;
      next.step = trial;
      return next;
    }
    trial *= 0.5;
    if (trial < 1e-6) {
      std::ostringstream oss;
      oss << "mgm_step: stalled at iteration " << state.iteration << " (residual "
          << state.residual << ", objective " << pair.current << " -> " << pair.candidate
          << " with error " << pair.diff_error << ")";
      throw MgmStallError(oss.str());
    }
  }
}

namespace {

MgmTrajectoryPoint trajectory_point(const MgmState& state) {
  return {state.iteration, state.objective.value, state.objective.std_error, state.residual,
          state.step};
}

}  // namespace

MgmResult mgm_solve(const BodyPtr& body, const MgmOptions& opts, const Mat& d0) {
  if (!(opts.tol > 0.0)) throw std::invalid_argument("mgm_solve: tol must be positive");
  MgmResult result;
  MgmState state = mgm_init(body, d0, opts.mc);
  result.trajectory.push_back(trajectory_point(state));
  while (state.residual >= opts.tol && state.iteration < opts.max_iter) {
    state = mgm_step(body, state, opts.step0, opts.mc);
    result.trajectory.push_back(trajectory_point(state));
  }
  result.converged = state.residual < opts.tol;
  result.state = std::move(state);
  return result;
}

MgmResult mgm_solve(const BodyPtr& body, const MgmOptions& opts) {
  return mgm_solve(body, opts, Mat::Zero(body->dim(), body->dim()));
}

ConcavityProbe log_concavity_probe(const BodyPtr& body, const Mat& d,
                                   const std::vector<double>& grid, const McConfig& mc) {
  if (grid.size() < 3) throw std::invalid_argument("log_concavity_probe: need >= 3 grid points");
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (!(grid[k] > grid[k - 1])) {
      throw std::invalid_argument("log_concavity_probe: grid must be strictly increasing");
    }
  }
  const int k = static_cast<int>(grid.size());
  std::vector<BodyPtr> bodies;
  bodies.reserve(k);
  for (double t : grid) {
    bodies.push_back(normalize(linear_image(body, volume_preserving_exp(t * d))));
  }
  Vec v(k);
  Mat cov_v = Mat::Zero(k, k);
  bool closed = true;
  for (const auto& b : bodies) {
    if (!closed_form_measure(b)) closed = false;
  }
  ConcavityProbe out;
  if (closed) {
    for (int i = 0; i < k; ++i) {
      const double p = *closed_form_measure(bodies[i]);
      if (p <= 0.0) throw UnresolvableMassError("log_concavity_probe: zero mass node");
      v[i] = std::log(p);
    }
    out.engine = "closed_form";
  } else {
    JointMeasure joint = measure_joint(bodies, mc);
    for (int i = 0; i < k; ++i) {
      if (joint.values[i] <= 0.0) {
        throw UnresolvableMassError("log_concavity_probe: node mass below resolution");
      }
      v[i] = std::log(joint.values[i]);
      for (int j = 0; j < k; ++j) {
        cov_v(i, j) = joint.covariance(i, j) /
                      (joint.values[i] * joint.values[j] * static_cast<double>(mc.samples));
      }
    }
    out.engine = "monte_carlo";
  }
  for (int i = 0; i < k; ++i) out.nodes.push_back({grid[i], v[i]});
  out.min_slack = std::numeric_limits<double>::infinity();
  for (int i = 1; i + 1 < k; ++i) {
    const double w_prev = (grid[i + 1] - grid[i]) / (grid[i + 1] - grid[i - 1]);
    const double w_next = (grid[i] - grid[i - 1]) / (grid[i + 1] - grid[i - 1]);
    const double slack = v[i] - (w_prev * v[i - 1] + w_next * v[i + 1]);
    Vec c = Vec::Zero(k);
    c[i] = 1.0;
    c[i - 1] = -w_prev;
    c[i + 1] = -w_next;
    const double err = std::sqrt(std::max(0.0, c.dot(cov_v * c)));
    if (slack < out.min_slack) {
      out.min_slack = slack;
      out.error_budget = 3.0 * err;
    }
  }
  return out;
}

GradientCheck mgm_gradient_check(const BodyPtr& body, const Mat& t_map, const Mat& direction,
                                 double fd_step, const McConfig& mc) {
  if (!(fd_step > 0.0)) throw std::invalid_argument("mgm_gradient_check: step must be positive");
  const Mat dir = project_traceless_symmetric(direction);
  BodyPtr positioned = normalize(linear_image(body, t_map));
  MomentSummary mom = moments(positioned, mc);
  GradientCheck out;
  out.analytic = -(dir * mom.second_moment).trace();
  double var_analytic = 0.0;
  for (int i = 0; i < dir.rows(); ++i) {
    for (int j = 0; j < dir.cols(); ++j) {
      const double se = mom.closed_form ? 0.0 : mom.second_moment_err(i, j);
      var_analytic += dir(i, j) * dir(i, j) * se * se;
    }
  }

  const double h = fd_step, h2 = 0.5 * fd_step;
  std::vector<BodyPtr> bodies = {
      normalize(linear_image(positioned, volume_preserving_exp(h * dir))),
      normalize(linear_image(positioned, volume_preserving_exp(-h * dir))),
      normalize(linear_image(positioned, volume_preserving_exp(h2 * dir))),
      normalize(linear_image(positioned, volume_preserving_exp(-h2 * dir)))};
  Vec v(4);
  Mat cov_v = Mat::Zero(4, 4);
  bool closed = true;
  for (const auto& b : bodies) {
    if (!closed_form_measure(b)) closed = false;
  }
  if (closed) {
    for (int i = 0; i < 4; ++i) v[i] = std::log(*closed_form_measure(bodies[i]));
  } else {
    JointMeasure joint = measure_joint(bodies, mc);
    for (int i = 0; i < 4; ++i) {
      if (joint.values[i] <= 0.0) {
        throw UnresolvableMassError("mgm_gradient_check: mass below resolution");
      }
      v[i] = std::log(joint.values[i]);
      for (int j = 0; j < 4; ++j) {
        cov_v(i, j) = joint.covariance(i, j) /
                      (joint.values[i] * joint.values[j] * static_cast<double>(mc.samples));
      }
    }
  }
  const double g_h = (v[0] - v[1]) / (2.0 * h);
  const double g_h2 = (v[2] - v[3]) / (2.0 * h2);
  out.finite_diff = (4.0 * g_h2 - g_h) / 3.0;
  Vec c(4);
  c << -1.0 / (3.0 * 2.0 * h), 1.0 / (3.0 * 2.0 * h), 4.0 / (3.0 * 2.0 * h2),
      -4.0 / (3.0 * 2.0 * h2);
  const double var_fd = std::max(0.0, c.dot(cov_v * c));
  const double truncation = std::fabs(out.finite_diff - g_h2);
  out.combined_error = std::sqrt(var_analytic + var_fd) + truncation;
  return out;
}

UniquenessReport uniqueness_experiment(const BodyPtr& body, int starts, const MgmOptions& opts) {
  if (starts < 2) throw std::invalid_argument("uniqueness_experiment: need >= 2 starts");
  UniquenessReport out;
  const int n = body->dim();
  for (int s = 0; s < starts; ++s) {
    Splitmix rng(derive_seed(opts.mc.seed, 7000 + s));
    Mat d0 = random_traceless_symmetric(rng, n, 0.5);
    MgmOptions local = opts;
    local.mc.seed = derive_seed(opts.mc.seed, 7100 + s);
    out.runs.push_back(mgm_solve(body, local, d0));
  }

  std::vector<BodyPtr> finals;
  for (const auto& run : out.runs) finals.push_back(normalize(linear_image(body, run.state.t)));
  McConfig eval_mc = opts.mc;
  eval_mc.seed = derive_seed(opts.mc.seed, 7999);
  bool closed = true;
  for (const auto& b : finals) {
    if (!closed_form_measure(b)) closed = false;
  }
  Vec gamma(starts);
  Mat cov = Mat::Zero(starts, starts);
  if (closed) {
    for (int i = 0; i < starts; ++i) gamma[i] = *closed_form_measure(finals[i]);
  } else {
    JointMeasure joint = measure_joint(finals, eval_mc);
    for (int i = 0; i < starts; ++i) gamma[i] = joint.values[i];
    cov = joint.covariance / static_cast<double>(eval_mc.samples);
  }
  out.objectives_consistent = true;
  for (int i = 0; i < starts; ++i) {
    for (int j = i + 1; j < starts; ++j) {
      const double gap = std::fabs(gamma[i] - gamma[j]);
      const double se = std::sqrt(std::max(0.0, cov(i, i) + cov(j, j) - 2.0 * cov(i, j)));
      if (gap > out.max_objective_gap) {
        out.max_objective_gap = gap;
        out.max_objective_gap_budget = 3.0 * se;
      }
      if (gap > 3.0 * se + 1e-15) out.objectives_consistent = false;
    }
  }

  std::vector<Vec> spectra;
  for (const auto& run : out.runs) {
    Eigen::SelfAdjointEigenSolver<Mat> eig(run.state.m);
    spectra.push_back(eig.eigenvalues());
  }
  for (int i = 0; i < starts; ++i) {
    for (int j = i + 1; j < starts; ++j) {
      out.max_spectral_gap = std::max(out.max_spectral_gap, (spectra[i] - spectra[j]).norm());
      const Mat rel = out.runs[i].state.t * out.runs[j].state.t.inverse();
      Eigen::JacobiSVD<Mat> svd(rel, Eigen::ComputeFullU | Eigen::ComputeFullV);
      const Mat q = svd.matrixU() * svd.matrixV().transpose();
      out.max_procrustes_gap = std::max(out.max_procrustes_gap, (rel - q).norm());
    }
  }
  return out;
}

}  // namespace gaussblab
