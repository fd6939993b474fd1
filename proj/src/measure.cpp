#include "gaussblab/measure.hpp"

#include "gaussblab/rng.hpp"
#include "gaussblab/special.hpp"

#include <cmath>
#include <utility>

namespace gaussblab {

namespace sp = special;

namespace {

constexpr double kFacetTol = 1e-9;  // membership slack when probing points on a facet

void check_mc(const McConfig& mc, std::int64_t min_samples) {
  if (mc.samples < min_samples) {
    throw std::invalid_argument("monte carlo: need at least " + std::to_string(min_samples) +
                                " samples");
  }
  if (mc.partition_count < 1) {
    throw std::invalid_argument("monte carlo: partition_count must be >= 1");
  }
}

std::optional<double> closed_measure_impl(const BodyPtr& body) {
  const auto& node = body->node();
  if (const auto* ball = std::get_if<Ball>(&node)) {
    return sp::ball_measure(body->dim(), ball->radius);
  }
  if (const auto* strip = std::get_if<Strip>(&node)) {
    return sp::strip_mass(strip->half_width);
  }
  if (const auto* box = std::get_if<Box>(&node)) {
    double m = 1.0;
    for (int i = 0; i < box->half_widths.size(); ++i) m *= sp::strip_mass(box->half_widths[i]);
    return m;
  }
  if (const auto* ell = std::get_if<Ellipsoid>(&node)) {
    const double lo = ell->eigenvalues.minCoeff(), hi = ell->eigenvalues.maxCoeff();
    if (hi - lo <= 1e-13 * (1.0 + hi)) {
      return sp::ball_measure(body->dim(), 1.0 / std::sqrt(hi));
    }
    return std::nullopt;
  }
  if (const auto* prod = std::get_if<Product>(&node)) {
    double m = 1.0;
    for (const auto& block : prod->blocks) {
      if (!block.factor) continue;
      auto sub = closed_measure_impl(block.factor);
      if (!sub) return std::nullopt;
      m *= *sub;
    }
    return m;
  }
  return std::nullopt;
}

}  // namespace

std::optional<double> closed_form_measure(const BodyPtr& body) {
  return closed_measure_impl(normalize(body));
}

JointMeasure indicator_joint(int dim, const std::vector<std::function<bool(const Vec&)>>& preds,
                             const McConfig& mc) {
  check_mc(mc, 1000);
  const int k = static_cast<int>(preds.size());
  GaussianStream stream(mc.seed);
  Vec z(dim);
  std::vector<std::int64_t> single(k, 0);
  Mat joint = Mat::Zero(k, k);
  std::vector<char> ind(k);
  for (std::int64_t i = 0; i < mc.samples; ++i) {
    stream.fill(i, z.data(), dim);
    for (int a = 0; a < k; ++a) ind[a] = preds[a](z) ? 1 : 0;
    for (int a = 0; a < k; ++a) {
      if (!ind[a]) continue;
      ++single[a];
      for (int b = a; b < k; ++b) {
        if (ind[b]) joint(a, b) += 1.0;
      }
    }
  }
  JointMeasure out;
  out.samples = mc.samples;
  out.seed = mc.seed;
  out.values.resize(k);
  out.covariance = Mat::Zero(k, k);
  const double n = static_cast<double>(mc.samples);
  for (int a = 0; a < k; ++a) out.values[a] = static_cast<double>(single[a]) / n;
  for (int a = 0; a < k; ++a) {
    for (int b = a; b < k; ++b) {
      const double cov = joint(a, b) / n - out.values[a] * out.values[b];
      out.covariance(a, b) = cov;
      out.covariance(b, a) = cov;
    }
  }
  return out;
}

JointMeasure measure_joint(const std::vector<BodyPtr>& bodies, const McConfig& mc) {
  if (bodies.empty()) throw std::invalid_argument("measure_joint: no bodies");
  const int dim = bodies.front()->dim();
  std::vector<std::function<bool(const Vec&)>> preds;
  preds.reserve(bodies.size());
  for (const auto& body : bodies) {
    if (body->dim() != dim) throw std::invalid_argument("measure_joint: dimension mismatch");
    BodyPtr norm = normalize(body);
    preds.emplace_back([norm](const Vec& z) { return norm->contains(z); });
  }
  return indicator_joint(dim, preds, mc);
}

MeasureEstimate measure(const BodyPtr& body, MeasureEngine engine, const McConfig& mc) {
  if (engine != MeasureEngine::MonteCarlo) {
    if (auto cf = closed_form_measure(body)) {
      MeasureEstimate est;
      est.value = *cf;
      est.method = "closed_form";
      return est;
    }
    if (engine == MeasureEngine::ClosedForm) {
      throw std::invalid_argument("measure: no closed form for body kind '" +
                                  normalize(body)->kind_name() + "'");
    }
  }
  JointMeasure joint = measure_joint({body}, mc);
  MeasureEstimate est;
  est.value = joint.values[0];
  est.std_error = std::sqrt(std::max(0.0, joint.covariance(0, 0)) / static_cast<double>(mc.samples));
  est.method = "monte_carlo";
  est.samples = mc.samples;
  est.seed = mc.seed;
  est.partition_count = mc.partition_count;
  return est;
}

double ball_truncated_second_moment(int dim, double radius) {
  if (dim < 1) throw std::invalid_argument("ball_truncated_second_moment: dim must be >= 1");
  if (radius < 0.0) throw std::invalid_argument("ball_truncated_second_moment: radius must be >= 0");
  return dim * sp::chi_square_cdf(dim + 2, radius * radius);
}

// ---------------------------------------------------------------------------
// moments

namespace {

MomentSummary separable_moments(const BodyPtr& body, const std::vector<SeparableBlock>& blocks) {
  const int n = body->dim();
  MomentSummary out;
  out.closed_form = true;
  out.second_moment = Mat::Zero(n, n);
  out.second_moment_err = Mat::Zero(n, n);
  out.coord_fourth = Vec::Zero(n);
  out.coord_fourth_err = Vec::Zero(n);

  double mass = 1.0;
  double sum_s = 0.0;    // sum over blocks of E|x_b|^2
  double sum_q = 0.0;    // sum over blocks of E|x_b|^4
  double sum_s_sq = 0.0; // sum over blocks of (E|x_b|^2)^2
  for (const auto& block : blocks) {
    const int k = static_cast<int>(block.coords.size());
    double block_mass = 1.0, s = 0.0, q = 0.0;
    if (block.kind == SeparableBlock::Kind::Full) {
      s = k;
      q = static_cast<double>(k) * (k + 2);
      for (int c : block.coords) {
        out.second_moment(c, c) = 1.0;
        out.coord_fourth[c] = 3.0;
      }
    } else if (block.kind == SeparableBlock::Kind::Interval) {
      const double a = block.radius;
      block_mass = sp::strip_mass(a);
      const double m2 = sp::truncated_m2(a), m4 = sp::truncated_m4(a);
      s = m2;
      q = m4;
      out.second_moment(block.coords[0], block.coords[0]) = m2;
      out.coord_fourth[block.coords[0]] = m4;
    } else {
      const double r = block.radius;
      const double base = sp::chi_square_cdf(k, r * r);
      if (base <= 0.0) {
        block_mass = 0.0;
      } else {
        block_mass = base;
        const double m2 = sp::chi_square_cdf(k + 2, r * r) / base;
        const double m4 = sp::chi_square_cdf(k + 4, r * r) / base;
        s = k * m2;
        q = k * (k + 2) * m4;
        for (int c : block.coords) {
          out.second_moment(c, c) = m2;
          out.coord_fourth[c] = 3.0 * m4;
        }
      }
    }
    mass *= block_mass;
    sum_s += s;
    sum_q += q;
    sum_s_sq += s * s;
  }
  out.mass.value = mass;
  out.mass.method = "closed_form";
  out.mean_sq = sum_s;
  // blocks are independent: E (sum_b S_b)^2 = sum_b E S_b^2 + sum_{b != b'} ES_b ES_b'
  out.mean_quart = sum_q + sum_s * sum_s - sum_s_sq;
  if (mass <= 0.0) {
    throw UnresolvableMassError("moments: body carries no Gaussian mass");
  }
  return out;
}

}  // namespace

MomentSummary moments(const BodyPtr& body, const McConfig& mc) {
  BodyPtr norm = normalize(body);
  if (auto blocks = separable_blocks(norm)) {
    return separable_moments(norm, *blocks);
  }
  check_mc(mc, 10'000);
  const int n = norm->dim();
  GaussianStream stream(mc.seed);
  Vec z(n);
  std::int64_t accepted = 0;
  Mat sum_xx = Mat::Zero(n, n), sum_xx_sq = Mat::Zero(n, n);
  Vec sum_x4 = Vec::Zero(n), sum_x8 = Vec::Zero(n);
  double sum_s = 0.0, sum_s2 = 0.0, sum_s3 = 0.0, sum_s4 = 0.0;
  for (std::int64_t i = 0; i < mc.samples; ++i) {
    stream.fill(i, z.data(), n);
    if (!norm->contains(z)) continue;
    ++accepted;
    const double s = z.squaredNorm();
    sum_s += s;
    sum_s2 += s * s;
    sum_s3 += s * s * s;
    sum_s4 += s * s * s * s;
    for (int a = 0; a < n; ++a) {
      const double za2 = z[a] * z[a];
      sum_x4[a] += za2 * za2;
      sum_x8[a] += za2 * za2 * za2 * za2;
      for (int b = a; b < n; ++b) {
        const double v = z[a] * z[b];
        sum_xx(a, b) += v;
        sum_xx_sq(a, b) += v * v;
      }
    }
  }
  if (accepted == 0) {
    throw UnresolvableMassError("moments: no sample landed in the body (mass below resolution)");
  }
  MomentSummary out;
  const double m = static_cast<double>(accepted);
  out.accepted = accepted;
  out.mass.value = m / static_cast<double>(mc.samples);
  out.mass.std_error =
      std::sqrt(out.mass.value * (1.0 - out.mass.value) / static_cast<double>(mc.samples));
  out.mass.method = "monte_carlo";
  out.mass.samples = mc.samples;
  out.mass.seed = mc.seed;
  out.mass.partition_count = mc.partition_count;
  out.second_moment = Mat::Zero(n, n);
  out.second_moment_err = Mat::Zero(n, n);
  out.coord_fourth = Vec::Zero(n);
  out.coord_fourth_err = Vec::Zero(n);
  for (int a = 0; a < n; ++a) {
    for (int b = a; b < n; ++b) {
      const double mean = sum_xx(a, b) / m;
      const double var = std::max(0.0, sum_xx_sq(a, b) / m - mean * mean);
      out.second_moment(a, b) = out.second_moment(b, a) = mean;
      out.second_moment_err(a, b) = out.second_moment_err(b, a) = std::sqrt(var / m);
    }
    const double mean4 = sum_x4[a] / m;
    out.coord_fourth[a] = mean4;
    out.coord_fourth_err[a] = std::sqrt(std::max(0.0, sum_x8[a] / m - mean4 * mean4) / m);
  }
  out.mean_sq = sum_s / m;
  out.mean_sq_err = std::sqrt(std::max(0.0, sum_s2 / m - out.mean_sq * out.mean_sq) / m);
  out.mean_quart = sum_s2 / m;
  out.mean_quart_err =
      std::sqrt(std::max(0.0, sum_s4 / m - out.mean_quart * out.mean_quart) / m);
  (void)sum_s3;
  return out;
}

// ---------------------------------------------------------------------------
// perimeter and boundary functionals

namespace {

// Orthonormal basis of the hyperplane orthogonal to the unit vector a
// (columns of the returned n x (n-1) matrix).
Mat hyperplane_basis(const Vec& a) {
  const int n = static_cast<int>(a.size());
  Eigen::HouseholderQR<Mat> qr(a);
  Mat q = qr.householderQ();
  return q.rightCols(n - 1);
}

struct FacetFunctional {
  double integral = 0.0;  // over the +- facet pair
  double std_error = 0.0;
};

// integral over both facets {<a,x> = +-b} cap K of g dgamma_boundary,
// estimated with a hyperplane-restricted Gaussian sample.
FacetFunctional facet_functional(const BodyPtr& body, const FacetPair& facet,
                                 const std::function<double(const Vec&)>& g,
                                 std::uint64_t seed, std::int64_t samples) {
  const int n = body->dim();
  const double weight = sp::norm_pdf(facet.offset);
  FacetFunctional out;
  if (n == 1) {
    const Vec plus = facet.unit_normal * facet.offset;
    const Vec minus = -plus;
    double v = 0.0;
    if (body->contains(plus, kFacetTol)) v += g(plus);
    if (body->contains(minus, kFacetTol)) v += g(minus);
    out.integral = weight * v;
    return out;
  }
  const Mat basis = hyperplane_basis(facet.unit_normal);
  const Vec center = facet.offset * facet.unit_normal;
  GaussianStream stream(seed);
  Vec w(n - 1);
  double sum = 0.0, sum_sq = 0.0;
  for (std::int64_t i = 0; i < samples; ++i) {
    stream.fill(i, w.data(), n - 1);
    const Vec spread = basis * w;
    double v = 0.0;
    Vec p = center + spread;
    if (body->contains(p, kFacetTol)) v += g(p);
    p = -center + spread;
    if (body->contains(p, kFacetTol)) v += g(p);
    sum += v;
    sum_sq += v * v;
  }
  const double m = static_cast<double>(samples);
  const double mean = sum / m;
  out.integral = weight * mean;
  out.std_error = weight * std::sqrt(std::max(0.0, sum_sq / m - mean * mean) / m);
  return out;
}

std::vector<FacetPair> require_facets(const BodyPtr& body, const char* who) {
  auto facets = facet_pairs(body);
  if (!facets) {
    throw std::invalid_argument(std::string(who) + ": body kind '" +
                                normalize(body)->kind_name() + "' is not polytopal");
  }
  return *facets;
}

std::optional<double> closed_perimeter_impl(const BodyPtr& body) {
  const auto& node = body->node();
  const int n = body->dim();
  if (const auto* ball = std::get_if<Ball>(&node)) return sp::chi_pdf(n, ball->radius);
  if (const auto* strip = std::get_if<Strip>(&node)) return 2.0 * sp::norm_pdf(strip->half_width);
  if (const auto* box = std::get_if<Box>(&node)) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      double facet = 2.0 * sp::norm_pdf(box->half_widths[i]);
      for (int j = 0; j < n; ++j) {
        if (j != i) facet *= sp::strip_mass(box->half_widths[j]);
      }
      total += facet;
    }
    return total;
  }
  if (const auto* prod = std::get_if<Product>(&node)) {
    // gamma^+ of a product: sum of factor perimeters weighted by the others' mass
    double total = 0.0;
    for (std::size_t b = 0; b < prod->blocks.size(); ++b) {
      if (!prod->blocks[b].factor) continue;
      auto perim = closed_perimeter_impl(prod->blocks[b].factor);
      if (!perim) return std::nullopt;
      double weight = 1.0;
      for (std::size_t c = 0; c < prod->blocks.size(); ++c) {
        if (c == b || !prod->blocks[c].factor) continue;
        auto mass = closed_measure_impl(prod->blocks[c].factor);
        if (!mass) return std::nullopt;
        weight *= *mass;
      }
      total += *perim * weight;
    }
    return total;
  }
  return std::nullopt;
}

MeasureEstimate facet_perimeter(const BodyPtr& body, const McConfig& mc) {
  BodyPtr norm = normalize(body);
  auto facets = require_facets(norm, "perimeter(facet)");
  double total = 0.0, var = 0.0;
  for (std::size_t i = 0; i < facets.size(); ++i) {
    auto f = facet_functional(norm, facets[i], [](const Vec&) { return 1.0; },
                              derive_seed(mc.seed, i), mc.samples);
    total += f.integral;
    var += f.std_error * f.std_error;
  }
  MeasureEstimate est;
  est.value = total;
  est.std_error = std::sqrt(var);
  est.method = "monte_carlo";
  est.samples = mc.samples * static_cast<std::int64_t>(facets.size());
  est.seed = mc.seed;
  est.partition_count = mc.partition_count;
  return est;
}

MeasureEstimate parallel_diff_perimeter(const BodyPtr& body, const McConfig& mc, double step) {
  if (step <= 0.0) throw std::invalid_argument("perimeter(parallel_diff): step must be positive");
  BodyPtr norm = normalize(body);
  if (!parallel_oracle_supported(norm)) {
    throw std::invalid_argument(
        "perimeter(parallel_diff): no closed parallel-body oracle for body kind '" +
        norm->kind_name() + "'");
  }
  const double h = step, h2 = 0.5 * step;
  std::vector<std::function<bool(const Vec&)>> preds = {
      [norm, h](const Vec& z) { return *distance_to(norm, z) <= h; },
      [norm, h](const Vec& z) { return *inner_contains(norm, z, h); },
      [norm, h2](const Vec& z) { return *distance_to(norm, z) <= h2; },
      [norm, h2](const Vec& z) { return *inner_contains(norm, z, h2); }};
  JointMeasure joint = indicator_joint(norm->dim(), preds, mc);
  const double diff_h = (joint.values[0] - joint.values[1]) / (2.0 * h);
  const double diff_h2 = (joint.values[2] - joint.values[3]) / (2.0 * h2);
  const double value = (4.0 * diff_h2 - diff_h) / 3.0;
  Eigen::Vector4d coef(-1.0 / (3.0 * 2.0 * h), 1.0 / (3.0 * 2.0 * h), 4.0 / (3.0 * 2.0 * h2),
                       -4.0 / (3.0 * 2.0 * h2));
  const double var =
      std::max(0.0, coef.dot(joint.covariance * coef)) / static_cast<double>(mc.samples);
  const double extrapolation = std::fabs(value - diff_h2);
  MeasureEstimate est;
  est.value = value;
  est.std_error = std::sqrt(var + extrapolation * extrapolation);
  est.method = "monte_carlo";
  est.samples = mc.samples;
  est.seed = mc.seed;
  est.partition_count = mc.partition_count;
  return est;
}

}  // namespace

MeasureEstimate perimeter(const BodyPtr& body, PerimeterEngine engine, const McConfig& mc,
                          double step) {
  BodyPtr norm = normalize(body);
  switch (engine) {
    case PerimeterEngine::ClosedForm: {
      auto cf = closed_perimeter_impl(norm);
      if (!cf) {
        throw std::invalid_argument("perimeter: no closed form for body kind '" +
                                    norm->kind_name() + "'");
      }
      MeasureEstimate est;
      est.value = *cf;
      est.method = "closed_form";
      return est;
    }
    case PerimeterEngine::Facet:
      return facet_perimeter(norm, mc);
    case PerimeterEngine::ParallelDiff:
      return parallel_diff_perimeter(norm, mc, step);
    case PerimeterEngine::Auto:
      break;
  }
  if (auto cf = closed_perimeter_impl(norm)) {
    MeasureEstimate est;
    est.value = *cf;
    est.method = "closed_form";
    return est;
  }
  if (facet_pairs(norm)) return facet_perimeter(norm, mc);
  return parallel_diff_perimeter(norm, mc, step);
}

std::vector<FacetMass> facet_masses(const BodyPtr& body, const McConfig& mc) {
  BodyPtr norm = normalize(body);
  auto facets = require_facets(norm, "facet_masses");
  std::vector<FacetMass> out;
  out.reserve(facets.size());
  for (std::size_t i = 0; i < facets.size(); ++i) {
    auto f = facet_functional(norm, facets[i], [](const Vec&) { return 1.0; },
                              derive_seed(mc.seed, i), mc.samples);
    out.push_back({facets[i], f.integral, f.std_error});
  }
  return out;
}

ValueWithError boundary_integral(const BodyPtr& body,
                                 const std::function<double(const Vec&)>& g, const McConfig& mc) {
  BodyPtr norm = normalize(body);
  auto facets = require_facets(norm, "boundary_integral");
  double total = 0.0, var = 0.0;
  for (std::size_t i = 0; i < facets.size(); ++i) {
    auto f = facet_functional(norm, facets[i], g, derive_seed(mc.seed, i), mc.samples);
    total += f.integral;
    var += f.std_error * f.std_error;
  }
  return {total, std::sqrt(var)};
}

BoundaryStats boundary_stats(const BodyPtr& body, const std::vector<Vec>& directions,
                             const std::vector<int>& sigma, double alpha, const McConfig& mc) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("boundary_stats: alpha must lie in (0,1]");
  }
  for (const auto& dir : directions) {
    if (std::fabs(dir.norm() - 1.0) > 1e-8) {
      throw std::invalid_argument("boundary_stats: directions must be unit vectors");
    }
  }
  auto masses = facet_masses(body, mc);
  BoundaryStats out;
  double total = 0.0, var = 0.0;
  for (const auto& fm : masses) {
    total += fm.pair_mass;
    var += fm.pair_mass_err * fm.pair_mass_err;
  }
  out.perimeter.value = total;
  out.perimeter.std_error = std::sqrt(var);
  out.perimeter.method = "monte_carlo";
  out.perimeter.samples = mc.samples * static_cast<std::int64_t>(masses.size());
  out.perimeter.seed = mc.seed;
  out.perimeter.partition_count = mc.partition_count;
  for (const auto& dir : directions) {
    double acc = 0.0, acc_var = 0.0;
    for (const auto& fm : masses) {
      const double w = fm.facet.unit_normal.dot(dir);
      acc += w * w * fm.pair_mass;
      acc_var += w * w * w * w * fm.pair_mass_err * fm.pair_mass_err;
    }
    out.dir_second_moment.push_back({acc, std::sqrt(acc_var)});
  }
  double omega = 0.0, omega_var = 0.0;
  for (const auto& fm : masses) {
    double coord_sq = 0.0;
    for (int c : sigma) coord_sq += fm.facet.unit_normal[c] * fm.facet.unit_normal[c];
    if (coord_sq >= alpha) {
      omega += fm.pair_mass;
      omega_var += fm.pair_mass_err * fm.pair_mass_err;
    }
  }
  out.omega_mass = {omega, std::sqrt(omega_var)};
  return out;
}

}  // namespace gaussblab
