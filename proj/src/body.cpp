#include "gaussblab/body.hpp"

#include "gaussblab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace gaussblab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

void check_dim(const Body& body, const Vec& p, const char* who) {
  if (p.size() != body.dim()) {
    throw std::invalid_argument(std::string(who) + ": dimension mismatch (body dim " +
                                std::to_string(body.dim()) + ", vector dim " +
                                std::to_string(p.size()) + ")");
  }
}

Vec sub_vector(const Vec& p, const std::vector<int>& coords) {
  Vec out(static_cast<int>(coords.size()));
  for (int i = 0; i < out.size(); ++i) out[i] = p[coords[i]];
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// membership

bool Body::contains(const Vec& point, double tol) const {
  check_dim(*this, point, "contains");
  return std::visit(
      [&](const auto& node) -> bool {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Ball>) {
          return point.norm() <= node.radius + tol * (1.0 + node.radius);
        } else if constexpr (std::is_same_v<T, Strip>) {
          return std::fabs(node.direction.dot(point)) <=
                 node.half_width + tol * (1.0 + node.half_width);
        } else if constexpr (std::is_same_v<T, Box>) {
          for (int i = 0; i < point.size(); ++i) {
            if (std::fabs(point[i]) > node.half_widths[i] + tol * (1.0 + node.half_widths[i]))
              return false;
          }
          return true;
        } else if constexpr (std::is_same_v<T, Ellipsoid>) {
          return point.dot(node.shape * point) <= 1.0 + 2.0 * tol;
        } else if constexpr (std::is_same_v<T, HPolytope>) {
          for (int i = 0; i < node.offsets.size(); ++i) {
            const double v = std::fabs(node.normals.row(i).dot(point));
            if (v > node.offsets[i] + tol * (1.0 + node.offsets[i])) return false;
          }
          return true;
        } else if constexpr (std::is_same_v<T, Product>) {
          for (const auto& block : node.blocks) {
            if (!block.factor) continue;
            if (!block.factor->contains(sub_vector(point, block.coords), tol)) return false;
          }
          return true;
        } else if constexpr (std::is_same_v<T, DiagScaled>) {
          Vec q = point.cwiseProduct((-node.log_scale).array().exp().matrix());
          return node.inner->contains(q, tol);
        } else {  // LinearImage
          return node.inner->contains(node.inverse_map * point, tol);
        }
      },
      node_);
}

// ---------------------------------------------------------------------------
// support function (positively homogeneous in the argument)

namespace {

double support_raw(const Body& body, const Vec& w);

double support_node(const Ball& node, const Vec& w) { return node.radius * w.norm(); }

double support_node(const Strip& node, const Vec& w) {
  const double along = node.direction.dot(w);
  const Vec rest = w - along * node.direction;
  if (rest.norm() > 1e-12 * (1.0 + w.norm())) return kInf;
  return node.half_width * std::fabs(along);
}

double support_node(const Box& node, const Vec& w) {
  return node.half_widths.dot(w.cwiseAbs());
}

double support_node(const Ellipsoid& node, const Vec& w) {
  const Vec y = node.eigenvectors.transpose() * w;
  double s = 0.0;
  for (int i = 0; i < y.size(); ++i) s += y[i] * y[i] / node.eigenvalues[i];
  return std::sqrt(s);
}

double support_node(const HPolytope&, const Vec&) {
  throw std::runtime_error(
      "support: not available for raw H-polytopes (needs an LP); "
      "in_radius has its own closed form and scan oracle");
}

double support_node(const Product& node, const Vec& w) {
  double total = 0.0;
  for (const auto& block : node.blocks) {
    const Vec wb = sub_vector(w, block.coords);
    if (!block.factor) {
      if (wb.norm() > 1e-12 * (1.0 + w.norm())) return kInf;
      continue;
    }
    const double h = support_raw(*block.factor, wb);
    if (std::isinf(h)) return kInf;
    total += h;
  }
  return total;
}

double support_node(const DiagScaled& node, const Vec& w) {
  return support_raw(*node.inner, w.cwiseProduct(node.log_scale.array().exp().matrix()));
}

double support_node(const LinearImage& node, const Vec& w) {
  return support_raw(*node.inner, node.map.transpose() * w);
}

double support_raw(const Body& body, const Vec& w) {
  return std::visit([&](const auto& node) { return support_node(node, w); }, body.node());
}

}  // namespace

double Body::support(const Vec& u) const {
  check_dim(*this, u, "support");
  if (std::fabs(u.norm() - 1.0) > 1e-8) {
    throw std::invalid_argument("support: direction must be a unit vector");
  }
  return support_raw(*this, u);
}

// ---------------------------------------------------------------------------
// constructors

BodyPtr make_ball(int dim, double radius) {
  require(dim >= 1, "ball: dimension must be >= 1");
  require(radius >= 0.0, "ball: radius must be >= 0");
  return std::make_shared<Body>(Ball{radius}, dim);
}

BodyPtr make_strip(const Vec& direction, double half_width) {
  require(direction.size() >= 1, "strip: empty direction");
  const double n = direction.norm();
  require(n > 0.0, "strip: direction must be nonzero");
  require(half_width >= 0.0, "strip: half_width must be >= 0");
  return std::make_shared<Body>(Strip{direction / n, half_width},
                                static_cast<int>(direction.size()));
}

BodyPtr make_box(const Vec& half_widths) {
  require(half_widths.size() >= 1, "box: empty half_widths");
  for (int i = 0; i < half_widths.size(); ++i) {
    require(half_widths[i] >= 0.0, "box: half_widths must be >= 0");
  }
  return std::make_shared<Body>(Box{half_widths}, static_cast<int>(half_widths.size()));
}

BodyPtr make_ellipsoid(const Mat& shape) {
  require(shape.rows() == shape.cols() && shape.rows() >= 1, "ellipsoid: matrix must be square");
  require((shape - shape.transpose()).cwiseAbs().maxCoeff() <=
              1e-10 * (1.0 + shape.cwiseAbs().maxCoeff()),
          "ellipsoid: matrix must be symmetric");
  Mat sym = 0.5 * (shape + shape.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> eig(sym);
  require(eig.info() == Eigen::Success, "ellipsoid: eigendecomposition failed");
  require(eig.eigenvalues().minCoeff() > 0.0, "ellipsoid: matrix must be positive definite");
  return std::make_shared<Body>(Ellipsoid{sym, eig.eigenvalues(), eig.eigenvectors()},
                                static_cast<int>(sym.rows()));
}

BodyPtr make_polytope(const Mat& normals, const Vec& offsets) {
  require(normals.rows() >= 1, "polytope: needs at least one constraint");
  require(normals.rows() == offsets.size(), "polytope: normals/offsets size mismatch");
  for (int i = 0; i < normals.rows(); ++i) {
    require(normals.row(i).norm() > 0.0, "polytope: normals must be nonzero");
    require(offsets[i] >= 0.0, "polytope: offsets must be >= 0");
  }
  return std::make_shared<Body>(HPolytope{normals, offsets}, static_cast<int>(normals.cols()));
}

BodyPtr make_product(std::vector<ProductBlock> blocks) {
  require(!blocks.empty(), "product: needs at least one block");
  std::vector<int> seen;
  for (const auto& block : blocks) {
    require(!block.coords.empty(), "product: block with no coordinates");
    if (block.factor) {
      require(static_cast<int>(block.coords.size()) == block.factor->dim(),
              "product: block coords do not match factor dimension");
    }
    for (int c : block.coords) {
      require(c >= 0, "product: negative coordinate index");
      seen.push_back(c);
    }
  }
  std::sort(seen.begin(), seen.end());
  for (std::size_t i = 0; i < seen.size(); ++i) {
    require(seen[i] == static_cast<int>(i), "product: blocks must partition 0..n-1");
  }
  return std::make_shared<Body>(Product{std::move(blocks)}, static_cast<int>(seen.size()));
}

BodyPtr make_full_space(int dim) {
  require(dim >= 1, "full space: dimension must be >= 1");
  std::vector<int> coords(dim);
  std::iota(coords.begin(), coords.end(), 0);
  return std::make_shared<Body>(Product{{ProductBlock{coords, nullptr}}}, dim);
}

BodyPtr scale_diag(const BodyPtr& body, const Vec& log_scale) {
  require(static_cast<bool>(body), "scale_diag: null body");
  require(log_scale.size() == body->dim(), "scale_diag: dimension mismatch");
  return std::make_shared<Body>(DiagScaled{log_scale, body}, body->dim());
}

BodyPtr scale_uniform(const BodyPtr& body, double factor) {
  require(factor > 0.0, "scale_uniform: factor must be positive");
  return scale_diag(body, Vec::Constant(body->dim(), std::log(factor)));
}

BodyPtr linear_image(const BodyPtr& body, const Mat& map) {
  require(static_cast<bool>(body), "linear_image: null body");
  require(map.rows() == body->dim() && map.cols() == body->dim(),
          "linear_image: matrix dimension mismatch");
  Eigen::FullPivLU<Mat> lu(map);
  require(lu.isInvertible(), "linear_image: singular matrix");
  return std::make_shared<Body>(LinearImage{map, lu.inverse(), body}, body->dim());
}

std::string Body::kind_name() const {
  return std::visit(
      [](const auto& node) -> std::string {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Ball>) return "ball";
        else if constexpr (std::is_same_v<T, Strip>) return "strip";
        else if constexpr (std::is_same_v<T, Box>) return "box";
        else if constexpr (std::is_same_v<T, Ellipsoid>) return "ellipsoid";
        else if constexpr (std::is_same_v<T, HPolytope>) return "polytope";
        else if constexpr (std::is_same_v<T, Product>) return "product";
        else if constexpr (std::is_same_v<T, DiagScaled>) return "diag_scaled";
        else return "linear_image";
      },
      node_);
}

// ---------------------------------------------------------------------------
// normalization

namespace {

// Single-polytope view of a (normalized) polytopal body; rows need not be unit.
std::optional<std::pair<Mat, Vec>> to_constraints(const BodyPtr& body) {
  const auto& node = body->node();
  if (const auto* box = std::get_if<Box>(&node)) {
    Mat a = Mat::Identity(body->dim(), body->dim());
    return std::make_pair(a, box->half_widths);
  }
  if (const auto* strip = std::get_if<Strip>(&node)) {
    Mat a(1, body->dim());
    a.row(0) = strip->direction.transpose();
    Vec b(1);
    b[0] = strip->half_width;
    return std::make_pair(a, b);
  }
  if (const auto* poly = std::get_if<HPolytope>(&node)) {
    return std::make_pair(poly->normals, poly->offsets);
  }
  if (const auto* prod = std::get_if<Product>(&node)) {
    std::vector<Eigen::RowVectorXd> rows;
    std::vector<double> offs;
    for (const auto& block : prod->blocks) {
      if (!block.factor) continue;
      auto sub = to_constraints(block.factor);
      if (!sub) return std::nullopt;
      for (int i = 0; i < sub->second.size(); ++i) {
        Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(body->dim());
        for (int j = 0; j < static_cast<int>(block.coords.size()); ++j) {
          row[block.coords[j]] = sub->first(i, j);
        }
        rows.push_back(row);
        offs.push_back(sub->second[i]);
      }
    }
    if (rows.empty()) return std::nullopt;  // full space, keep as product
    Mat a(static_cast<int>(rows.size()), body->dim());
    Vec b(static_cast<int>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      a.row(static_cast<int>(i)) = rows[i];
      b[static_cast<int>(i)] = offs[i];
    }
    return std::make_pair(a, b);
  }
  return std::nullopt;
}

bool is_diagonal(const Mat& m) {
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      if (i != j && std::fabs(m(i, j)) > 1e-14 * (1.0 + m.cwiseAbs().maxCoeff())) return false;
    }
  }
  return true;
}

BodyPtr apply_diag(const BodyPtr& inner, const Vec& log_scale);
BodyPtr apply_linear(const BodyPtr& inner, const Mat& map, const Mat& inverse_map);

BodyPtr normalize_impl(const BodyPtr& body) {
  const auto& node = body->node();
  if (const auto* prod = std::get_if<Product>(&node)) {
    std::vector<ProductBlock> blocks;
    for (const auto& block : prod->blocks) {
      if (!block.factor) {
        blocks.push_back(block);
        continue;
      }
      BodyPtr factor = normalize_impl(block.factor);
      if (const auto* nested = std::get_if<Product>(&factor->node())) {
        for (const auto& sub : nested->blocks) {  // flatten nested products
          std::vector<int> coords;
          coords.reserve(sub.coords.size());
          for (int c : sub.coords) coords.push_back(block.coords[c]);
          blocks.push_back(ProductBlock{std::move(coords), sub.factor});
        }
      } else {
        blocks.push_back(ProductBlock{block.coords, factor});
      }
    }
    if (blocks.size() == 1 && blocks[0].factor) {
      bool identity_order = true;
      for (std::size_t i = 0; i < blocks[0].coords.size(); ++i) {
        if (blocks[0].coords[i] != static_cast<int>(i)) identity_order = false;
      }
      if (identity_order) return blocks[0].factor;
    }
    return make_product(std::move(blocks));
  }
  if (const auto* scaled = std::get_if<DiagScaled>(&node)) {
    return apply_diag(normalize_impl(scaled->inner), scaled->log_scale);
  }
  if (const auto* image = std::get_if<LinearImage>(&node)) {
    return apply_linear(normalize_impl(image->inner), image->map, image->inverse_map);
  }
  return body;
}

BodyPtr apply_diag(const BodyPtr& inner, const Vec& log_scale) {
  const auto& node = inner->node();
  const Vec scale = log_scale.array().exp().matrix();
  if (const auto* ball = std::get_if<Ball>(&node)) {
    if ((log_scale.array() == log_scale[0]).all()) {
      return make_ball(inner->dim(), scale[0] * ball->radius);
    }
    const double r = ball->radius;
    if (r == 0.0) return make_ball(inner->dim(), 0.0);
    Mat a = (scale.array().inverse().square() / (r * r)).matrix().asDiagonal();
    return make_ellipsoid(a);
  }
  if (const auto* strip = std::get_if<Strip>(&node)) {
    Vec v = strip->direction.cwiseQuotient(scale);
    const double n = v.norm();
    return make_strip(v / n, strip->half_width / n);
  }
  if (const auto* box = std::get_if<Box>(&node)) {
    return make_box(box->half_widths.cwiseProduct(scale));
  }
  if (const auto* ell = std::get_if<Ellipsoid>(&node)) {
    const Vec inv = scale.array().inverse().matrix();
    Mat a = inv.asDiagonal() * ell->shape * inv.asDiagonal();
    return make_ellipsoid(0.5 * (a + a.transpose()));
  }
  if (const auto* poly = std::get_if<HPolytope>(&node)) {
    Mat a = poly->normals;
    for (int i = 0; i < a.rows(); ++i) a.row(i) = a.row(i).cwiseQuotient(scale.transpose());
    return make_polytope(a, poly->offsets);
  }
  if (const auto* prod = std::get_if<Product>(&node)) {
    std::vector<ProductBlock> blocks;
    for (const auto& block : prod->blocks) {
      if (!block.factor) {
        blocks.push_back(block);
        continue;
      }
      Vec sub(static_cast<int>(block.coords.size()));
      for (std::size_t i = 0; i < block.coords.size(); ++i) sub[static_cast<int>(i)] = log_scale[block.coords[i]];
      blocks.push_back(ProductBlock{block.coords, apply_diag(block.factor, sub)});
    }
    return make_product(std::move(blocks));
  }
  // inner is already DiagScaled/LinearImage-free after normalize_impl
  throw std::logic_error("apply_diag: unexpected node");
}

BodyPtr apply_linear(const BodyPtr& inner, const Mat& map, const Mat& inverse_map) {
  const auto& node = inner->node();
  if (const auto* ball = std::get_if<Ball>(&node)) {
    const double r = ball->radius;
    if (r == 0.0) return make_ball(inner->dim(), 0.0);
    Mat a = inverse_map.transpose() * inverse_map / (r * r);
    return make_ellipsoid(0.5 * (a + a.transpose()));
  }
  if (const auto* strip = std::get_if<Strip>(&node)) {
    Vec v = inverse_map.transpose() * strip->direction;
    const double n = v.norm();
    return make_strip(v / n, strip->half_width / n);
  }
  if (const auto* box = std::get_if<Box>(&node)) {
    if (is_diagonal(map)) {
      return make_box(box->half_widths.cwiseProduct(map.diagonal().cwiseAbs()));
    }
    return make_polytope(inverse_map, box->half_widths);
  }
  if (const auto* ell = std::get_if<Ellipsoid>(&node)) {
    Mat a = inverse_map.transpose() * ell->shape * inverse_map;
    return make_ellipsoid(0.5 * (a + a.transpose()));
  }
  if (const auto* poly = std::get_if<HPolytope>(&node)) {
    return make_polytope(poly->normals * inverse_map, poly->offsets);
  }
  if (std::get_if<Product>(&node)) {
    if (auto cons = to_constraints(inner)) {  // polytopal product folds
      return make_polytope(cons->first * inverse_map, cons->second);
    }
    return std::make_shared<Body>(LinearImage{map, inverse_map, inner}, inner->dim());
  }
  throw std::logic_error("apply_linear: unexpected node");
}

}  // namespace

BodyPtr normalize(const BodyPtr& body) {
  require(static_cast<bool>(body), "normalize: null body");
  return normalize_impl(body);
}

// ---------------------------------------------------------------------------
// facet enumeration

std::optional<std::vector<FacetPair>> facet_pairs(const BodyPtr& body) {
  BodyPtr norm = normalize(body);
  auto cons = to_constraints(norm);
  if (!cons) return std::nullopt;
  std::vector<FacetPair> out;
  for (int i = 0; i < cons->second.size(); ++i) {
    const double len = cons->first.row(i).norm();
    FacetPair f{cons->first.row(i).transpose() / len, cons->second[i] / len};
    bool dup = false;
    for (const auto& g : out) {
      if (std::fabs(g.offset - f.offset) <= 1e-12 * (1.0 + f.offset) &&
          std::min((g.unit_normal - f.unit_normal).norm(),
                   (g.unit_normal + f.unit_normal).norm()) <= 1e-12) {
        dup = true;
        break;
      }
    }
    if (!dup) out.push_back(std::move(f));
  }
  return out;
}

// ---------------------------------------------------------------------------
// separable structure

namespace {

std::optional<std::vector<SeparableBlock>> separable_impl(const BodyPtr& body) {
  const auto& node = body->node();
  const int n = body->dim();
  auto all_coords = [n]() {
    std::vector<int> c(n);
    std::iota(c.begin(), c.end(), 0);
    return c;
  };
  if (const auto* ball = std::get_if<Ball>(&node)) {
    SeparableBlock b{n == 1 ? SeparableBlock::Kind::Interval : SeparableBlock::Kind::BallBlock,
                     all_coords(), ball->radius};
    return std::vector<SeparableBlock>{b};
  }
  if (const auto* box = std::get_if<Box>(&node)) {
    std::vector<SeparableBlock> out;
    for (int i = 0; i < n; ++i) {
      out.push_back({SeparableBlock::Kind::Interval, {i}, box->half_widths[i]});
    }
    return out;
  }
  if (const auto* strip = std::get_if<Strip>(&node)) {
    int axis = -1;
    for (int i = 0; i < n; ++i) {
      if (std::fabs(std::fabs(strip->direction[i]) - 1.0) <= 1e-12) axis = i;
    }
    if (axis < 0 || strip->direction.cwiseAbs().sum() > 1.0 + 1e-10) return std::nullopt;
    std::vector<SeparableBlock> out;
    out.push_back({SeparableBlock::Kind::Interval, {axis}, strip->half_width});
    std::vector<int> rest;
    for (int i = 0; i < n; ++i) {
      if (i != axis) rest.push_back(i);
    }
    if (!rest.empty()) out.push_back({SeparableBlock::Kind::Full, rest, 0.0});
    return out;
  }
  if (const auto* prod = std::get_if<Product>(&node)) {
    std::vector<SeparableBlock> out;
    for (const auto& block : prod->blocks) {
      if (!block.factor) {
        out.push_back({SeparableBlock::Kind::Full, block.coords, 0.0});
        continue;
      }
      auto sub = separable_impl(block.factor);
      if (!sub) return std::nullopt;
      for (auto& s : *sub) {
        std::vector<int> mapped;
        mapped.reserve(s.coords.size());
        for (int c : s.coords) mapped.push_back(block.coords[c]);
        out.push_back({s.kind, std::move(mapped), s.radius});
      }
    }
    return out;
  }
  return std::nullopt;
}

}  // namespace

std::optional<std::vector<SeparableBlock>> separable_blocks(const BodyPtr& body) {
  return separable_impl(normalize(body));
}

// ---------------------------------------------------------------------------
// distances and parallel bodies

namespace {

// Distance from a point (eigenbasis coordinates y) to the ellipsoid
// {sum alpha_i y_i^2 <= 1}; secular-equation bisection.
double ellipsoid_outer_distance(const Vec& alpha, const Vec& y) {
  double q = 0.0;
  for (int i = 0; i < y.size(); ++i) q += alpha[i] * y[i] * y[i];
  if (q <= 1.0) return 0.0;
  auto g = [&](double lam) {
    double s = 0.0;
    for (int i = 0; i < y.size(); ++i) {
      const double d = 1.0 + lam * alpha[i];
      s += alpha[i] * y[i] * y[i] / (d * d);
    }
    return s;
  };
  double lo = 0.0, hi = 1.0;
  while (g(hi) > 1.0) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-14 * (1.0 + hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 1.0 ? lo : hi) = mid;
  }
  const double lam = 0.5 * (lo + hi);
  double d2 = 0.0;
  for (int i = 0; i < y.size(); ++i) {
    const double t = lam * alpha[i] * y[i] / (1.0 + lam * alpha[i]);
    d2 += t * t;
  }
  return std::sqrt(d2);
}

// Distance from an interior point to the ellipsoid boundary (0 if outside).
double ellipsoid_inner_depth(const Vec& alpha, const Vec& y) {
  double q = 0.0;
  for (int i = 0; i < y.size(); ++i) q += alpha[i] * y[i] * y[i];
  if (q > 1.0) return 0.0;
  const double amax = alpha.maxCoeff();
  auto g = [&](double lam) {
    double s = 0.0;
    for (int i = 0; i < y.size(); ++i) {
      const double d = 1.0 + lam * alpha[i];
      s += alpha[i] * y[i] * y[i] / (d * d);
    }
    return s;
  };
  const double left = -1.0 / amax * (1.0 - 1e-12);
  if (g(left) < 1.0) {
    // nearest boundary point picks up a component in the top eigenspace
    double d2 = 0.0, resid = 0.0;
    for (int i = 0; i < y.size(); ++i) {
      if (alpha[i] >= amax * (1.0 - 1e-12)) continue;
      const double yi = y[i] / (1.0 - alpha[i] / amax);
      resid += alpha[i] * yi * yi;
      const double diff = yi - y[i];
      d2 += diff * diff;
    }
    d2 += std::max(0.0, (1.0 - resid) / amax);
    return std::sqrt(d2);
  }
  double lo = left, hi = 0.0;  // g(lo) >= 1 >= g(hi)
  for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) >= 1.0 ? lo : hi) = mid;
  }
  const double lam = 0.5 * (lo + hi);
  double d2 = 0.0;
  for (int i = 0; i < y.size(); ++i) {
    const double t = lam * alpha[i] * y[i] / (1.0 + lam * alpha[i]);
    d2 += t * t;
  }
  return std::sqrt(d2);
}

std::optional<double> distance_impl(const BodyPtr& body, const Vec& p) {
  const auto& node = body->node();
  if (const auto* ball = std::get_if<Ball>(&node)) {
    return std::max(0.0, p.norm() - ball->radius);
  }
  if (const auto* strip = std::get_if<Strip>(&node)) {
    return std::max(0.0, std::fabs(strip->direction.dot(p)) - strip->half_width);
  }
  if (const auto* box = std::get_if<Box>(&node)) {
    double d2 = 0.0;
    for (int i = 0; i < p.size(); ++i) {
      const double e = std::max(0.0, std::fabs(p[i]) - box->half_widths[i]);
      d2 += e * e;
    }
    return std::sqrt(d2);
  }
  if (const auto* ell = std::get_if<Ellipsoid>(&node)) {
    return ellipsoid_outer_distance(ell->eigenvalues, ell->eigenvectors.transpose() * p);
  }
  if (const auto* prod = std::get_if<Product>(&node)) {
    double d2 = 0.0;
    for (const auto& block : prod->blocks) {
      if (!block.factor) continue;
      auto d = distance_impl(block.factor, sub_vector(p, block.coords));
      if (!d) return std::nullopt;
      d2 += *d * *d;
    }
    return std::sqrt(d2);
  }
  return std::nullopt;
}

std::optional<bool> inner_impl(const BodyPtr& body, const Vec& p, double h) {
  const auto& node = body->node();
  if (const auto* ball = std::get_if<Ball>(&node)) {
    return p.norm() <= ball->radius - h;
  }
  if (const auto* strip = std::get_if<Strip>(&node)) {
    return std::fabs(strip->direction.dot(p)) <= strip->half_width - h;
  }
  if (const auto* box = std::get_if<Box>(&node)) {
    for (int i = 0; i < p.size(); ++i) {
      if (std::fabs(p[i]) > box->half_widths[i] - h) return false;
    }
    return true;
  }
  if (const auto* poly = std::get_if<HPolytope>(&node)) {
    for (int i = 0; i < poly->offsets.size(); ++i) {
      if (std::fabs(poly->normals.row(i).dot(p)) >
          poly->offsets[i] - h * poly->normals.row(i).norm())
        return false;
    }
    return true;
  }
  if (const auto* ell = std::get_if<Ellipsoid>(&node)) {
    return ellipsoid_inner_depth(ell->eigenvalues, ell->eigenvectors.transpose() * p) >= h;
  }
  if (const auto* prod = std::get_if<Product>(&node)) {
    for (const auto& block : prod->blocks) {
      if (!block.factor) continue;
      auto ok = inner_impl(block.factor, sub_vector(p, block.coords), h);
      if (!ok) return std::nullopt;
      if (!*ok) return false;
    }
    return true;
  }
  return std::nullopt;
}

}  // namespace

bool parallel_oracle_supported(const BodyPtr& normalized_body) {
  const auto& node = normalized_body->node();
  if (std::get_if<Ball>(&node) || std::get_if<Strip>(&node) || std::get_if<Box>(&node) ||
      std::get_if<Ellipsoid>(&node)) {
    return true;
  }
  if (const auto* prod = std::get_if<Product>(&node)) {
    for (const auto& block : prod->blocks) {
      if (block.factor && !parallel_oracle_supported(block.factor)) return false;
    }
    return true;
  }
  return false;
}

std::optional<double> distance_to(const BodyPtr& normalized_body, const Vec& p) {
  return distance_impl(normalized_body, p);
}

std::optional<bool> inner_contains(const BodyPtr& normalized_body, const Vec& p, double h) {
  return inner_impl(normalized_body, p, h);
}

// ---------------------------------------------------------------------------
// in-radius

namespace {

std::optional<double> closed_in_radius(const BodyPtr& body) {
  const auto& node = body->node();
  if (const auto* ball = std::get_if<Ball>(&node)) return ball->radius;
  if (const auto* strip = std::get_if<Strip>(&node)) return strip->half_width;
  if (const auto* box = std::get_if<Box>(&node)) return box->half_widths.minCoeff();
  if (const auto* ell = std::get_if<Ellipsoid>(&node)) {
    return 1.0 / std::sqrt(ell->eigenvalues.maxCoeff());
  }
  if (const auto* poly = std::get_if<HPolytope>(&node)) {
    double r = kInf;
    for (int i = 0; i < poly->offsets.size(); ++i) {
      r = std::min(r, poly->offsets[i] / poly->normals.row(i).norm());
    }
    return r;
  }
  if (const auto* prod = std::get_if<Product>(&node)) {
    double r = kInf;
    for (const auto& block : prod->blocks) {
      if (!block.factor) continue;
      auto sub = closed_in_radius(block.factor);
      if (!sub) return std::nullopt;
      r = std::min(r, *sub);
    }
    return r;  // all-full product: +inf
  }
  return std::nullopt;
}

Vec random_unit(Splitmix& rng, int n) {
  Vec u(n);
  for (int i = 0; i < n; ++i) u[i] = rng.normal();
  const double len = u.norm();
  return len > 0.0 ? Vec(u / len) : Vec(Vec::Unit(n, 0));
}

double numeric_in_radius(const BodyPtr& body, double* scan_gap) {
  const int n = body->dim();
  auto h = [&](const Vec& u) { return body->support(u / u.norm()); };

  Splitmix rng(0x5eedULL);
  double best_scan = kInf;
  const int scan_count = 2048 * n;
  for (int i = 0; i < scan_count; ++i) best_scan = std::min(best_scan, h(random_unit(rng, n)));
  for (int i = 0; i < n; ++i) {
    best_scan = std::min(best_scan, h(Vec::Unit(n, i)));
    best_scan = std::min(best_scan, h(-Vec::Unit(n, i)));
  }

  double best = kInf;
  const double fd = 1e-6;
  for (int start = 0; start < 8 * n; ++start) {
    Vec u = random_unit(rng, n);
    double fu = h(u);
    if (std::isinf(fu)) continue;
    double step = 0.25;
    for (int it = 0; it < 300 && step > 1e-10; ++it) {
      Vec grad(n);
      bool ok = true;
      for (int i = 0; i < n; ++i) {
        Vec up = u + fd * Vec::Unit(n, i);
        Vec dn = u - fd * Vec::Unit(n, i);
        const double hp = h(up), hm = h(dn);
        if (std::isinf(hp) || std::isinf(hm)) {
          ok = false;
          break;
        }
        grad[i] = (hp - hm) / (2.0 * fd);
      }
      if (!ok) break;
      Vec tangent = grad - grad.dot(u) * u;
      if (tangent.norm() < 1e-12) break;
      Vec cand = u - step * tangent;
      cand /= cand.norm();
      const double fc = h(cand);
      if (fc < fu) {
        u = cand;
        fu = fc;
      } else {
        step *= 0.5;
      }
    }
    best = std::min(best, fu);
  }
  if (scan_gap) *scan_gap = std::isinf(best) ? 0.0 : std::fabs(best - best_scan);
  return std::min(best, best_scan);
}

}  // namespace

InRadiusResult in_radius_certified(const BodyPtr& body) {
  BodyPtr norm = normalize(body);
  if (auto r = closed_in_radius(norm)) return {*r, 0.0, false};
  double gap = 0.0;
  const double r = numeric_in_radius(norm, &gap);
  return {r, gap, true};
}

double Body::in_radius() const {
  // shared_ptr aliasing: wrap *this without taking ownership
  BodyPtr self(std::shared_ptr<const Body>(), this);
  return in_radius_certified(self).value;
}

}  // namespace gaussblab
