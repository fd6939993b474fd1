#pragma once

// Oracle-backed representations of centrally symmetric convex sets: balls,
// strips, boxes, ellipsoids, symmetric H-polytopes, coordinate products (with
// unconstrained blocks, so cylinders are first class), and lazy diagonal /
// linear images.  Bodies are immutable; all oracles are pure.

#include <Eigen/Dense>

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace gaussblab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

class Body;
using BodyPtr = std::shared_ptr<const Body>;

struct Ball {
  double radius;
};

// {x : |<direction, x>| <= half_width}, |direction| = 1.
struct Strip {
  Vec direction;
  double half_width;
};

struct Box {
  Vec half_widths;
};

// {x : x' shape x <= 1}, shape symmetric positive definite.
struct Ellipsoid {
  Mat shape;
  Vec eigenvalues;   // of shape, ascending
  Mat eigenvectors;  // columns
};

// {x : |<a_i, x>| <= b_i for all i}; rows of `normals` are the a_i.
struct HPolytope {
  Mat normals;
  Vec offsets;
};

// factor == nullptr marks an unconstrained (full-space) block.
struct ProductBlock {
  std::vector<int> coords;
  BodyPtr factor;
};

struct Product {
  std::vector<ProductBlock> blocks;
};

// e^x K, coordinatewise scaling by exp(log_scale).
struct DiagScaled {
  Vec log_scale;
  BodyPtr inner;
};

// T K for an invertible map T.
struct LinearImage {
  Mat map;
  Mat inverse_map;
  BodyPtr inner;
};

class Body {
 public:
  using Node = std::variant<Ball, Strip, Box, Ellipsoid, HPolytope, Product, DiagScaled, LinearImage>;

  Body(Node node, int dim) : node_(std::move(node)), dim_(dim) {}

  int dim() const { return dim_; }
  const Node& node() const { return node_; }

  // Closed-set membership.  `tol` is a relative slack on every defining
  // inequality, used when probing points that sit on a facet.
  bool contains(const Vec& point, double tol = 0.0) const;

  // Support function sup_{x in K} <x, u> for unit u; +infinity in unbounded
  // directions.  Throws for raw H-polytope nodes (no closed form; the
  // membership-based radial oracle covers those in tests).
  double support(const Vec& u) const;

  // Largest r with r B^n contained in K (0 for empty-interior encodings,
  // +infinity for the full space).
  double in_radius() const;

  std::string kind_name() const;

 private:
  Node node_;
  int dim_;
};

BodyPtr make_ball(int dim, double radius);
BodyPtr make_strip(const Vec& direction, double half_width);
BodyPtr make_box(const Vec& half_widths);
BodyPtr make_ellipsoid(const Mat& shape);
BodyPtr make_polytope(const Mat& normals, const Vec& offsets);
BodyPtr make_product(std::vector<ProductBlock> blocks);
BodyPtr make_full_space(int dim);

// e^x K (lazy node; composition scale_diag(scale_diag(K,x),y) == scale_diag(K,x+y)
// after normalization).
BodyPtr scale_diag(const BodyPtr& body, const Vec& log_scale);
// a K for a > 0.
BodyPtr scale_uniform(const BodyPtr& body, double factor);
// T K; throws for singular T.
BodyPtr linear_image(const BodyPtr& body, const Mat& map);

// Canonical form: folds DiagScaled / LinearImage nodes into the base families
// wherever the algebra is closed (box->box, ball->ellipsoid, polytope->polytope,
// products distribute over diagonal scalings), composing nested maps otherwise.
BodyPtr normalize(const BodyPtr& body);

// Facet description of polytopal bodies.  Each entry stands for the symmetric
// facet pair {<a,x> = +-b} with a unit normal; nullopt when the body is not
// polytopal.  Unbounded polytopal cylinders (products with full blocks) are fine.
struct FacetPair {
  Vec unit_normal;
  double offset;
};
std::optional<std::vector<FacetPair>> facet_pairs(const BodyPtr& body);

// Coordinate-separable structure for closed-form measures/moments: each block
// is a full-space block, a 1D symmetric interval, or a centered ball on its
// coordinates.  nullopt when the (normalized) body does not split this way.
struct SeparableBlock {
  enum class Kind { Full, Interval, BallBlock };
  Kind kind;
  std::vector<int> coords;
  double radius = 0.0;  // Interval: half-width, BallBlock: ball radius
};
std::optional<std::vector<SeparableBlock>> separable_blocks(const BodyPtr& body);

// Parallel-body oracles.  The body must already be normalize()d (no scaling
// nodes); call parallel_oracle_supported first.  distance_to returns the
// Euclidean distance from p to the body (0 inside); inner_contains tests
// whether p + h B fits inside K.  nullopt when the family has no closed
// projection (outer test on raw H-polytopes).
bool parallel_oracle_supported(const BodyPtr& normalized_body);
std::optional<double> distance_to(const BodyPtr& normalized_body, const Vec& p);
std::optional<bool> inner_contains(const BodyPtr& normalized_body, const Vec& p, double h);

// In-radius with certification data for bodies outside the closed-form algebra:
// multi-start projected gradient on the sphere plus a dense random scan.
struct InRadiusResult {
  double value;
  double scan_gap;   // |best multistart value - best scanned value|
  bool numerical;    // false when a closed form was used
};
InRadiusResult in_radius_certified(const BodyPtr& body);

}  // namespace gaussblab
