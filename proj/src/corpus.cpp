#include "gaussblab/corpus.hpp"

#include <Eigen/QR>

#include <cmath>

namespace gaussblab {

Mat random_rotation(Splitmix& rng, int dim) {
  Mat g(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) g(i, j) = rng.normal();
  }
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ();
  if (q.determinant() < 0.0) q.col(0) = -q.col(0);
  return q;
}

Mat random_traceless_symmetric(Splitmix& rng, int dim, double scale) {
  Mat d(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = i; j < dim; ++j) {
      const double v = rng.uniform(-scale, scale);
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  const double mean_diag = d.trace() / dim;
  for (int i = 0; i < dim; ++i) d(i, i) -= mean_diag;
  return d;
}

BodyPtr random_polytope(Splitmix& rng, int dim, int facet_pairs) {
  Mat normals(facet_pairs, dim);
  Vec offsets(facet_pairs);
  for (int i = 0; i < facet_pairs; ++i) {
    Vec a(dim);
    for (int j = 0; j < dim; ++j) a[j] = rng.normal();
    normals.row(i) = a.transpose() / a.norm();
    offsets[i] = rng.uniform(0.8, 2.2);
  }
  return make_polytope(normals, offsets);
}

BodyPtr random_ellipsoid(Splitmix& rng, int dim) {
  Vec semi_axes(dim);
  for (int i = 0; i < dim; ++i) semi_axes[i] = rng.uniform(0.5, 2.5);
  Mat q = random_rotation(rng, dim);
  Mat shape = q * semi_axes.array().inverse().square().matrix().asDiagonal() * q.transpose();
  return make_ellipsoid(0.5 * (shape + shape.transpose()));
}

std::vector<CorpusBody> closed_form_corpus() {
  std::vector<CorpusBody> out;
  Splitmix rng(0xc0fe01ULL);
  auto add = [&](const std::string& name, const BodyPtr& body) { out.push_back({name, body}); };

  const double strip_widths[] = {0.5, 1.0, 1.5, 2.0, 3.0};
  for (double w : strip_widths) {
    add("strip_r" + std::to_string(w).substr(0, 4), make_strip(Vec::Unit(2, 0), w));
  }
  for (int n = 1; n <= 8; ++n) {  // two random boxes per dimension
    for (int rep = 0; rep < 2; ++rep) {
      Vec hw(n);
      for (int i = 0; i < n; ++i) hw[i] = rng.uniform(0.6, 2.0);
      add("box_n" + std::to_string(n) + "_" + std::to_string(rep), make_box(hw));
    }
  }
  const double ball_radii[] = {0.8, 1.0, 1.5, 2.0, 3.0};
  int ball_dim = 2;
  for (double r : ball_radii) {
    for (int rep = 0; rep < 3; ++rep) {
      add("ball_n" + std::to_string(ball_dim) + "_r" + std::to_string(r).substr(0, 4),
          make_ball(ball_dim, r));
      ball_dim = ball_dim % 6 + 2;
    }
  }
  // products: box x full, ball x box, strip-like cylinders
  for (int rep = 0; rep < 14 && out.size() < 50; ++rep) {
    const int k = 1 + rep % 3;
    Vec hw(k);
    for (int i = 0; i < k; ++i) hw[i] = rng.uniform(0.6, 1.8);
    std::vector<int> coords_a, coords_b;
    for (int i = 0; i < k; ++i) coords_a.push_back(i);
    const int extra = 1 + rep % 2;
    for (int i = 0; i < extra; ++i) coords_b.push_back(k + i);
    if (rep % 3 == 2) {
      add("prod_box_ball_" + std::to_string(rep),
          make_product({ProductBlock{coords_a, make_box(hw)},
                        ProductBlock{coords_b, make_ball(extra, rng.uniform(0.8, 2.0))}}));
    } else {
      add("prod_box_full_" + std::to_string(rep),
          make_product({ProductBlock{coords_a, make_box(hw)}, ProductBlock{coords_b, nullptr}}));
    }
  }
  out.resize(50);
  return out;
}

std::vector<CorpusBody> random_deficit_corpus(std::uint64_t seed, int count, int min_dim,
                                              int max_dim, int max_facet_pairs) {
  std::vector<CorpusBody> out;
  Splitmix rng(seed);
  for (int k = 0; k < count; ++k) {
    const int n = min_dim + k % (max_dim - min_dim + 1);
    if (k % 2 == 0) {
      const int cap = max_facet_pairs > 0 ? max_facet_pairs : 4 * n;
      const int pairs = rng.uniform_int(2 * n, std::max(2 * n, cap));
      out.push_back({"polytope_" + std::to_string(k), random_polytope(rng, n, pairs)});
    } else {
      out.push_back({"ellipsoid_" + std::to_string(k), random_ellipsoid(rng, n)});
    }
  }
  return out;
}

std::vector<CorpusBody> audit_corpus(std::uint64_t seed) {
  std::vector<CorpusBody> out;
  Splitmix rng(seed);
  out.push_back({"strip_0.5", make_strip(Vec::Unit(2, 0), 0.5)});
  out.push_back({"strip_1", make_strip(Vec::Unit(2, 0), 1.0)});
  out.push_back({"strip_2", make_strip(Vec::Unit(2, 0), 2.0)});
  out.push_back({"strip_4", make_strip(Vec::Unit(3, 0), 4.0)});
  out.push_back({"box_wide_2d", make_box(Vec::Constant(2, 2.0))});
  out.push_back({"box_wide_3d", make_box(Vec::Constant(3, 2.5))});
  out.push_back({"box_small_2d", make_box(Vec::Constant(2, 0.3))});
  out.push_back({"box_small_3d", make_box(Vec::Constant(3, 0.4))});
  out.push_back({"box_tiny_2d", make_box(Vec::Constant(2, 0.1))});
  Vec hw(2);
  hw << 0.5, 1.7;
  out.push_back({"box_aniso", make_box(hw)});
  out.push_back({"ball_1_n2", make_ball(2, 1.0)});
  out.push_back({"ball_2_n3", make_ball(3, 2.0)});
  out.push_back({"ball_05_n4", make_ball(4, 0.5)});
  out.push_back({"ball_3_n2", make_ball(2, 3.0)});
  for (int n = 2; n <= 4; ++n) {
    out.push_back({"polytope_n" + std::to_string(n), random_polytope(rng, n, 3 * n)});
    out.push_back({"ellipsoid_n" + std::to_string(n), random_ellipsoid(rng, n)});
  }
  return out;
}

std::vector<CorpusBody> cylinder_corpus(std::uint64_t seed, int count) {
  std::vector<CorpusBody> out;
  Splitmix rng(seed);
  for (int k = 0; k < count; ++k) {
    const int base_dim = 1 + k % 3;
    const int full_dim = 1 + k % 2;
    BodyPtr base;
    switch (k % 3) {
      case 0: {
        Vec hw(base_dim);
        for (int i = 0; i < base_dim; ++i) hw[i] = rng.uniform(0.5, 1.8);
        base = make_box(hw);
        break;
      }
      case 1:
        base = base_dim == 1 ? make_box(Vec::Constant(1, rng.uniform(0.5, 1.5)))
                             : random_ellipsoid(rng, base_dim);
        break;
      default:
        base = random_polytope(rng, base_dim, 2 * base_dim + 1);
        break;
    }
    std::vector<int> coords_a, coords_b;
    for (int i = 0; i < base_dim; ++i) coords_a.push_back(i);
    for (int i = 0; i < full_dim; ++i) coords_b.push_back(base_dim + i);
    out.push_back({"cylinder_" + std::to_string(k),
                   make_product({ProductBlock{coords_a, base}, ProductBlock{coords_b, nullptr}})});
  }
  return out;
}

}  // namespace gaussblab
