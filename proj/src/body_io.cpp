#include "gaussblab/body_io.hpp"

#include "gaussblab/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace gaussblab {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

const json& field(const json& spec, const char* name) {
  auto it = spec.find(name);
  if (it == spec.end()) fail(std::string("missing field: ") + name);
  return *it;
}

Vec parse_vector(const json& arr, const char* name) {
  if (!arr.is_array() || arr.empty()) fail(std::string(name) + " must be a nonempty array");
  Vec v(static_cast<int>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number()) fail(std::string(name) + " must contain numbers");
    v[static_cast<int>(i)] = arr[i].get<double>();
  }
  return v;
}

Mat parse_matrix(const json& arr, const char* name) {
  if (!arr.is_array() || arr.empty()) fail(std::string(name) + " must be a nonempty 2d array");
  const std::size_t cols = arr[0].is_array() ? arr[0].size() : 0;
  if (cols == 0) fail(std::string(name) + " must be a nonempty 2d array");
  Mat m(static_cast<int>(arr.size()), static_cast<int>(cols));
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_array() || arr[i].size() != cols) {
      fail(std::string(name) + " rows must have equal length");
    }
    for (std::size_t j = 0; j < cols; ++j) {
      if (!arr[i][j].is_number()) fail(std::string(name) + " must contain numbers");
      m(static_cast<int>(i), static_cast<int>(j)) = arr[i][j].get<double>();
    }
  }
  return m;
}

BodyPtr parse_body(const json& spec) {
  if (!spec.is_object()) fail("body spec must be a JSON object");
  const std::string type = field(spec, "type").get<std::string>();
  if (type == "ball") {
    const double r = field(spec, "radius").get<double>();
    if (r <= 0.0) fail("radius must be positive");
    const int dim = field(spec, "dim").get<int>();
    if (dim < 1) fail("dim must be >= 1");
    return make_ball(dim, r);
  }
  if (type == "strip") {
    Vec dir = parse_vector(field(spec, "direction"), "direction");
    if (dir.norm() == 0.0) fail("direction must be nonzero");
    const double w = field(spec, "half_width").get<double>();
    if (w <= 0.0) fail("half_width must be positive");
    return make_strip(dir, w);
  }
  if (type == "box") {
    Vec hw = parse_vector(field(spec, "half_widths"), "half_widths");
    if (hw.minCoeff() <= 0.0) fail("half_widths must be positive");
    return make_box(hw);
  }
  if (type == "ellipsoid") {
    Mat a = parse_matrix(field(spec, "matrix"), "matrix");
    if (a.rows() != a.cols()) fail("matrix must be square");
    try {
      return make_ellipsoid(a);
    } catch (const std::invalid_argument&) {
      fail("matrix must be symmetric positive definite");
    }
  }
  if (type == "polytope") {
    Mat normals = parse_matrix(field(spec, "normals"), "normals");
    Vec offsets = parse_vector(field(spec, "offsets"), "offsets");
    if (normals.rows() != offsets.size()) fail("normals and offsets must have equal length");
    if (offsets.minCoeff() <= 0.0) fail("offsets must be positive");
    for (int i = 0; i < normals.rows(); ++i) {
      if (normals.row(i).norm() == 0.0) fail("normals must be nonzero");
    }
    return make_polytope(normals, offsets);
  }
  if (type == "product") {
    const json& blocks_json = field(spec, "blocks");
    if (!blocks_json.is_array() || blocks_json.empty()) fail("blocks must be a nonempty array");
    std::vector<ProductBlock> blocks;
    for (const auto& bj : blocks_json) {
      std::vector<int> coords;
      for (const auto& c : field(bj, "coords")) coords.push_back(c.get<int>());
      const json& inner = field(bj, "body");
      if (inner.is_string() && inner.get<std::string>() == "full") {
        blocks.push_back({coords, nullptr});
      } else {
        blocks.push_back({coords, parse_body(inner)});
      }
    }
    try {
      return make_product(std::move(blocks));
    } catch (const std::invalid_argument& e) {
      fail(std::string("blocks invalid: ") + e.what());
    }
  }
  if (type == "diag_scaled") {
    Vec x = parse_vector(field(spec, "x"), "x");
    BodyPtr inner = parse_body(field(spec, "body"));
    if (x.size() != inner->dim()) fail("x dimension mismatch with inner body");
    return scale_diag(inner, x);
  }
  if (type == "linear_image") {
    Mat t = parse_matrix(field(spec, "matrix"), "matrix");
    BodyPtr inner = parse_body(field(spec, "body"));
    if (t.rows() != inner->dim() || t.cols() != inner->dim()) {
      fail("matrix dimension mismatch with inner body");
    }
    try {
      return linear_image(inner, t);
    } catch (const std::invalid_argument&) {
      fail("matrix must be invertible");
    }
  }
  fail("unknown body type: " + type);
}

void spot_check(const BodyPtr& body) {
  Splitmix rng(0xb0d7ULL);
  const int n = body->dim();
  Vec p(n), q(n);
  for (int k = 0; k < 100; ++k) {
    for (int i = 0; i < n; ++i) p[i] = 2.5 * rng.normal();
    if (body->contains(p) != body->contains(-p)) {
      fail("body failed the central-symmetry spot check");
    }
    for (int i = 0; i < n; ++i) q[i] = 2.5 * rng.normal();
    if (body->contains(p) && body->contains(q) && !body->contains(0.5 * (p + q), 1e-12)) {
      fail("body failed the midpoint-convexity spot check");
    }
  }
}

}  // namespace

BodyPtr load_body(const json& spec) {
  BodyPtr body = parse_body(spec);
  spot_check(body);
  return body;
}

BodyPtr load_body_text(const std::string& text) {
  json spec;
  try {
    spec = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(std::string("body is not valid JSON: ") + e.what());
  }
  return load_body(spec);
}

namespace {

nlohmann::ordered_json vec_json(const Vec& v) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

nlohmann::ordered_json mat_json(const Mat& m) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (int i = 0; i < m.rows(); ++i) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    arr.push_back(row);
  }
  return arr;
}

}  // namespace

nlohmann::ordered_json body_to_json(const BodyPtr& body) {
  nlohmann::ordered_json out;
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Ball>) {
          out["type"] = "ball";
          out["radius"] = node.radius;
          out["dim"] = body->dim();
        } else if constexpr (std::is_same_v<T, Strip>) {
          out["type"] = "strip";
          out["direction"] = vec_json(node.direction);
          out["half_width"] = node.half_width;
        } else if constexpr (std::is_same_v<T, Box>) {
          out["type"] = "box";
          out["half_widths"] = vec_json(node.half_widths);
        } else if constexpr (std::is_same_v<T, Ellipsoid>) {
          out["type"] = "ellipsoid";
          out["matrix"] = mat_json(node.shape);
        } else if constexpr (std::is_same_v<T, HPolytope>) {
          out["type"] = "polytope";
          out["normals"] = mat_json(node.normals);
          out["offsets"] = vec_json(node.offsets);
        } else if constexpr (std::is_same_v<T, Product>) {
          out["type"] = "product";
          auto blocks = nlohmann::ordered_json::array();
          for (const auto& block : node.blocks) {
            nlohmann::ordered_json bj;
            bj["coords"] = block.coords;
            if (block.factor) {
              bj["body"] = body_to_json(block.factor);
            } else {
              bj["body"] = "full";
            }
            blocks.push_back(bj);
          }
          out["blocks"] = blocks;
        } else if constexpr (std::is_same_v<T, DiagScaled>) {
          out["type"] = "diag_scaled";
          out["x"] = vec_json(node.log_scale);
          out["body"] = body_to_json(node.inner);
        } else {
          out["type"] = "linear_image";
          out["matrix"] = mat_json(node.map);
          out["body"] = body_to_json(node.inner);
        }
      },
      body->node());
  return out;
}

FunctionSpec load_function(const json& spec) {
  if (!spec.is_object()) fail("function spec must be a JSON object");
  const std::string type = field(spec, "type").get<std::string>();
  if (type == "linear") {
    return FunctionSpec::linear(parse_vector(field(spec, "v"), "v"));
  }
  if (type == "quadratic") {
    Mat t = parse_matrix(field(spec, "matrix"), "matrix");
    const double c = spec.value("c", 0.0);
    return FunctionSpec::quadratic(t, c);
  }
  if (type == "polynomial") {
    const json& terms_json = field(spec, "terms");
    if (!terms_json.is_array() || terms_json.empty()) fail("terms must be a nonempty array");
    int dim = -1;
    std::vector<FunctionSpec::Term> terms;
    for (const auto& tj : terms_json) {
      FunctionSpec::Term term;
      term.coef = field(tj, "coef").get<double>();
      const json& powers = field(tj, "powers");
      term.powers.resize(static_cast<int>(powers.size()));
      for (std::size_t i = 0; i < powers.size(); ++i) {
        term.powers[static_cast<int>(i)] = powers[i].get<int>();
      }
      if (dim < 0) dim = static_cast<int>(term.powers.size());
      if (dim != term.powers.size()) fail("terms must share one dimension");
      terms.push_back(std::move(term));
    }
    return FunctionSpec::polynomial(dim, std::move(terms));
  }
  fail("unknown function type: " + type);
}

FunctionSpec load_function_text(const std::string& text) {
  json spec;
  try {
    spec = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(std::string("function is not valid JSON: ") + e.what());
  }
  return load_function(spec);
}

}  // namespace gaussblab
