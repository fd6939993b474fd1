#pragma once

// Deterministic body corpora for calibration, property tests and the
// verification suite.  Every generator is a pure function of its seed.

#include "gaussblab/body.hpp"
#include "gaussblab/rng.hpp"

#include <string>
#include <vector>

namespace gaussblab {

struct CorpusBody {
  std::string name;
  BodyPtr body;
};

// 50 bodies with closed-form measures (strips, boxes, balls, products), n <= 8.
std::vector<CorpusBody> closed_form_corpus();

// Random symmetric H-polytopes and ellipsoids with moderate aspect ratios.
// `max_facet_pairs` bounds the polytope complexity (facet count is a corpus
// parameter; see random_polytope).
std::vector<CorpusBody> random_deficit_corpus(std::uint64_t seed, int count, int min_dim,
                                              int max_dim, int max_facet_pairs = 0);

// Mixed bodies (strips, boxes, balls, polytopes, ellipsoids) in dims 1..5 with
// both high- and low-mass representatives, for audits and the dichotomy.
std::vector<CorpusBody> audit_corpus(std::uint64_t seed);

// Cylinders K0 x R^k for the strong-deficit equality case.
std::vector<CorpusBody> cylinder_corpus(std::uint64_t seed, int count);

BodyPtr random_polytope(Splitmix& rng, int dim, int facet_pairs);
BodyPtr random_ellipsoid(Splitmix& rng, int dim);
Mat random_rotation(Splitmix& rng, int dim);
Mat random_traceless_symmetric(Splitmix& rng, int dim, double scale = 0.5);

}  // namespace gaussblab
