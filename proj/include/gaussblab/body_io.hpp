#pragma once

// JSON schema for bodies (and function specs), shared by the CLI and tests.
//
// {"type":"ball","radius":r,"dim":n}
// {"type":"strip","direction":[...],"half_width":R}
// {"type":"box","half_widths":[...]}
// {"type":"ellipsoid","matrix":[[...]]}
// {"type":"polytope","normals":[[...]],"offsets":[...]}
// {"type":"product","blocks":[{"coords":[...],"body":{...}|"full"}]}
// {"type":"diag_scaled","x":[...],"body":{...}}
// {"type":"linear_image","matrix":[[...]],"body":{...}}

#include "gaussblab/body.hpp"
#include "gaussblab/function_spec.hpp"

#include <json.hpp>

#include <string>

namespace gaussblab {

// Parses and validates a body; runs symmetry/convexity spot checks on random
// points.  Throws std::invalid_argument with a message naming the bad field.
BodyPtr load_body(const nlohmann::json& spec);
BodyPtr load_body_text(const std::string& text);

nlohmann::ordered_json body_to_json(const BodyPtr& body);

// {"type":"linear","v":[...]} | {"type":"quadratic","matrix":[[...]],"c":0}
// | {"type":"polynomial","terms":[{"coef":...,"powers":[...]}]}
FunctionSpec load_function(const nlohmann::json& spec);
FunctionSpec load_function_text(const std::string& text);

}  // namespace gaussblab
