#pragma once

#include <string>

#include <crossfit/configuration.hpp>

namespace crossfit::tools {

/// OBJ document with the six crosspolytope vertices, the eight sign-orthant faces,
/// and a triangulated sample mesh of the body surface (subdivided icosahedron
/// projected onto f = 0 by ray casting from the interior point). d = 3 only.
/// Output bytes are deterministic for fixed inputs.
std::string export_obj(const ImplicitBody& body, const CrossConfig& config);

}  // namespace crossfit::tools
