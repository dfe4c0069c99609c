#pragma once

#include <string>
#include <vector>

#include "nlos/mesh.hpp"

namespace nlos {

enum class PrimitiveKind { Plane, Circle, Triangle, Rectangle, Letter };

PrimitiveKind primitive_kind_from_string(const std::string& name);

struct PrimitiveParams {
    double width = 1.0;   // rectangle
    double height = 1.0;  // rectangle, triangle
    double base = 1.0;    // triangle
    double radius = 0.5;  // circle
    int segments = 32;    // circle fan resolution
    char letter = 'S';    // one of the built-in glyphs
    float albedo = 1.0f;
};

// Flat shapes centered at the origin in the z = 0 plane with unit nominal
// extent. The plane kind is the exception: it spans the full [-1,1]^2
// footprint and acts as a backdrop.
TriangleMesh make_primitive(PrimitiveKind kind, const PrimitiveParams& params = {});

// Glyphs available for the letter kind.
const std::vector<char>& letter_set();

// Ear-clipping triangulation of a simple polygon (either winding, no
// holes). Vertices are 2D points placed at z = 0.
TriangleMesh triangulate_polygon(const std::vector<std::pair<double, double>>& polygon,
                                 float albedo = 1.0f);

} // namespace nlos
