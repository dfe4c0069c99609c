#pragma once

#include "nlos/depth_map.hpp"
#include "nlos/mesh.hpp"

namespace nlos {

// Pixel-center coordinate for index i on a w-sample grid spanning [-1, 1].
inline double grid_coord(int i, int n) {
    return -1.0 + 2.0 * (i + 0.5) / n;
}

// Orthographic z-buffer looking down -z: per pixel, the largest z among
// covering triangles; uncovered pixels read background (-1). Edge-on
// pixel centers are treated as covered.
DepthMap project_depth(const TriangleMesh& mesh, int width, int height);

// Two triangles per pixel quad whose four corners are foreground; quads
// whose corner depth range exceeds skirt_threshold are dropped. Vertices
// sit at pixel centers mapped to [-1,1]^2.
TriangleMesh triangulate_depth(const DepthMap& depth, double skirt_threshold = 0.5,
                               float albedo = 1.0f);

} // namespace nlos
