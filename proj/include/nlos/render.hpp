#pragma once

#include <vector>

#include "nlos/mesh.hpp"
#include "nlos/transient.hpp"

namespace nlos {

struct SubTriangle {
    Vec3 a, b, c;
};

// Midpoint 4-way subdivision, repeated per branch until the round-trip
// span across a sub-triangle's vertices is at most one bin as seen from
// wall_point, or depth 4 is reached (at most 256 pieces).
std::vector<SubTriangle> subdivide_for_binning(const Vec3& a, const Vec3& b, const Vec3& c,
                                               const Vec3& wall_point,
                                               const ScanConfig& config);

// Three-bounce diffuse confocal forward model. Each wall sample owns an
// independent histogram; per sub-triangle with centroid p, area A (scene
// units^2), unit normal n and albedo rho, the deposit is
//     rho * A * (cos_wall * cos_surface)^2 / r^4,   r = |w - p| in meters,
// at round-trip time 2r/c, split linearly between the two nearest bins.
// Back-facing triangles contribute nothing. Output units are unitless.
//
// Accumulation order is fixed per wall sample, so results are identical
// for any worker count.
TransientVolume render_confocal(const TriangleMesh& mesh, const ScanConfig& config);

} // namespace nlos
