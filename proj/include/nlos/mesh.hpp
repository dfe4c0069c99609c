#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace nlos {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
};

inline double dot(const Vec3& a, const Vec3& b) {
    return a.x * b.x + a.y * b.y + a.z * b.z;
}
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
double norm(const Vec3& v);

// Indexed triangle set in scene units with a scalar albedo per triangle.
// Generators keep vertices inside the padded bounding volume [-1,1]^3 and
// drop zero-area triangles.
struct TriangleMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<std::uint32_t, 3>> triangles;
    std::vector<float> albedo; // one entry per triangle, in (0, 1]

    bool empty() const { return triangles.empty(); }

    Vec3 triangle_vertex(size_t tri, int corner) const {
        return vertices[triangles[tri][corner]];
    }
    Vec3 centroid(size_t tri) const;
    Vec3 normal(size_t tri) const;  // unit, right-hand rule
    double area(size_t tri) const;

    void bounds(Vec3& lo, Vec3& hi) const;

    // Index validity, albedo range, degenerate-triangle check.
    void validate() const;
};

// Appends `other` into `mesh` (index-shifted). Light transport here is
// additive, so concatenation is scene union.
void merge_mesh(TriangleMesh& mesh, const TriangleMesh& other);

// Sampling ranges for random scene placement.
struct AffineRanges {
    double rot_x_min = -0.5235987755982988, rot_x_max = 0.5235987755982988; // +/- pi/6
    double rot_y_min = -0.5235987755982988, rot_y_max = 0.5235987755982988;
    double rot_z_min = 0.0, rot_z_max = 6.283185307179586; // full turn
    double scale_min = 0.3, scale_max = 1.0;
    double trans_x_min = -1.0, trans_x_max = 1.0;
    double trans_y_min = -1.0, trans_y_max = 1.0;
    double trans_z_min = -1.0, trans_z_max = 1.0;

    void validate() const;

    static AffineRanges identity();
};

// Scale, rotate (x, then y, then z), translate; deterministic per seed.
// Translations are rejection-resampled (up to 100 attempts) until the
// transformed bounds stay inside [-1,1]^3; after that the mesh is
// recentered at the origin.
TriangleMesh random_affine(const TriangleMesh& mesh, const AffineRanges& ranges,
                           std::uint64_t seed);

// Recenters the bounding box at the origin and scales uniformly so the
// largest extent is one scene unit.
TriangleMesh normalize_to_unit(const TriangleMesh& mesh);

// ASCII OBJ subset: v/f lines only, faces fan-triangulated, 1-based and
// negative indices accepted. Zero-area faces are dropped.
TriangleMesh load_obj(const std::string& path);
void save_obj(const TriangleMesh& mesh, const std::string& path);

} // namespace nlos
