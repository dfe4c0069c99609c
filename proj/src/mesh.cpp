#include "nlos/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "nlos/common.hpp"
#include "nlos/rng.hpp"

namespace nlos {

double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

Vec3 TriangleMesh::centroid(size_t tri) const {
    const Vec3 a = triangle_vertex(tri, 0);
    const Vec3 b = triangle_vertex(tri, 1);
    const Vec3 c = triangle_vertex(tri, 2);
    return (a + b + c) * (1.0 / 3.0);
}

Vec3 TriangleMesh::normal(size_t tri) const {
    const Vec3 a = triangle_vertex(tri, 0);
    const Vec3 n = cross(triangle_vertex(tri, 1) - a, triangle_vertex(tri, 2) - a);
    const double len = norm(n);
    if (len == 0.0) return {0.0, 0.0, 0.0};
    return n * (1.0 / len);
}

double TriangleMesh::area(size_t tri) const {
    const Vec3 a = triangle_vertex(tri, 0);
    return 0.5 * norm(cross(triangle_vertex(tri, 1) - a, triangle_vertex(tri, 2) - a));
}

void TriangleMesh::bounds(Vec3& lo, Vec3& hi) const {
    constexpr double inf = std::numeric_limits<double>::infinity();
    lo = {inf, inf, inf};
    hi = {-inf, -inf, -inf};
    for (const Vec3& v : vertices) {
        lo.x = std::min(lo.x, v.x); lo.y = std::min(lo.y, v.y); lo.z = std::min(lo.z, v.z);
        hi.x = std::max(hi.x, v.x); hi.y = std::max(hi.y, v.y); hi.z = std::max(hi.z, v.z);
    }
}

void TriangleMesh::validate() const {
    if (albedo.size() != triangles.size()) {
        throw InputError("TriangleMesh: albedo count does not match triangle count");
    }
    for (const auto& t : triangles) {
        for (std::uint32_t idx : t) {
            if (idx >= vertices.size()) throw InputError("TriangleMesh: vertex index out of range");
        }
    }
    for (size_t i = 0; i < triangles.size(); ++i) {
        if (area(i) <= 0.0) throw InputError("TriangleMesh: degenerate triangle");
    }
    for (float a : albedo) {
        if (!(a > 0.0f && a <= 1.0f)) throw InputError("TriangleMesh: albedo outside (0, 1]");
    }
}

void merge_mesh(TriangleMesh& mesh, const TriangleMesh& other) {
    const std::uint32_t base = static_cast<std::uint32_t>(mesh.vertices.size());
    mesh.vertices.insert(mesh.vertices.end(), other.vertices.begin(), other.vertices.end());
    for (const auto& t : other.triangles) {
        mesh.triangles.push_back({t[0] + base, t[1] + base, t[2] + base});
    }
    mesh.albedo.insert(mesh.albedo.end(), other.albedo.begin(), other.albedo.end());
}

void AffineRanges::validate() const {
    if (rot_x_min > rot_x_max || rot_y_min > rot_y_max || rot_z_min > rot_z_max ||
        trans_x_min > trans_x_max || trans_y_min > trans_y_max || trans_z_min > trans_z_max ||
        scale_min > scale_max) {
        throw ParamError("AffineRanges: range minimum exceeds maximum");
    }
    if (scale_min <= 0.0) throw ParamError("AffineRanges: scale range must be positive");
}

AffineRanges AffineRanges::identity() {
    AffineRanges r;
    r.rot_x_min = r.rot_x_max = 0.0;
    r.rot_y_min = r.rot_y_max = 0.0;
    r.rot_z_min = r.rot_z_max = 0.0;
    r.scale_min = r.scale_max = 1.0;
    r.trans_x_min = r.trans_x_max = 0.0;
    r.trans_y_min = r.trans_y_max = 0.0;
    r.trans_z_min = r.trans_z_max = 0.0;
    return r;
}

namespace {

Vec3 rotate_xyz(const Vec3& v, double ax, double ay, double az) {
    const double cx = std::cos(ax), sx = std::sin(ax);
    const double cy = std::cos(ay), sy = std::sin(ay);
    const double cz = std::cos(az), sz = std::sin(az);
    Vec3 r = {v.x, cx * v.y - sx * v.z, sx * v.y + cx * v.z};
    r = {cy * r.x + sy * r.z, r.y, -sy * r.x + cy * r.z};
    return {cz * r.x - sz * r.y, sz * r.x + cz * r.y, r.z};
}

bool inside_unit_box(const Vec3& lo, const Vec3& hi) {
    return lo.x >= -1.0 && lo.y >= -1.0 && lo.z >= -1.0 &&
           hi.x <= 1.0 && hi.y <= 1.0 && hi.z <= 1.0;
}

} // namespace

TriangleMesh random_affine(const TriangleMesh& mesh, const AffineRanges& ranges,
                           std::uint64_t seed) {
    if (mesh.empty()) throw InputError("random_affine: empty mesh");
    ranges.validate();
    Rng rng(seed, 0x0AFF1);

    const double ax = rng.uniform(ranges.rot_x_min, ranges.rot_x_max);
    const double ay = rng.uniform(ranges.rot_y_min, ranges.rot_y_max);
    const double az = rng.uniform(ranges.rot_z_min, ranges.rot_z_max);
    const double s = rng.uniform(ranges.scale_min, ranges.scale_max);

    TriangleMesh out = mesh;
    for (Vec3& v : out.vertices) v = rotate_xyz(v * s, ax, ay, az);

    Vec3 lo, hi;
    out.bounds(lo, hi);

    Vec3 t{0.0, 0.0, 0.0};
    bool placed = false;
    for (int attempt = 0; attempt < 100; ++attempt) {
        const Vec3 cand{rng.uniform(ranges.trans_x_min, ranges.trans_x_max),
                        rng.uniform(ranges.trans_y_min, ranges.trans_y_max),
                        rng.uniform(ranges.trans_z_min, ranges.trans_z_max)};
        if (inside_unit_box(lo + cand, hi + cand)) {
            t = cand;
            placed = true;
            break;
        }
    }
    if (!placed) {
        // Fall back to recentering the bounds at the origin.
        t = (lo + hi) * -0.5;
    }
    for (Vec3& v : out.vertices) v = v + t;
    return out;
}

TriangleMesh normalize_to_unit(const TriangleMesh& mesh) {
    if (mesh.empty()) throw InputError("normalize_to_unit: empty mesh");
    Vec3 lo, hi;
    mesh.bounds(lo, hi);
    const Vec3 center = (lo + hi) * 0.5;
    const double extent = std::max({hi.x - lo.x, hi.y - lo.y, hi.z - lo.z});
    const double s = extent > 0.0 ? 1.0 / extent : 1.0;
    TriangleMesh out = mesh;
    for (Vec3& v : out.vertices) v = (v - center) * s;
    return out;
}

TriangleMesh load_obj(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("load_obj: cannot open " + path);
    TriangleMesh mesh;
    std::string line;
    auto resolve = [&](long idx) -> std::uint32_t {
        const long n = static_cast<long>(mesh.vertices.size());
        long r = idx > 0 ? idx - 1 : n + idx;
        if (r < 0 || r >= n) throw IoError("load_obj: face index out of range in " + path);
        return static_cast<std::uint32_t>(r);
    };
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::string tag;
        if (!(ss >> tag)) continue;
        if (tag == "v") {
            Vec3 v;
            if (!(ss >> v.x >> v.y >> v.z)) throw IoError("load_obj: malformed vertex in " + path);
            mesh.vertices.push_back(v);
        } else if (tag == "f") {
            std::vector<std::uint32_t> face;
            std::string item;
            while (ss >> item) {
                // "i", "i/j", "i//k", "i/j/k" — only the vertex index matters here
                face.push_back(resolve(std::stol(item.substr(0, item.find('/')))));
            }
            if (face.size() < 3) throw IoError("load_obj: face with fewer than 3 vertices in " + path);
            for (size_t i = 1; i + 1 < face.size(); ++i) {
                mesh.triangles.push_back({face[0], face[i], face[i + 1]});
                mesh.albedo.push_back(1.0f);
            }
        }
    }
    // Drop zero-area faces so the mesh invariant holds for imported data.
    TriangleMesh clean;
    clean.vertices = mesh.vertices;
    for (size_t i = 0; i < mesh.triangles.size(); ++i) {
        if (mesh.area(i) > 0.0) {
            clean.triangles.push_back(mesh.triangles[i]);
            clean.albedo.push_back(mesh.albedo[i]);
        }
    }
    return clean;
}

void save_obj(const TriangleMesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("save_obj: cannot open " + path);
    out << "# triangle mesh, " << mesh.vertices.size() << " vertices\n";
    for (const Vec3& v : mesh.vertices) {
        out << "v " << v.x << " " << v.y << " " << v.z << "\n";
    }
    for (const auto& t : mesh.triangles) {
        out << "f " << t[0] + 1 << " " << t[1] + 1 << " " << t[2] + 1 << "\n";
    }
    if (!out) throw IoError("save_obj: write failed for " + path);
}

} // namespace nlos
