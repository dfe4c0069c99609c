#include "nlos/render.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nlos/common.hpp"

namespace nlos {

namespace {

constexpr int kMaxSubdivisionDepth = 4;

// Round-trip span across the vertices, in bins.
double span_bins(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& w,
                 const ScanConfig& cfg) {
    const double ra = norm(a - w);
    const double rb = norm(b - w);
    const double rc = norm(c - w);
    const double lo = std::min({ra, rb, rc});
    const double hi = std::max({ra, rb, rc});
    return (hi - lo) * cfg.seconds_per_unit() / cfg.dt_s;
}

template <typename Visitor>
void for_each_piece(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& w,
                    const ScanConfig& cfg, int depth, Visitor&& visit) {
    if (depth >= kMaxSubdivisionDepth || span_bins(a, b, c, w, cfg) <= 1.0) {
        visit(a, b, c);
        return;
    }
    const Vec3 ab = (a + b) * 0.5;
    const Vec3 bc = (b + c) * 0.5;
    const Vec3 ca = (c + a) * 0.5;
    for_each_piece(a, ab, ca, w, cfg, depth + 1, visit);
    for_each_piece(ab, b, bc, w, cfg, depth + 1, visit);
    for_each_piece(ca, bc, c, w, cfg, depth + 1, visit);
    for_each_piece(ab, bc, ca, w, cfg, depth + 1, visit);
}

} // namespace

std::vector<SubTriangle> subdivide_for_binning(const Vec3& a, const Vec3& b, const Vec3& c,
                                               const Vec3& wall_point,
                                               const ScanConfig& config) {
    std::vector<SubTriangle> pieces;
    for_each_piece(a, b, c, wall_point, config, 0,
                   [&](const Vec3& pa, const Vec3& pb, const Vec3& pc) {
                       pieces.push_back({pa, pb, pc});
                   });
    return pieces;
}

TransientVolume render_confocal(const TriangleMesh& mesh, const ScanConfig& config) {
    config.validate();
    mesh.validate();
    TransientVolume volume(config, VolumeUnits::Unitless);
    const int nt = config.nt;
    const double sec_per_unit = config.seconds_per_unit();
    const double inv_dt = 1.0 / config.dt_s;
    const double scale4 = std::pow(config.scale_m, 4.0);

    const std::int64_t columns = static_cast<std::int64_t>(config.nx) * config.ny;
    parallel_for(columns, [&](std::int64_t col) {
        const int ix = static_cast<int>(col % config.nx);
        const int iy = static_cast<int>(col / config.nx);
        const Vec3 w{config.wall_x(ix), config.wall_y(iy), config.wall_z};

        std::vector<double> hist(static_cast<size_t>(nt), 0.0);
        for (size_t tri = 0; tri < mesh.triangles.size(); ++tri) {
            const Vec3 n = mesh.normal(tri);
            const double rho = mesh.albedo[tri];
            for_each_piece(
                mesh.triangle_vertex(tri, 0), mesh.triangle_vertex(tri, 1),
                mesh.triangle_vertex(tri, 2), w, config, 0,
                [&](const Vec3& a, const Vec3& b, const Vec3& c) {
                    const Vec3 p = (a + b + c) * (1.0 / 3.0);
                    const Vec3 d = w - p;
                    const double r = norm(d);
                    if (r <= 0.0) return;
                    const double cos_p = dot(n, d) / r;
                    if (cos_p <= 0.0) return; // back-facing
                    const double cos_w = (config.wall_z - p.z) / r;
                    if (cos_w <= 0.0) return;
                    const double area = 0.5 * norm(cross(b - a, c - a));
                    const double fall = (cos_w * cos_p) * (cos_w * cos_p);
                    const double r_unit4 = (r * r) * (r * r);
                    const double energy = rho * area * fall / (r_unit4 * scale4);
                    const double u = r * sec_per_unit * inv_dt;
                    const int k0 = static_cast<int>(std::floor(u));
                    const double f = u - k0;
                    if (k0 < 0 || k0 >= nt || (f > 0.0 && k0 + 1 >= nt)) {
                        throw ConfigError("render_confocal: response of triangle " +
                                          std::to_string(tri) +
                                          " falls outside the time window");
                    }
                    hist[static_cast<size_t>(k0)] += energy * (1.0 - f);
                    if (f > 0.0) hist[static_cast<size_t>(k0) + 1] += energy * f;
                });
        }
        float* out = volume.column(ix, iy);
        for (int t = 0; t < nt; ++t) out[t] = static_cast<float>(hist[static_cast<size_t>(t)]);
    });
    return volume;
}

} // namespace nlos
