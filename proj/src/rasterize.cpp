#include "nlos/rasterize.hpp"

#include <algorithm>
#include <cmath>

#include "nlos/common.hpp"

namespace nlos {

DepthMap project_depth(const TriangleMesh& mesh, int width, int height) {
    if (width <= 0 || height <= 0) throw InputError("project_depth: non-positive resolution");
    std::vector<float> depth(static_cast<size_t>(width) * height, kBackgroundDepth);

    for (size_t t = 0; t < mesh.triangles.size(); ++t) {
        const Vec3 a = mesh.triangle_vertex(t, 0);
        const Vec3 b = mesh.triangle_vertex(t, 1);
        const Vec3 c = mesh.triangle_vertex(t, 2);

        const double area2 = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
        if (area2 == 0.0) continue; // edge-on to the projection axis

        // Pixel range covered by the xy bounding box.
        const double xmin = std::min({a.x, b.x, c.x});
        const double xmax = std::max({a.x, b.x, c.x});
        const double ymin = std::min({a.y, b.y, c.y});
        const double ymax = std::max({a.y, b.y, c.y});
        const int px0 = std::max(0, static_cast<int>(std::floor((xmin + 1.0) * 0.5 * width - 0.5)));
        const int px1 = std::min(width - 1, static_cast<int>(std::ceil((xmax + 1.0) * 0.5 * width - 0.5)));
        const int py0 = std::max(0, static_cast<int>(std::floor((ymin + 1.0) * 0.5 * height - 0.5)));
        const int py1 = std::min(height - 1, static_cast<int>(std::ceil((ymax + 1.0) * 0.5 * height - 0.5)));

        const double inv_area2 = 1.0 / area2;
        for (int py = py0; py <= py1; ++py) {
            const double y = grid_coord(py, height);
            for (int px = px0; px <= px1; ++px) {
                const double x = grid_coord(px, width);
                // Barycentric coordinates; boundary points count as covered.
                double w0 = ((b.x - a.x) * (y - a.y) - (x - a.x) * (b.y - a.y)) * inv_area2;
                double w1 = ((x - a.x) * (c.y - a.y) - (c.x - a.x) * (y - a.y)) * inv_area2;
                const double w2 = 1.0 - w0 - w1;
                if (w0 < 0.0 || w1 < 0.0 || w2 < 0.0) continue;
                const double z = a.z * w2 + b.z * w1 + c.z * w0;
                float& d = depth[static_cast<size_t>(py) * width + px];
                d = std::max(d, static_cast<float>(z));
            }
        }
    }
    return DepthMap(width, height, std::move(depth));
}

TriangleMesh triangulate_depth(const DepthMap& depth, double skirt_threshold, float albedo) {
    TriangleMesh mesh;
    const int w = depth.width();
    const int h = depth.height();
    if (w < 2 || h < 2) return mesh;

    // Vertex index per foreground pixel, built lazily.
    std::vector<std::int64_t> vid(static_cast<size_t>(w) * h, -1);
    auto vertex_for = [&](int x, int y) -> std::uint32_t {
        std::int64_t& id = vid[static_cast<size_t>(y) * w + x];
        if (id < 0) {
            id = static_cast<std::int64_t>(mesh.vertices.size());
            mesh.vertices.push_back({grid_coord(x, w), grid_coord(y, h), depth.at(x, y)});
        }
        return static_cast<std::uint32_t>(id);
    };

    for (int y = 0; y + 1 < h; ++y) {
        for (int x = 0; x + 1 < w; ++x) {
            const float d00 = depth.at(x, y);
            const float d10 = depth.at(x + 1, y);
            const float d01 = depth.at(x, y + 1);
            const float d11 = depth.at(x + 1, y + 1);
            if (d00 <= kBackgroundDepth || d10 <= kBackgroundDepth ||
                d01 <= kBackgroundDepth || d11 <= kBackgroundDepth) {
                continue;
            }
            const float lo = std::min(std::min(d00, d10), std::min(d01, d11));
            const float hi = std::max(std::max(d00, d10), std::max(d01, d11));
            if (hi - lo > skirt_threshold) continue; // silhouette jump, no skirt
            const std::uint32_t v00 = vertex_for(x, y);
            const std::uint32_t v10 = vertex_for(x + 1, y);
            const std::uint32_t v01 = vertex_for(x, y + 1);
            const std::uint32_t v11 = vertex_for(x + 1, y + 1);
            // CCW in xy so normals face +z (toward the wall).
            mesh.triangles.push_back({v00, v10, v11});
            mesh.triangles.push_back({v00, v11, v01});
            mesh.albedo.push_back(albedo);
            mesh.albedo.push_back(albedo);
        }
    }
    return mesh;
}

} // namespace nlos
