#include "nlos/primitives.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "nlos/common.hpp"

namespace nlos {

PrimitiveKind primitive_kind_from_string(const std::string& name) {
    if (name == "plane") return PrimitiveKind::Plane;
    if (name == "circle") return PrimitiveKind::Circle;
    if (name == "triangle") return PrimitiveKind::Triangle;
    if (name == "rectangle") return PrimitiveKind::Rectangle;
    if (name == "letter") return PrimitiveKind::Letter;
    throw ParamError("unknown primitive kind '" + name + "'");
}

namespace {

using Point = std::pair<double, double>;

double signed_area(const std::vector<Point>& poly) {
    double acc = 0.0;
    for (size_t i = 0; i < poly.size(); ++i) {
        const Point& a = poly[i];
        const Point& b = poly[(i + 1) % poly.size()];
        acc += a.first * b.second - b.first * a.second;
    }
    return 0.5 * acc;
}

double cross2(const Point& o, const Point& a, const Point& b) {
    return (a.first - o.first) * (b.second - o.second) -
           (a.second - o.second) * (b.first - o.first);
}

// Boundary counts as inside; keeps ears away from vertices that touch
// the candidate triangle's edges.
bool point_in_triangle(const Point& p, const Point& a, const Point& b, const Point& c) {
    const double d1 = cross2(a, b, p);
    const double d2 = cross2(b, c, p);
    const double d3 = cross2(c, a, p);
    const bool has_neg = d1 < 0.0 || d2 < 0.0 || d3 < 0.0;
    const bool has_pos = d1 > 0.0 || d2 > 0.0 || d3 > 0.0;
    return !(has_neg && has_pos);
}

TriangleMesh rectangle_mesh(double x0, double y0, double x1, double y1, float albedo) {
    TriangleMesh mesh;
    mesh.vertices = {{x0, y0, 0.0}, {x1, y0, 0.0}, {x1, y1, 0.0}, {x0, y1, 0.0}};
    mesh.triangles = {{0, 1, 2}, {0, 2, 3}};
    mesh.albedo = {albedo, albedo};
    return mesh;
}

// Blocky glyph outlines on a 3x5 grid, y up, single contour each.
const std::map<char, std::vector<Point>>& glyph_outlines() {
    static const std::map<char, std::vector<Point>> glyphs = {
        {'C', {{0, 0}, {3, 0}, {3, 1}, {1, 1}, {1, 4}, {3, 4}, {3, 5}, {0, 5}}},
        {'E', {{0, 0}, {3, 0}, {3, 1}, {1, 1}, {1, 2}, {3, 2}, {3, 3}, {1, 3},
               {1, 4}, {3, 4}, {3, 5}, {0, 5}}},
        {'F', {{0, 0}, {1, 0}, {1, 2}, {3, 2}, {3, 3}, {1, 3}, {1, 4}, {3, 4},
               {3, 5}, {0, 5}}},
        {'H', {{0, 0}, {1, 0}, {1, 2}, {2, 2}, {2, 0}, {3, 0}, {3, 5}, {2, 5},
               {2, 3}, {1, 3}, {1, 5}, {0, 5}}},
        {'I', {{1, 0}, {2, 0}, {2, 5}, {1, 5}}},
        {'L', {{0, 0}, {3, 0}, {3, 1}, {1, 1}, {1, 5}, {0, 5}}},
        {'S', {{0, 0}, {3, 0}, {3, 3}, {1, 3}, {1, 4}, {3, 4}, {3, 5}, {0, 5},
               {0, 2}, {2, 2}, {2, 1}, {0, 1}}},
        {'T', {{1, 0}, {2, 0}, {2, 4}, {3, 4}, {3, 5}, {0, 5}, {0, 4}, {1, 4}}},
        {'U', {{0, 0}, {3, 0}, {3, 5}, {2, 5}, {2, 1}, {1, 1}, {1, 5}, {0, 5}}},
    };
    return glyphs;
}

} // namespace

const std::vector<char>& letter_set() {
    static const std::vector<char> letters = []() {
        std::vector<char> v;
        for (const auto& [ch, poly] : glyph_outlines()) v.push_back(ch);
        return v;
    }();
    return letters;
}

TriangleMesh triangulate_polygon(const std::vector<Point>& polygon, float albedo) {
    if (polygon.size() < 3) throw ParamError("triangulate_polygon: fewer than 3 vertices");
    std::vector<Point> poly = polygon;
    if (signed_area(poly) < 0.0) std::reverse(poly.begin(), poly.end());

    std::vector<size_t> idx(poly.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;

    TriangleMesh mesh;
    for (const Point& p : poly) mesh.vertices.push_back({p.first, p.second, 0.0});

    auto emit = [&](size_t a, size_t b, size_t c) {
        mesh.triangles.push_back({static_cast<std::uint32_t>(a),
                                  static_cast<std::uint32_t>(b),
                                  static_cast<std::uint32_t>(c)});
        mesh.albedo.push_back(albedo);
    };

    size_t guard = 0;
    const size_t guard_max = poly.size() * poly.size() + 16;
    while (idx.size() > 3) {
        if (++guard > guard_max) throw ParamError("triangulate_polygon: not a simple polygon");
        bool clipped = false;
        for (size_t i = 0; i < idx.size(); ++i) {
            const size_t ip = idx[(i + idx.size() - 1) % idx.size()];
            const size_t ic = idx[i];
            const size_t in = idx[(i + 1) % idx.size()];
            const Point& a = poly[ip];
            const Point& b = poly[ic];
            const Point& c = poly[in];
            if (cross2(a, b, c) <= 0.0) continue; // reflex or collinear corner
            bool blocked = false;
            for (size_t other : idx) {
                if (other == ip || other == ic || other == in) continue;
                if (point_in_triangle(poly[other], a, b, c)) {
                    blocked = true;
                    break;
                }
            }
            if (blocked) continue;
            emit(ip, ic, in);
            idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(i));
            clipped = true;
            break;
        }
        if (!clipped) throw ParamError("triangulate_polygon: no ear found (self-intersecting?)");
    }
    emit(idx[0], idx[1], idx[2]);
    mesh.validate();
    return mesh;
}

TriangleMesh make_primitive(PrimitiveKind kind, const PrimitiveParams& params) {
    if (!(params.albedo > 0.0f && params.albedo <= 1.0f)) {
        throw ParamError("make_primitive: albedo must be in (0, 1]");
    }
    switch (kind) {
        case PrimitiveKind::Plane:
            return rectangle_mesh(-1.0, -1.0, 1.0, 1.0, params.albedo);
        case PrimitiveKind::Rectangle: {
            if (params.width <= 0.0 || params.height <= 0.0) {
                throw ParamError("make_primitive: rectangle sides must be positive");
            }
            const double hw = 0.5 * params.width, hh = 0.5 * params.height;
            return rectangle_mesh(-hw, -hh, hw, hh, params.albedo);
        }
        case PrimitiveKind::Triangle: {
            if (params.base <= 0.0 || params.height <= 0.0) {
                throw ParamError("make_primitive: triangle base/height must be positive");
            }
            const double hb = 0.5 * params.base, hh = 0.5 * params.height;
            TriangleMesh mesh;
            mesh.vertices = {{-hb, -hh, 0.0}, {hb, -hh, 0.0}, {0.0, hh, 0.0}};
            mesh.triangles = {{0, 1, 2}};
            mesh.albedo = {params.albedo};
            return mesh;
        }
        case PrimitiveKind::Circle: {
            if (params.segments < 3) throw ParamError("make_primitive: circle needs >= 3 segments");
            if (params.radius <= 0.0) throw ParamError("make_primitive: circle radius must be positive");
            TriangleMesh mesh;
            mesh.vertices.push_back({0.0, 0.0, 0.0});
            for (int i = 0; i < params.segments; ++i) {
                const double a = 2.0 * 3.14159265358979323846 * i / params.segments;
                mesh.vertices.push_back(
                    {params.radius * std::cos(a), params.radius * std::sin(a), 0.0});
            }
            for (int i = 0; i < params.segments; ++i) {
                const std::uint32_t j = static_cast<std::uint32_t>(i) + 1;
                const std::uint32_t next = static_cast<std::uint32_t>((i + 1) % params.segments) + 1;
                mesh.triangles.push_back({0, j, next});
                mesh.albedo.push_back(params.albedo);
            }
            return mesh;
        }
        case PrimitiveKind::Letter: {
            const auto& glyphs = glyph_outlines();
            const auto it = glyphs.find(params.letter);
            if (it == glyphs.end()) {
                throw ParamError(std::string("make_primitive: no glyph for letter '") +
                                 params.letter + "'");
            }
            // Grid is 3x5; scale so the tallest dimension is one unit.
            std::vector<Point> pts;
            pts.reserve(it->second.size());
            for (const Point& p : it->second) {
                pts.push_back({(p.first - 1.5) / 5.0, (p.second - 2.5) / 5.0});
            }
            return triangulate_polygon(pts, params.albedo);
        }
    }
    throw ParamError("make_primitive: unknown kind");
}

} // namespace nlos
