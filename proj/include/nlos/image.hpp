#pragma once

#include <string>
#include <vector>

namespace nlos {

// Plain 2D float grid, row-major. Used for error maps, projections and
// raw depth frames; carries no range invariant (unlike DepthMap).
struct Image {
    int width = 0;
    int height = 0;
    std::vector<float> values;

    Image() = default;
    Image(int w, int h, float fill = 0.0f)
        : width(w), height(h), values(static_cast<size_t>(w) * h, fill) {}

    float& at(int x, int y) { return values[static_cast<size_t>(y) * width + x]; }
    float at(int x, int y) const { return values[static_cast<size_t>(y) * width + x]; }
    bool empty() const { return values.empty(); }
};

// 8-bit binary PGM. Values are mapped linearly from [lo, hi] to [0, 255].
void save_pgm(const Image& img, const std::string& path, float lo, float hi);

// PGM import; 8- or 16-bit P2/P5. Values returned as raw floats.
Image load_pgm(const std::string& path);

} // namespace nlos
