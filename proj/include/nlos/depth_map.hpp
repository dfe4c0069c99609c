#pragma once

#include <string>
#include <vector>

#include "nlos/image.hpp"

namespace nlos {

// Background depth value. Range convention: -1 is the background plane,
// values in (-1, 1] are foreground geometry, larger z is closer to the
// wall.
inline constexpr float kBackgroundDepth = -1.0f;

// 2D grid of normalized range values in [-1, 1], row-major. The range
// invariant is enforced on construction.
class DepthMap {
  public:
    DepthMap() = default;
    DepthMap(int width, int height, float fill = kBackgroundDepth);
    DepthMap(int width, int height, std::vector<float> values);

    int width() const { return width_; }
    int height() const { return height_; }
    size_t size() const { return values_.size(); }

    float& at(int x, int y) { return values_[static_cast<size_t>(y) * width_ + x]; }
    float at(int x, int y) const { return values_[static_cast<size_t>(y) * width_ + x]; }

    const std::vector<float>& values() const { return values_; }
    std::vector<float>& values() { return values_; }

    bool is_foreground(int x, int y, float eps) const {
        return at(x, y) > kBackgroundDepth + eps;
    }

    // Throws InputError if any value is outside [-1, 1] or not finite.
    void validate() const;

  private:
    int width_ = 0;
    int height_ = 0;
    std::vector<float> values_;
};

// Binary container: payload at `path` (row-major f32le), JSON sidecar
// header at `path + ".json"` with {width, height, dtype}.
void save_depth_map(const DepthMap& map, const std::string& path);
DepthMap load_depth_map(const std::string& path);

// Portable float map export (PFM, grayscale, little-endian).
void save_depth_pfm(const DepthMap& map, const std::string& path);

// 8-bit preview: [-1, 1] mapped linearly to [0, 255].
void save_depth_pgm(const DepthMap& map, const std::string& path);

} // namespace nlos
