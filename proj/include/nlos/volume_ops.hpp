#pragma once

#include <string>

#include "nlos/depth_map.hpp"
#include "nlos/image.hpp"
#include "nlos/transient.hpp"

namespace nlos {

// Volumetric reconstruction over the hidden bounding volume [-1,1]^3,
// voxel centers on a regular grid. Values are stored z-fastest, then x,
// then y, so each (x, y) ray is contiguous.
struct ReconVolume {
    int nx = 0, ny = 0, nz = 0;
    std::vector<float> values;

    ReconVolume() = default;
    ReconVolume(int nx_, int ny_, int nz_)
        : nx(nx_), ny(ny_), nz(nz_),
          values(static_cast<size_t>(nx_) * ny_ * nz_, 0.0f) {}

    size_t index(int x, int y, int z) const {
        return (static_cast<size_t>(y) * nx + x) * nz + z;
    }
    float& at(int x, int y, int z) { return values[index(x, y, z)]; }
    float at(int x, int y, int z) const { return values[index(x, y, z)]; }

    double pitch_x() const { return 2.0 / nx; }
    double pitch_y() const { return 2.0 / ny; }
    double pitch_z() const { return 2.0 / nz; }

    double voxel_x(int i) const { return -1.0 + 2.0 * (i + 0.5) / nx; }
    double voxel_y(int j) const { return -1.0 + 2.0 * (j + 0.5) / ny; }
    double voxel_z(int k) const { return -1.0 + 2.0 * (k + 0.5) / nz; }
};

// Backprojection baseline: every voxel accumulates, over all wall
// samples, the histogram value at the round-trip bin for its distance,
// with linear interpolation between bins.
ReconVolume backproject(const TransientVolume& volume, int nx, int ny, int nz);

// Per-ray maximum along one axis (0 = x, 1 = y, 2 = z). Collapsing z
// yields an (x, y) image; collapsing x yields (y, z); collapsing y
// yields (x, z).
Image max_intensity_projection(const ReconVolume& recon, int axis);

// Zeroes bins outside [t0, t1); dims preserved.
TransientVolume temporal_window(const TransientVolume& volume, int t0, int t1);

// 5-point discrete Laplacian with zero-padded borders.
Image laplacian_filter(const Image& image);

// mask = image >= fraction * max(image).
Image threshold_mask(const Image& image, double fraction = 0.30);

// Per (x, y) ray: foreground iff the ray max reaches fraction of the
// global max; depth is then the argmax voxel's z (smallest index wins
// ties).
DepthMap extract_depth(const ReconVolume& recon, double fraction = 0.30);

// Same container format as TransientVolume with the "recon" units tag;
// nt carries nz.
void save_recon(const ReconVolume& recon, const std::string& path);
ReconVolume load_recon(const std::string& path);

} // namespace nlos
