#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace nlos {

// Confocal scan description: a regular grid of wall sample points at
// z = wall_z spanning [-extent, extent]^2 (pixel centers), nt histogram
// bins of width dt_s. scale_m converts scene units to meters.
struct ScanConfig {
    int nx = 32;
    int ny = 32;
    double wall_z = 1.0;
    double extent = 1.0;
    int nt = 256;
    double dt_s = 16e-12;
    double scale_m = 0.15;
    double c_light = 299792458.0;

    double wall_x(int i) const { return -extent + 2.0 * extent * (i + 0.5) / nx; }
    double wall_y(int j) const { return -extent + 2.0 * extent * (j + 0.5) / ny; }

    // Seconds per round trip of one scene unit of distance.
    double seconds_per_unit() const { return 2.0 * scale_m / c_light; }

    // Requires the histogram to cover the round trip to the farthest
    // corner of [-1,1]^3 with one bin of splat margin.
    void validate() const;
};

enum class VolumeUnits { Unitless, Counts, Recon };

std::string units_to_string(VolumeUnits u);
VolumeUnits units_from_string(const std::string& s);

// Space-time histogram I(x, y, t). Payload is t-fastest, then x, then y.
struct TransientVolume {
    ScanConfig config;
    VolumeUnits units = VolumeUnits::Unitless;
    std::vector<float> values;

    TransientVolume() = default;
    TransientVolume(const ScanConfig& cfg, VolumeUnits u);

    size_t index(int x, int y, int t) const {
        return (static_cast<size_t>(y) * config.nx + x) * config.nt + t;
    }
    float& at(int x, int y, int t) { return values[index(x, y, t)]; }
    float at(int x, int y, int t) const { return values[index(x, y, t)]; }

    // Pointer to the nt-long histogram at wall sample (x, y).
    float* column(int x, int y) { return values.data() + index(x, y, 0); }
    const float* column(int x, int y) const { return values.data() + index(x, y, 0); }

    double sum() const;
    float max_value() const;

    bool same_dims(const TransientVolume& other) const {
        return config.nx == other.config.nx && config.ny == other.config.ny &&
               config.nt == other.config.nt;
    }

    // Finiteness, dims, nonnegativity for count data.
    void validate() const;
};

// Binary payload at `path`, JSON sidecar at `path + ".json"` holding
// {nx, ny, nt, dt_s, wall_z, extent, scale_m, units, dtype}.
void save_volume(const TransientVolume& volume, const std::string& path);
TransientVolume load_volume(const std::string& path);

} // namespace nlos
