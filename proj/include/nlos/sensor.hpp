#pragma once

#include <cstdint>

#include "nlos/transient.hpp"

namespace nlos {

// Measurement simulation modes:
//   Plain       -> c * I                (scale only)
//   PoissonOnly -> Pois(c * I)          (shot noise, no dark counts)
//   Full        -> Pois(c * I + b)      (shot noise plus dark-count bias)
enum class SensorMode { Plain, PoissonOnly, Full };

std::string sensor_mode_to_string(SensorMode m);
SensorMode sensor_mode_from_string(const std::string& s);

struct AugmentationConfig {
    double c_min = 1e2;   // photons per unit intensity, log-uniform
    double c_max = 1e5;
    double b_min = 0.0;   // dark counts per bin, uniform
    double b_max = 5.0;
    SensorMode mode = SensorMode::Full;
    std::uint64_t seed = 0;

    void validate() const;
};

struct AugParams {
    double c = 1.0;
    double b = 0.0;
};

// Deterministic per (config.seed, sample_index).
AugParams sample_aug_params(const AugmentationConfig& config, std::uint64_t sample_index);

// Applies the sensor model. Poisson draws are keyed by (seed, voxel
// index), so the result is independent of iteration order. Input must be
// unitless and nonnegative; output carries count units.
TransientVolume apply_sensor(const TransientVolume& volume, double c, double b,
                             SensorMode mode, std::uint64_t seed);

// 10*log10(max(clean)^2 / mse). Returns +infinity when the volumes are
// identical.
double psnr(const TransientVolume& clean, const TransientVolume& degraded);

// Blockwise mean with factors in {1, 2, 4, 8} that divide the dims.
TransientVolume decimate(const TransientVolume& volume, int fx, int fy, int ft);

// Constant block upsampling (inverse layout of decimate; mean-preserving).
TransientVolume block_upsample(const TransientVolume& volume, int fx, int fy, int ft);

} // namespace nlos
