#include "nlos/sensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nlos/common.hpp"
#include "nlos/rng.hpp"

namespace nlos {

std::string sensor_mode_to_string(SensorMode m) {
    switch (m) {
        case SensorMode::Plain: return "plain";
        case SensorMode::PoissonOnly: return "poisson";
        case SensorMode::Full: return "full";
    }
    return "full";
}

SensorMode sensor_mode_from_string(const std::string& s) {
    if (s == "plain") return SensorMode::Plain;
    if (s == "poisson" || s == "poisson_only") return SensorMode::PoissonOnly;
    if (s == "full") return SensorMode::Full;
    throw ParamError("unknown sensor mode '" + s + "'");
}

void AugmentationConfig::validate() const {
    if (!(c_min > 0.0) || c_min > c_max) {
        throw ParamError("AugmentationConfig: need 0 < c_min <= c_max");
    }
    if (b_min < 0.0 || b_min > b_max) {
        throw ParamError("AugmentationConfig: need 0 <= b_min <= b_max");
    }
}

AugParams sample_aug_params(const AugmentationConfig& config, std::uint64_t sample_index) {
    config.validate();
    Rng rng(config.seed, 0x5E4501 + sample_index);
    AugParams p;
    p.c = rng.log_uniform(config.c_min, config.c_max);
    p.b = rng.uniform(config.b_min, config.b_max);
    return p;
}

TransientVolume apply_sensor(const TransientVolume& volume, double c, double b,
                             SensorMode mode, std::uint64_t seed) {
    if (volume.units != VolumeUnits::Unitless) {
        throw InputError("apply_sensor: input must be a unitless rendering");
    }
    if (!(c > 0.0) || b < 0.0) throw InputError("apply_sensor: need c > 0 and b >= 0");
    for (float v : volume.values) {
        if (v < 0.0f) throw InputError("apply_sensor: negative input intensity");
    }

    TransientVolume out = volume;
    out.units = VolumeUnits::Counts;
    const size_t n = out.values.size();
    if (mode == SensorMode::Plain) {
        for (size_t i = 0; i < n; ++i) {
            out.values[i] = static_cast<float>(c * volume.values[i]);
        }
        return out;
    }
    const double bias = (mode == SensorMode::Full) ? b : 0.0;
    parallel_for(static_cast<std::int64_t>(n), [&](std::int64_t i) {
        const double lambda = c * volume.values[static_cast<size_t>(i)] + bias;
        Rng rng(seed, 0x9015501 + static_cast<std::uint64_t>(i));
        out.values[static_cast<size_t>(i)] =
            static_cast<float>(poisson_sample(lambda, rng));
    });
    return out;
}

double psnr(const TransientVolume& clean, const TransientVolume& degraded) {
    if (!clean.same_dims(degraded)) throw InputError("psnr: dimension mismatch");
    double peak = 0.0;
    for (float v : clean.values) peak = std::max(peak, static_cast<double>(v));
    if (peak <= 0.0) throw InputError("psnr: clean volume is all-zero");
    double mse = 0.0;
    for (size_t i = 0; i < clean.values.size(); ++i) {
        const double d = static_cast<double>(clean.values[i]) - degraded.values[i];
        mse += d * d;
    }
    mse /= static_cast<double>(clean.values.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(peak * peak / mse);
}

namespace {

void check_factor(int factor, int dim, const char* axis) {
    if (factor != 1 && factor != 2 && factor != 4 && factor != 8) {
        throw InputError(std::string("decimate: factor for ") + axis +
                         " must be one of {1, 2, 4, 8}");
    }
    if (dim % factor != 0) {
        throw InputError(std::string("decimate: factor does not divide the ") + axis +
                         " dimension");
    }
}

} // namespace

TransientVolume decimate(const TransientVolume& volume, int fx, int fy, int ft) {
    check_factor(fx, volume.config.nx, "x");
    check_factor(fy, volume.config.ny, "y");
    check_factor(ft, volume.config.nt, "t");
    ScanConfig cfg = volume.config;
    cfg.nx /= fx;
    cfg.ny /= fy;
    cfg.nt /= ft;
    cfg.dt_s *= ft;
    TransientVolume out(cfg, volume.units);
    const double inv = 1.0 / (static_cast<double>(fx) * fy * ft);
    for (int y = 0; y < cfg.ny; ++y) {
        for (int x = 0; x < cfg.nx; ++x) {
            for (int t = 0; t < cfg.nt; ++t) {
                double acc = 0.0;
                for (int dy = 0; dy < fy; ++dy) {
                    for (int dx = 0; dx < fx; ++dx) {
                        for (int dt = 0; dt < ft; ++dt) {
                            acc += volume.at(x * fx + dx, y * fy + dy, t * ft + dt);
                        }
                    }
                }
                out.at(x, y, t) = static_cast<float>(acc * inv);
            }
        }
    }
    return out;
}

TransientVolume block_upsample(const TransientVolume& volume, int fx, int fy, int ft) {
    if (fx < 1 || fy < 1 || ft < 1) throw InputError("block_upsample: factors must be >= 1");
    ScanConfig cfg = volume.config;
    cfg.nx *= fx;
    cfg.ny *= fy;
    cfg.nt *= ft;
    cfg.dt_s /= ft;
    TransientVolume out(cfg, volume.units);
    for (int y = 0; y < cfg.ny; ++y) {
        for (int x = 0; x < cfg.nx; ++x) {
            for (int t = 0; t < cfg.nt; ++t) {
                out.at(x, y, t) = volume.at(x / fx, y / fy, t / ft);
            }
        }
    }
    return out;
}

} // namespace nlos
