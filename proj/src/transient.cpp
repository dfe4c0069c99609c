#include "nlos/transient.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "nlos/common.hpp"

namespace nlos {

void ScanConfig::validate() const {
    if (nx < 1 || ny < 1 || nt < 1) throw ConfigError("ScanConfig: grid dims must be >= 1");
    if (dt_s <= 0.0) throw ConfigError("ScanConfig: bin width must be positive");
    if (scale_m <= 0.0) throw ConfigError("ScanConfig: scene scale must be positive");
    if (extent <= 0.0) throw ConfigError("ScanConfig: scan extent must be positive");
    if (c_light <= 0.0) throw ConfigError("ScanConfig: speed of light must be positive");

    // Farthest bounding-volume corner from any wall sample.
    double max_d2 = 0.0;
    const double xs[2] = {wall_x(0), wall_x(nx - 1)};
    const double ys[2] = {wall_y(0), wall_y(ny - 1)};
    for (double wx : xs) {
        for (double wy : ys) {
            for (int corner = 0; corner < 8; ++corner) {
                const double cx = (corner & 1) ? 1.0 : -1.0;
                const double cy = (corner & 2) ? 1.0 : -1.0;
                const double cz = (corner & 4) ? 1.0 : -1.0;
                const double dx = cx - wx, dy = cy - wy, dz = cz - wall_z;
                max_d2 = std::max(max_d2, dx * dx + dy * dy + dz * dz);
            }
        }
    }
    const double round_trip_s = std::sqrt(max_d2) * seconds_per_unit();
    const double window_s = (nt - 1) * dt_s;
    if (round_trip_s > window_s) {
        const double max_scale = scale_m * window_s / round_trip_s;
        throw ConfigError("ScanConfig: time window too short for the bounding volume; "
                          "reduce scale_m to <= " + std::to_string(max_scale) +
                          " or increase nt");
    }
}

std::string units_to_string(VolumeUnits u) {
    switch (u) {
        case VolumeUnits::Unitless: return "unitless";
        case VolumeUnits::Counts: return "counts";
        case VolumeUnits::Recon: return "recon";
    }
    return "unitless";
}

VolumeUnits units_from_string(const std::string& s) {
    if (s == "unitless") return VolumeUnits::Unitless;
    if (s == "counts") return VolumeUnits::Counts;
    if (s == "recon") return VolumeUnits::Recon;
    throw IoError("unknown volume units tag '" + s + "'");
}

TransientVolume::TransientVolume(const ScanConfig& cfg, VolumeUnits u)
    : config(cfg), units(u),
      values(static_cast<size_t>(cfg.nx) * cfg.ny * cfg.nt, 0.0f) {}

double TransientVolume::sum() const {
    double acc = 0.0;
    for (float v : values) acc += v;
    return acc;
}

float TransientVolume::max_value() const {
    float m = 0.0f;
    for (float v : values) m = std::max(m, v);
    return m;
}

void TransientVolume::validate() const {
    const size_t expected = static_cast<size_t>(config.nx) * config.ny * config.nt;
    if (values.size() != expected) {
        throw InputError("TransientVolume: payload size does not match dims");
    }
    for (float v : values) {
        if (!std::isfinite(v)) throw InputError("TransientVolume: non-finite value");
        if (units == VolumeUnits::Counts && v < 0.0f) {
            throw InputError("TransientVolume: negative photon count");
        }
    }
}

void save_volume(const TransientVolume& volume, const std::string& path) {
    nlohmann::json header;
    header["nx"] = volume.config.nx;
    header["ny"] = volume.config.ny;
    header["nt"] = volume.config.nt;
    header["dt_s"] = volume.config.dt_s;
    header["wall_z"] = volume.config.wall_z;
    header["extent"] = volume.config.extent;
    header["scale_m"] = volume.config.scale_m;
    header["units"] = units_to_string(volume.units);
    header["dtype"] = "f32le";
    std::ofstream hdr(path + ".json");
    if (!hdr) throw IoError("save_volume: cannot open " + path + ".json");
    hdr << header.dump(2) << "\n";

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("save_volume: cannot open " + path);
    out.write(reinterpret_cast<const char*>(volume.values.data()),
              static_cast<std::streamsize>(volume.values.size() * sizeof(float)));
    if (!out) throw IoError("save_volume: write failed for " + path);
}

TransientVolume load_volume(const std::string& path) {
    std::ifstream hdr(path + ".json");
    if (!hdr) throw IoError("load_volume: missing sidecar " + path + ".json");
    nlohmann::json header;
    hdr >> header;
    if (header.at("dtype").get<std::string>() != "f32le") {
        throw IoError("load_volume: unsupported dtype in " + path + ".json");
    }
    TransientVolume volume;
    volume.config.nx = header.at("nx").get<int>();
    volume.config.ny = header.at("ny").get<int>();
    volume.config.nt = header.at("nt").get<int>();
    volume.config.dt_s = header.at("dt_s").get<double>();
    volume.config.wall_z = header.at("wall_z").get<double>();
    volume.config.extent = header.at("extent").get<double>();
    volume.config.scale_m = header.at("scale_m").get<double>();
    volume.units = units_from_string(header.at("units").get<std::string>());
    volume.values.resize(static_cast<size_t>(volume.config.nx) * volume.config.ny *
                         volume.config.nt);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("load_volume: cannot open " + path);
    in.read(reinterpret_cast<char*>(volume.values.data()),
            static_cast<std::streamsize>(volume.values.size() * sizeof(float)));
    if (!in) throw IoError("load_volume: truncated payload in " + path);
    return volume;
}

} // namespace nlos
