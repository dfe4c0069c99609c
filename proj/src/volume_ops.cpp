#include "nlos/volume_ops.hpp"

#include <algorithm>
#include <cmath>

#include "nlos/common.hpp"

namespace nlos {

ReconVolume backproject(const TransientVolume& volume, int nx, int ny, int nz) {
    if (nx < 1 || ny < 1 || nz < 1) throw ConfigError("backproject: grid dims must be >= 1");
    const ScanConfig& cfg = volume.config;
    if (cfg.dt_s <= 0.0 || cfg.scale_m <= 0.0 || cfg.nt < 1) {
        throw ConfigError("backproject: invalid scan metadata");
    }
    ReconVolume recon(nx, ny, nz);

    // Wall sample positions, flattened once.
    std::vector<double> wx(static_cast<size_t>(cfg.nx)), wy(static_cast<size_t>(cfg.ny));
    for (int i = 0; i < cfg.nx; ++i) wx[static_cast<size_t>(i)] = cfg.wall_x(i);
    for (int j = 0; j < cfg.ny; ++j) wy[static_cast<size_t>(j)] = cfg.wall_y(j);

    const double bins_per_unit = cfg.seconds_per_unit() / cfg.dt_s;

    // The whole voxel grid must fall inside the histogram window.
    {
        double max_d2 = 0.0;
        const double vx[2] = {recon.voxel_x(0), recon.voxel_x(nx - 1)};
        const double vy[2] = {recon.voxel_y(0), recon.voxel_y(ny - 1)};
        const double vz[2] = {recon.voxel_z(0), recon.voxel_z(nz - 1)};
        for (double cx : vx) {
            for (double cy : vy) {
                for (double cz : vz) {
                    for (int i = 0; i < 2; ++i) {
                        for (int j = 0; j < 2; ++j) {
                            const double dx = cx - wx[static_cast<size_t>(i * (cfg.nx - 1))];
                            const double dy = cy - wy[static_cast<size_t>(j * (cfg.ny - 1))];
                            const double dz = cz - cfg.wall_z;
                            max_d2 = std::max(max_d2, dx * dx + dy * dy + dz * dz);
                        }
                    }
                }
            }
        }
        if (std::sqrt(max_d2) * bins_per_unit > cfg.nt - 1) {
            throw ConfigError("backproject: voxel grid falls outside the time window");
        }
    }

    parallel_for(static_cast<std::int64_t>(nx) * ny, [&](std::int64_t ray) {
        const int ix = static_cast<int>(ray % nx);
        const int iy = static_cast<int>(ray / nx);
        const double px = recon.voxel_x(ix);
        const double py = recon.voxel_y(iy);
        float* out = recon.values.data() + recon.index(ix, iy, 0);
        for (int iz = 0; iz < nz; ++iz) {
            const double pz = recon.voxel_z(iz);
            double acc = 0.0;
            for (int j = 0; j < cfg.ny; ++j) {
                const double dy = wy[static_cast<size_t>(j)] - py;
                for (int i = 0; i < cfg.nx; ++i) {
                    const double dx = wx[static_cast<size_t>(i)] - px;
                    const double dz = cfg.wall_z - pz;
                    const double r = std::sqrt(dx * dx + dy * dy + dz * dz);
                    const double u = r * bins_per_unit;
                    const int k0 = static_cast<int>(u);
                    const double f = u - k0;
                    const float* col = volume.column(i, j);
                    acc += (1.0 - f) * col[k0];
                    if (k0 + 1 < cfg.nt) acc += f * col[k0 + 1];
                }
            }
            out[iz] = static_cast<float>(acc);
        }
    });
    return recon;
}

Image max_intensity_projection(const ReconVolume& recon, int axis) {
    if (axis < 0 || axis > 2) throw InputError("max_intensity_projection: axis must be 0..2");
    if (recon.values.empty()) throw InputError("max_intensity_projection: empty volume");
    auto reduce = [&](int w, int h, auto&& value) {
        Image img(w, h);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) img.at(x, y) = value(x, y);
        }
        return img;
    };
    if (axis == 2) {
        return reduce(recon.nx, recon.ny, [&](int x, int y) {
            float m = recon.at(x, y, 0);
            for (int z = 1; z < recon.nz; ++z) m = std::max(m, recon.at(x, y, z));
            return m;
        });
    }
    if (axis == 0) {
        return reduce(recon.ny, recon.nz, [&](int y, int z) {
            float m = recon.at(0, y, z);
            for (int x = 1; x < recon.nx; ++x) m = std::max(m, recon.at(x, y, z));
            return m;
        });
    }
    return reduce(recon.nx, recon.nz, [&](int x, int z) {
        float m = recon.at(x, 0, z);
        for (int y = 1; y < recon.ny; ++y) m = std::max(m, recon.at(x, y, z));
        return m;
    });
}

TransientVolume temporal_window(const TransientVolume& volume, int t0, int t1) {
    if (t0 < 0 || t0 >= t1 || t1 > volume.config.nt) {
        throw InputError("temporal_window: need 0 <= t0 < t1 <= nt");
    }
    TransientVolume out = volume;
    for (int y = 0; y < volume.config.ny; ++y) {
        for (int x = 0; x < volume.config.nx; ++x) {
            float* col = out.column(x, y);
            for (int t = 0; t < t0; ++t) col[t] = 0.0f;
            for (int t = t1; t < volume.config.nt; ++t) col[t] = 0.0f;
        }
    }
    return out;
}

Image laplacian_filter(const Image& image) {
    if (image.width < 3 || image.height < 3) {
        throw InputError("laplacian_filter: image must be at least 3x3");
    }
    Image out(image.width, image.height);
    auto sample = [&](int x, int y) -> float {
        if (x < 0 || y < 0 || x >= image.width || y >= image.height) return 0.0f;
        return image.at(x, y);
    };
    for (int y = 0; y < image.height; ++y) {
        for (int x = 0; x < image.width; ++x) {
            out.at(x, y) = sample(x - 1, y) + sample(x + 1, y) + sample(x, y - 1) +
                           sample(x, y + 1) - 4.0f * image.at(x, y);
        }
    }
    return out;
}

Image threshold_mask(const Image& image, double fraction) {
    if (!(fraction > 0.0 && fraction < 1.0)) {
        throw InputError("threshold_mask: fraction must be in (0, 1)");
    }
    float peak = 0.0f;
    for (float v : image.values) peak = std::max(peak, v);
    Image mask(image.width, image.height);
    if (peak <= 0.0f) return mask; // all-zero image: empty mask
    const float cut = static_cast<float>(fraction) * peak;
    for (size_t i = 0; i < image.values.size(); ++i) {
        mask.values[i] = image.values[i] >= cut ? 1.0f : 0.0f;
    }
    return mask;
}

DepthMap extract_depth(const ReconVolume& recon, double fraction) {
    if (recon.values.empty()) return DepthMap(recon.nx, recon.ny);
    float global_max = 0.0f;
    for (float v : recon.values) global_max = std::max(global_max, v);
    DepthMap depth(recon.nx, recon.ny);
    if (global_max <= 0.0f) return depth;
    const float cut = static_cast<float>(fraction) * global_max;
    for (int y = 0; y < recon.ny; ++y) {
        for (int x = 0; x < recon.nx; ++x) {
            const float* ray = recon.values.data() + recon.index(x, y, 0);
            int argmax = 0;
            float best = ray[0];
            for (int z = 1; z < recon.nz; ++z) {
                if (ray[z] > best) {
                    best = ray[z];
                    argmax = z;
                }
            }
            if (best >= cut) {
                depth.at(x, y) = static_cast<float>(recon.voxel_z(argmax));
            }
        }
    }
    return depth;
}

void save_recon(const ReconVolume& recon, const std::string& path) {
    TransientVolume wrapper;
    wrapper.config.nx = recon.nx;
    wrapper.config.ny = recon.ny;
    wrapper.config.nt = recon.nz;
    wrapper.config.dt_s = 1.0;
    wrapper.config.wall_z = 1.0;
    wrapper.config.extent = 1.0;
    wrapper.config.scale_m = 1.0;
    wrapper.units = VolumeUnits::Recon;
    wrapper.values = recon.values;
    save_volume(wrapper, path);
}

ReconVolume load_recon(const std::string& path) {
    const TransientVolume wrapper = load_volume(path);
    if (wrapper.units != VolumeUnits::Recon) {
        throw IoError("load_recon: volume is not tagged as a reconstruction");
    }
    ReconVolume recon(wrapper.config.nx, wrapper.config.ny, wrapper.config.nt);
    recon.values = wrapper.values;
    return recon;
}

} // namespace nlos
