#include "nlos/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "nlos/common.hpp"

namespace nlos {

int diffusion_inpaint(Image& frame, const std::vector<std::uint8_t>& valid,
                      double residual_tol, int max_iterations) {
    const int w = frame.width, h = frame.height;
    Image next = frame;
    int iterations = 0;
    for (; iterations < max_iterations; ++iterations) {
        double residual = 0.0;
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const size_t i = static_cast<size_t>(y) * w + x;
                if (valid[i]) continue;
                double sum = 0.0;
                int n = 0;
                if (x > 0) { sum += frame.at(x - 1, y); ++n; }
                if (x + 1 < w) { sum += frame.at(x + 1, y); ++n; }
                if (y > 0) { sum += frame.at(x, y - 1); ++n; }
                if (y + 1 < h) { sum += frame.at(x, y + 1); ++n; }
                const float updated = static_cast<float>(sum / n);
                residual = std::max(residual, std::abs(static_cast<double>(updated) -
                                                       frame.values[i]));
                next.values[i] = updated;
            }
        }
        std::swap(frame.values, next.values);
        if (residual < residual_tol) {
            ++iterations;
            break;
        }
    }
    return iterations;
}

Image area_downsample(const Image& src, int out_w, int out_h) {
    if (out_w <= 0 || out_h <= 0) throw InputError("area_downsample: non-positive target");
    if (out_w > src.width || out_h > src.height) {
        throw InputError("area_downsample: target larger than source");
    }
    Image out(out_w, out_h);
    const double sx = static_cast<double>(src.width) / out_w;
    const double sy = static_cast<double>(src.height) / out_h;
    for (int oy = 0; oy < out_h; ++oy) {
        const double y0 = oy * sy, y1 = (oy + 1) * sy;
        for (int ox = 0; ox < out_w; ++ox) {
            const double x0 = ox * sx, x1 = (ox + 1) * sx;
            double acc = 0.0;
            for (int y = static_cast<int>(std::floor(y0)); y < std::ceil(y1); ++y) {
                const double wy = std::min<double>(y + 1, y1) - std::max<double>(y, y0);
                if (wy <= 0.0) continue;
                for (int x = static_cast<int>(std::floor(x0)); x < std::ceil(x1); ++x) {
                    const double wx = std::min<double>(x + 1, x1) - std::max<double>(x, x0);
                    if (wx <= 0.0) continue;
                    acc += wx * wy * src.at(std::min(x, src.width - 1), std::min(y, src.height - 1));
                }
            }
            out.at(ox, oy) = static_cast<float>(acc / (sx * sy));
        }
    }
    return out;
}

DepthMap ingest_depth_frame(const Image& frame, const IngestOptions& opt) {
    if (frame.empty()) throw IngestError("ingest_depth_frame: empty frame");
    if (!(opt.near < opt.far)) throw IngestError("ingest_depth_frame: requires near < far");

    std::vector<std::uint8_t> valid(frame.values.size());
    size_t valid_count = 0;
    double mean = 0.0;
    for (size_t i = 0; i < frame.values.size(); ++i) {
        if (frame.values[i] > 0.0f) {
            valid[i] = 1;
            mean += frame.values[i];
            ++valid_count;
        }
    }
    if (valid_count == 0) throw IngestError("ingest_depth_frame: frame entirely invalid");
    mean /= static_cast<double>(valid_count);

    Image filled = frame;
    if (valid_count < frame.values.size()) {
        for (size_t i = 0; i < filled.values.size(); ++i) {
            if (!valid[i]) filled.values[i] = static_cast<float>(mean);
        }
        diffusion_inpaint(filled, valid, opt.residual_tol, opt.max_iterations);
    }

    int crop = opt.crop > 0 ? opt.crop : std::min(frame.width, frame.height);
    crop = std::min({crop, frame.width, frame.height});
    if (crop < opt.target_res) throw IngestError("ingest_depth_frame: crop smaller than target");
    const int cx0 = (frame.width - crop) / 2;
    const int cy0 = (frame.height - crop) / 2;
    Image cropped(crop, crop);
    for (int y = 0; y < crop; ++y) {
        for (int x = 0; x < crop; ++x) {
            cropped.at(x, y) = filled.at(cx0 + x, cy0 + y);
        }
    }

    const Image small = area_downsample(cropped, opt.target_res, opt.target_res);

    std::vector<float> depth(small.values.size());
    const double span = opt.far - opt.near;
    for (size_t i = 0; i < depth.size(); ++i) {
        const double z = 1.0 - 2.0 * (small.values[i] - opt.near) / span;
        depth[i] = static_cast<float>(std::clamp(z, -1.0, 1.0));
    }
    return DepthMap(opt.target_res, opt.target_res, std::move(depth));
}

} // namespace nlos
