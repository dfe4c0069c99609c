#pragma once

#include "nlos/depth_map.hpp"
#include "nlos/image.hpp"

namespace nlos {

struct IngestOptions {
    double near = 0.5;      // native units mapped to z = +1
    double far = 4.0;       // native units mapped to z = -1 (background)
    int crop = 0;           // center crop side in source pixels; 0 = largest square
    int target_res = 64;
    double residual_tol = 1e-6;
    int max_iterations = 10000;
};

// RGB-D style frame ingestion: invalid pixels (<= 0) are filled by
// Laplace diffusion (Jacobi, Dirichlet at valid pixels), then a center
// square crop is area-averaged down to target_res and remapped linearly
// from [near, far] to [+1, -1].
DepthMap ingest_depth_frame(const Image& frame, const IngestOptions& opt);

// Jacobi fill used by ingestion; exposed for reuse on arbitrary grids.
// valid[i] != 0 marks Dirichlet pixels. Returns iterations used.
int diffusion_inpaint(Image& frame, const std::vector<std::uint8_t>& valid,
                      double residual_tol, int max_iterations);

// Box-filter area average onto an n x n grid (general fractional bins).
Image area_downsample(const Image& src, int out_w, int out_h);

} // namespace nlos
