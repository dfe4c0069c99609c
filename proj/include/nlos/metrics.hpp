#pragma once

#include "nlos/depth_map.hpp"
#include "nlos/image.hpp"

namespace nlos {

struct ConfusionCounts {
    std::int64_t tp = 0;
    std::int64_t tn = 0;
    std::int64_t fp = 0;
    std::int64_t fn = 0;

    std::int64_t total() const { return tp + tn + fp + fn; }
};

// A pixel is foreground iff depth > -1 + eps, in both maps.
ConfusionCounts classify(const DepthMap& pred, const DepthMap& gt, float eps);

// (TP + TN) / total.
double accuracy(const ConfusionCounts& counts);

struct RmseResult {
    double value = 0.0;
    std::int64_t tp = 0;

    bool defined() const { return tp > 0; }
};

// Root-mean-square depth error over true-positive pixels. Undefined
// (tp = 0) when the maps share no foreground.
RmseResult rmse_tp(const DepthMap& pred, const DepthMap& gt, float eps);

// Per-pixel |pred - gt| over true positives, plus a mask flagging FP/FN
// pixels.
struct ErrorMap {
    Image difference;
    Image mask;
};

ErrorMap error_map(const DepthMap& pred, const DepthMap& gt, float eps);

} // namespace nlos
