#include "nlos/metrics.hpp"

#include <cmath>

#include "nlos/common.hpp"

namespace nlos {

namespace {

void check_dims(const DepthMap& pred, const DepthMap& gt, const char* what) {
    if (pred.width() != gt.width() || pred.height() != gt.height()) {
        throw InputError(std::string(what) + ": dimension mismatch");
    }
}

} // namespace

ConfusionCounts classify(const DepthMap& pred, const DepthMap& gt, float eps) {
    check_dims(pred, gt, "classify");
    ConfusionCounts c;
    for (int y = 0; y < pred.height(); ++y) {
        for (int x = 0; x < pred.width(); ++x) {
            const bool pf = pred.is_foreground(x, y, eps);
            const bool gf = gt.is_foreground(x, y, eps);
            if (pf && gf) ++c.tp;
            else if (!pf && !gf) ++c.tn;
            else if (pf) ++c.fp;
            else ++c.fn;
        }
    }
    return c;
}

double accuracy(const ConfusionCounts& counts) {
    const std::int64_t total = counts.total();
    if (total <= 0) throw InputError("accuracy: empty confusion counts");
    return static_cast<double>(counts.tp + counts.tn) / static_cast<double>(total);
}

RmseResult rmse_tp(const DepthMap& pred, const DepthMap& gt, float eps) {
    check_dims(pred, gt, "rmse_tp");
    double acc = 0.0;
    std::int64_t tp = 0;
    for (int y = 0; y < pred.height(); ++y) {
        for (int x = 0; x < pred.width(); ++x) {
            if (pred.is_foreground(x, y, eps) && gt.is_foreground(x, y, eps)) {
                const double d = static_cast<double>(pred.at(x, y)) - gt.at(x, y);
                acc += d * d;
                ++tp;
            }
        }
    }
    RmseResult r;
    r.tp = tp;
    r.value = tp > 0 ? std::sqrt(acc / static_cast<double>(tp)) : 0.0;
    return r;
}

ErrorMap error_map(const DepthMap& pred, const DepthMap& gt, float eps) {
    check_dims(pred, gt, "error_map");
    ErrorMap em{Image(pred.width(), pred.height()), Image(pred.width(), pred.height())};
    for (int y = 0; y < pred.height(); ++y) {
        for (int x = 0; x < pred.width(); ++x) {
            const bool pf = pred.is_foreground(x, y, eps);
            const bool gf = gt.is_foreground(x, y, eps);
            if (pf && gf) {
                em.difference.at(x, y) = std::abs(pred.at(x, y) - gt.at(x, y));
            } else if (pf != gf) {
                em.mask.at(x, y) = 1.0f;
            }
        }
    }
    return em;
}

} // namespace nlos
