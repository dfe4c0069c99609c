#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "nlos/common.hpp"
#include "nlos/metrics.hpp"
#include "nlos/rng.hpp"

using namespace nlos;

namespace {

DepthMap random_map(int res, Rng& rng, double fg_prob) {
    DepthMap map(res, res);
    for (int y = 0; y < res; ++y) {
        for (int x = 0; x < res; ++x) {
            if (rng.next_double() < fg_prob) {
                map.at(x, y) = static_cast<float>(2.0 * rng.next_double() - 1.0);
            }
        }
    }
    return map;
}

// Exhaustive per-pixel enumeration, kept deliberately separate from the
// library implementation.
struct OracleResult {
    std::int64_t tp = 0, tn = 0, fp = 0, fn = 0;
    double rmse = 0.0;
    bool rmse_defined = false;
};

OracleResult oracle(const DepthMap& pred, const DepthMap& gt, float eps) {
    OracleResult r;
    double acc = 0.0;
    for (int y = 0; y < pred.height(); ++y) {
        for (int x = 0; x < pred.width(); ++x) {
            const bool pf = pred.at(x, y) > -1.0f + eps;
            const bool gf = gt.at(x, y) > -1.0f + eps;
            if (pf && gf) {
                ++r.tp;
                const double d = static_cast<double>(pred.at(x, y)) - gt.at(x, y);
                acc += d * d;
            } else if (!pf && !gf) {
                ++r.tn;
            } else if (pf) {
                ++r.fp;
            } else {
                ++r.fn;
            }
        }
    }
    if (r.tp > 0) {
        r.rmse = std::sqrt(acc / static_cast<double>(r.tp));
        r.rmse_defined = true;
    }
    return r;
}

} // namespace

TEST_CASE("classification against itself is perfect") {
    Rng rng(1);
    const DepthMap map = random_map(16, rng, 0.4);
    const ConfusionCounts c = classify(map, map, 0.05f);
    CHECK(c.fp == 0);
    CHECK(c.fn == 0);
    CHECK(accuracy(c) == 1.0);
    const RmseResult r = rmse_tp(map, map, 0.05f);
    CHECK(r.value == 0.0);
}

TEST_CASE("all-background prediction counts every gt pixel as missed") {
    const int n = 16;
    DepthMap bg(n, n);
    DepthMap fg(n, n, 0.25f);
    const ConfusionCounts c = classify(bg, fg, 0.05f);
    CHECK(c.fn == n * n);
    CHECK(c.tp == 0);
    const RmseResult r = rmse_tp(bg, fg, 0.05f);
    CHECK_FALSE(r.defined());
}

TEST_CASE("accuracy formula") {
    ConfusionCounts c;
    c.tp = 3;
    c.tn = 5;
    c.fp = 1;
    c.fn = 1;
    CHECK(accuracy(c) == doctest::Approx(0.8));
    CHECK_THROWS_AS(accuracy(ConfusionCounts{}), InputError);
}

TEST_CASE("uniform offset rmse") {
    const int n = 8;
    DepthMap gt(n, n, 0.2f);
    DepthMap pred(n, n, 0.3f);
    const RmseResult r = rmse_tp(pred, gt, 0.05f);
    CHECK(r.tp == n * n);
    CHECK(r.value == doctest::Approx(0.1).epsilon(1e-5));
}

TEST_CASE("counts, rmse and error maps match exhaustive enumeration") {
    Rng rng(42);
    for (int trial = 0; trial < 100; ++trial) {
        const DepthMap pred = random_map(16, rng, 0.3 + 0.4 * rng.next_double());
        const DepthMap gt = random_map(16, rng, 0.3 + 0.4 * rng.next_double());
        const float eps = 0.05f;
        const OracleResult want = oracle(pred, gt, eps);
        const ConfusionCounts got = classify(pred, gt, eps);
        CHECK(got.tp == want.tp);
        CHECK(got.tn == want.tn);
        CHECK(got.fp == want.fp);
        CHECK(got.fn == want.fn);
        CHECK(got.total() == 16 * 16);

        const RmseResult r = rmse_tp(pred, gt, eps);
        CHECK(r.defined() == want.rmse_defined);
        if (want.rmse_defined) CHECK(r.value == doctest::Approx(want.rmse).epsilon(1e-9));

        const ErrorMap em = error_map(pred, gt, eps);
        for (int y = 0; y < 16; ++y) {
            for (int x = 0; x < 16; ++x) {
                const bool pf = pred.at(x, y) > -1.0f + eps;
                const bool gf = gt.at(x, y) > -1.0f + eps;
                if (pf && gf) {
                    CHECK(em.difference.at(x, y) ==
                          doctest::Approx(std::abs(pred.at(x, y) - gt.at(x, y))));
                    CHECK(em.mask.at(x, y) == 0.0f);
                } else if (pf != gf) {
                    CHECK(em.mask.at(x, y) == 1.0f);
                    CHECK(em.difference.at(x, y) == 0.0f);
                } else {
                    CHECK(em.mask.at(x, y) == 0.0f);
                }
            }
        }
    }
}

TEST_CASE("one false positive flags one mask pixel") {
    DepthMap gt(8, 8);
    DepthMap pred(8, 8);
    pred.at(3, 4) = 0.5f;
    const ErrorMap em = error_map(pred, gt, 0.05f);
    int set = 0;
    for (float v : em.mask.values) set += v > 0.0f ? 1 : 0;
    CHECK(set == 1);
    CHECK(em.mask.at(3, 4) == 1.0f);
}

TEST_CASE("metrics are invariant under joint pixel permutation") {
    Rng rng(17);
    const int n = 12;
    const DepthMap pred = random_map(n, rng, 0.5);
    const DepthMap gt = random_map(n, rng, 0.5);

    // build a permuted copy of both maps with the same shuffle
    std::vector<int> perm(static_cast<size_t>(n) * n);
    for (size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
    for (size_t i = perm.size(); i > 1; --i) {
        std::swap(perm[i - 1], perm[rng.next_below(i)]);
    }
    std::vector<float> pv(perm.size()), gv(perm.size());
    for (size_t i = 0; i < perm.size(); ++i) {
        pv[i] = pred.values()[static_cast<size_t>(perm[i])];
        gv[i] = gt.values()[static_cast<size_t>(perm[i])];
    }
    const DepthMap pred_p(n, n, pv), gt_p(n, n, gv);

    const ConfusionCounts a = classify(pred, gt, 0.05f);
    const ConfusionCounts b = classify(pred_p, gt_p, 0.05f);
    CHECK(a.tp == b.tp);
    CHECK(a.fp == b.fp);
    CHECK(rmse_tp(pred, gt, 0.05f).value ==
          doctest::Approx(rmse_tp(pred_p, gt_p, 0.05f).value).epsilon(1e-9));
}

TEST_CASE("classify is monotone in epsilon") {
    Rng rng(23);
    const DepthMap pred = random_map(16, rng, 0.6);
    const DepthMap gt = random_map(16, rng, 0.6);
    std::int64_t prev_fg = -1;
    for (float eps : {0.01f, 0.05f, 0.2f, 0.5f, 0.9f}) {
        const ConfusionCounts c = classify(pred, gt, eps);
        const std::int64_t fg = c.tp + c.fp; // predicted-foreground count
        if (prev_fg >= 0) CHECK(fg <= prev_fg);
        prev_fg = fg;
    }
}

TEST_CASE("dimension mismatches are input errors") {
    DepthMap a(4, 4);
    DepthMap b(5, 4);
    CHECK_THROWS_AS(classify(a, b, 0.05f), InputError);
    CHECK_THROWS_AS(rmse_tp(a, b, 0.05f), InputError);
    CHECK_THROWS_AS(error_map(a, b, 0.05f), InputError);
}
