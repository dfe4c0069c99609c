#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nlos/common.hpp"
#include "nlos/render.hpp"
#include "nlos/rng.hpp"
#include "nlos/volume_ops.hpp"
#include "test_util.hpp"

using namespace nlos;

namespace {

ScanConfig small_scan() {
    ScanConfig cfg;
    cfg.nx = cfg.ny = 16;
    cfg.nt = 256;
    cfg.dt_s = 16e-12;
    cfg.scale_m = 0.15;
    return cfg;
}

TriangleMesh point_target(double x, double y, double z) {
    TriangleMesh mesh;
    const double e = 0.02;
    mesh.vertices = {{x - e, y - e, z}, {x + e, y - e, z}, {x, y + e, z}};
    mesh.triangles = {{0, 1, 2}};
    mesh.albedo = {1.0f};
    return mesh;
}

} // namespace

TEST_CASE("backprojecting zero yields zero") {
    const TransientVolume zeros(small_scan(), VolumeUnits::Unitless);
    const ReconVolume recon = backproject(zeros, 8, 8, 16);
    for (float v : recon.values) CHECK(v == 0.0f);
}

TEST_CASE("backprojection is linear") {
    const ScanConfig cfg = small_scan();
    const TransientVolume va = render_confocal(point_target(-0.3, 0.1, -0.2), cfg);
    const TransientVolume vb = render_confocal(point_target(0.4, -0.2, 0.3), cfg);
    TransientVolume vsum = va;
    for (size_t i = 0; i < vsum.values.size(); ++i) vsum.values[i] += vb.values[i];

    const ReconVolume ra = backproject(va, 8, 8, 16);
    const ReconVolume rb = backproject(vb, 8, 8, 16);
    const ReconVolume rsum = backproject(vsum, 8, 8, 16);
    for (size_t i = 0; i < rsum.values.size(); ++i) {
        CHECK(rsum.values[i] ==
              doctest::Approx(ra.values[i] + rb.values[i]).epsilon(1e-4));
    }
}

TEST_CASE("point target backprojects to the right voxel") {
    const ScanConfig cfg = small_scan();
    const double px = -0.25, py = 0.25, pz = -0.125;
    const TransientVolume volume = render_confocal(point_target(px, py, pz), cfg);
    const int n = 16;
    const ReconVolume recon = backproject(volume, n, n, n);

    int bx = 0, by = 0, bz = 0;
    float best = -1.0f;
    for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x) {
            for (int z = 0; z < n; ++z) {
                if (recon.at(x, y, z) > best) {
                    best = recon.at(x, y, z);
                    bx = x;
                    by = y;
                    bz = z;
                }
            }
        }
    }
    CHECK(std::abs(recon.voxel_x(bx) - px) <= recon.pitch_x());
    CHECK(std::abs(recon.voxel_y(by) - py) <= recon.pitch_y());
    CHECK(std::abs(recon.voxel_z(bz) - pz) <= recon.pitch_z());
}

TEST_CASE("backprojection argmax follows a one-voxel z shift") {
    const ScanConfig cfg = small_scan();
    const int n = 16;
    const double dz = 2.0 / n;
    const TransientVolume va = render_confocal(point_target(0.0, 0.0, -0.25), cfg);
    const TransientVolume vb = render_confocal(point_target(0.0, 0.0, -0.25 + dz), cfg);
    auto argmax_z = [&](const ReconVolume& r) {
        int best = 0;
        float val = -1.0f;
        for (int z = 0; z < n; ++z) {
            for (int y = 0; y < n; ++y) {
                for (int x = 0; x < n; ++x) {
                    if (r.at(x, y, z) > val) {
                        val = r.at(x, y, z);
                        best = z;
                    }
                }
            }
        }
        return best;
    };
    const int za = argmax_z(backproject(va, n, n, n));
    const int zb = argmax_z(backproject(vb, n, n, n));
    CHECK(std::abs((zb - za) - 1) <= 1);
}

TEST_CASE("backprojection grid outside the window is rejected") {
    ScanConfig cfg = small_scan();
    cfg.nt = 200;
    const TransientVolume volume(cfg, VolumeUnits::Unitless);
    CHECK_NOTHROW(backproject(volume, 4, 4, 4));

    ScanConfig tight = small_scan();
    tight.nt = 150; // too few bins to reach the far voxel corners
    const TransientVolume v2(tight, VolumeUnits::Unitless);
    CHECK_THROWS_AS(backproject(v2, 4, 4, 4), ConfigError);
}

TEST_CASE("max intensity projection matches per-ray maxima") {
    ReconVolume recon(5, 4, 6);
    Rng rng(8);
    for (float& v : recon.values) v = static_cast<float>(rng.next_double());

    const Image xy = max_intensity_projection(recon, 2);
    CHECK(xy.width == 5);
    CHECK(xy.height == 4);
    for (int y = 0; y < 4; ++y) {
        for (int x = 0; x < 5; ++x) {
            float want = 0.0f;
            for (int z = 0; z < 6; ++z) want = std::max(want, recon.at(x, y, z));
            CHECK(xy.at(x, y) == want);
        }
    }
    const Image yz = max_intensity_projection(recon, 0);
    CHECK(yz.width == 4);
    CHECK(yz.height == 6);
    for (int z = 0; z < 6; ++z) {
        for (int y = 0; y < 4; ++y) {
            float want = 0.0f;
            for (int x = 0; x < 5; ++x) want = std::max(want, recon.at(x, y, z));
            CHECK(yz.at(y, z) == want);
        }
    }

    ReconVolume constant(3, 3, 3);
    std::fill(constant.values.begin(), constant.values.end(), 2.0f);
    const Image flat = max_intensity_projection(constant, 2);
    for (float v : flat.values) CHECK(v == 2.0f);

    ReconVolume hot(4, 4, 4);
    hot.at(2, 1, 3) = 5.0f;
    const Image spot = max_intensity_projection(hot, 2);
    CHECK(spot.at(2, 1) == 5.0f);
    int nonzero = 0;
    for (float v : spot.values) nonzero += v > 0.0f ? 1 : 0;
    CHECK(nonzero == 1);

    CHECK_THROWS_AS(max_intensity_projection(recon, 3), InputError);
}

TEST_CASE("temporal window zeroes the complement") {
    TransientVolume v(small_scan(), VolumeUnits::Unitless);
    Rng rng(12);
    for (float& x : v.values) x = static_cast<float>(rng.next_double());

    const TransientVolume full = temporal_window(v, 0, v.config.nt);
    CHECK(full.values == v.values);

    const int t0 = 40, t1 = 90;
    const TransientVolume cut = temporal_window(v, t0, t1);
    for (int y = 0; y < v.config.ny; ++y) {
        for (int x = 0; x < v.config.nx; ++x) {
            for (int t = 0; t < v.config.nt; ++t) {
                const float want = (t >= t0 && t < t1) ? v.at(x, y, t) : 0.0f;
                CHECK(cut.at(x, y, t) == want);
            }
        }
    }
    CHECK_THROWS_AS(temporal_window(v, -1, 5), InputError);
    CHECK_THROWS_AS(temporal_window(v, 5, 5), InputError);
    CHECK_THROWS_AS(temporal_window(v, 0, v.config.nt + 1), InputError);
}

TEST_CASE("laplacian stencil") {
    Image constant(5, 5, 3.0f);
    const Image zero = laplacian_filter(constant);
    // borders involve zero padding, interior is exactly zero
    for (int y = 1; y < 4; ++y) {
        for (int x = 1; x < 4; ++x) CHECK(zero.at(x, y) == 0.0f);
    }

    Image unit(5, 5);
    unit.at(2, 2) = 1.0f;
    const Image lap = laplacian_filter(unit);
    CHECK(lap.at(2, 2) == -4.0f);
    CHECK(lap.at(1, 2) == 1.0f);
    CHECK(lap.at(3, 2) == 1.0f);
    CHECK(lap.at(2, 1) == 1.0f);
    CHECK(lap.at(2, 3) == 1.0f);
    CHECK(lap.at(1, 1) == 0.0f);

    // random image matches the stencil applied by hand
    Image img(7, 6);
    Rng rng(3);
    for (float& v : img.values) v = static_cast<float>(rng.next_double());
    const Image got = laplacian_filter(img);
    auto sample = [&](int x, int y) -> float {
        if (x < 0 || y < 0 || x >= img.width || y >= img.height) return 0.0f;
        return img.at(x, y);
    };
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const float want = sample(x - 1, y) + sample(x + 1, y) + sample(x, y - 1) +
                               sample(x, y + 1) - 4.0f * img.at(x, y);
            CHECK(got.at(x, y) == want);
        }
    }

    CHECK_THROWS_AS(laplacian_filter(Image(2, 2)), InputError);
}

TEST_CASE("threshold mask") {
    Image equal(4, 4, 0.7f);
    const Image all = threshold_mask(equal, 0.3);
    for (float v : all.values) CHECK(v == 1.0f);

    Image steps(4, 1);
    steps.at(0, 0) = 0.0f;
    steps.at(1, 0) = 0.2f;
    steps.at(2, 0) = 0.5f;
    steps.at(3, 0) = 1.0f;
    const Image mask = threshold_mask(steps, 0.3);
    CHECK(mask.at(0, 0) == 0.0f);
    CHECK(mask.at(1, 0) == 0.0f);
    CHECK(mask.at(2, 0) == 1.0f);
    CHECK(mask.at(3, 0) == 1.0f);

    // relative threshold: positive scaling changes nothing
    Image scaled = steps;
    for (float& v : scaled.values) v *= 123.0f;
    const Image mask2 = threshold_mask(scaled, 0.3);
    CHECK(mask.values == mask2.values);

    const Image empty = threshold_mask(Image(3, 3), 0.3);
    for (float v : empty.values) CHECK(v == 0.0f);

    CHECK_THROWS_AS(threshold_mask(steps, 0.0), InputError);
    CHECK_THROWS_AS(threshold_mask(steps, 1.0), InputError);
}

TEST_CASE("extract_depth argmax and threshold rules") {
    ReconVolume empty(4, 4, 8);
    const DepthMap bg = extract_depth(empty, 0.3);
    for (float v : bg.values()) CHECK(v == kBackgroundDepth);

    ReconVolume recon(4, 4, 8);
    recon.at(1, 2, 5) = 1.0f;
    recon.at(1, 2, 2) = 0.9f; // same ray, smaller value
    recon.at(3, 3, 1) = 0.1f; // below 30% of the global max
    const DepthMap depth = extract_depth(recon, 0.3);
    CHECK(depth.at(1, 2) == doctest::Approx(recon.voxel_z(5)));
    CHECK(depth.at(3, 3) == kBackgroundDepth);
    for (float v : depth.values()) {
        CHECK(v >= -1.0f);
        CHECK(v <= 1.0f);
    }

    // exact tie: the smaller z index wins
    ReconVolume tie(1, 1, 8);
    tie.at(0, 0, 2) = 1.0f;
    tie.at(0, 0, 6) = 1.0f;
    const DepthMap tied = extract_depth(tie, 0.3);
    CHECK(tied.at(0, 0) == doctest::Approx(tie.voxel_z(2)));
}

TEST_CASE("recon volume file round trip") {
    nlos_test::TempDir tmp;
    ReconVolume recon(6, 5, 4);
    Rng rng(77);
    for (float& v : recon.values) v = static_cast<float>(rng.next_double());
    const std::string path = tmp.file("recon.bin");
    save_recon(recon, path);
    const ReconVolume loaded = load_recon(path);
    CHECK(loaded.nx == 6);
    CHECK(loaded.ny == 5);
    CHECK(loaded.nz == 4);
    CHECK(loaded.values == recon.values);
}
