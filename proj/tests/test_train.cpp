#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "nlos/common.hpp"
#include "nlos/dataset.hpp"
#include "nlos/rasterize.hpp"
#include "nlos/render.hpp"
#include "nlos/train.hpp"
#include "test_util.hpp"

using namespace nlos;

namespace {

ScanConfig micro_scan() {
    ScanConfig scan;
    scan.nx = scan.ny = 8;
    scan.nt = 32;
    scan.dt_s = 128e-12;
    scan.scale_m = 0.15;
    return scan;
}

ArchitectureConfig micro_arch() {
    ArchitectureConfig cfg;
    cfg.nx = cfg.ny = 8;
    cfg.nt = 32;
    cfg.levels = 2;
    cfg.base_channels = 4;
    cfg.output_res = 8;
    cfg.dense_layers = 2;
    cfg.regressor_channels = 2;
    cfg.seed = 7;
    return cfg;
}

std::vector<Sample> micro_dataset(int count, int label_res) {
    const ScanConfig scan = micro_scan();
    std::vector<Sample> samples;
    for (int i = 0; i < count; ++i) {
        Sample s;
        s.label = flat_label(label_res, 99, static_cast<std::uint64_t>(i), 1, 2);
        s.volume = render_confocal(triangulate_depth(s.label), scan);
        samples.push_back(std::move(s));
    }
    return samples;
}

AugmentationConfig no_aug() {
    AugmentationConfig aug;
    aug.c_min = aug.c_max = 1.0;
    aug.b_min = aug.b_max = 0.0;
    aug.mode = SensorMode::Plain;
    return aug;
}

} // namespace

TEST_CASE("training reduces the loss and early-stops at the argmin") {
    const std::vector<Sample> data = micro_dataset(8, 8);
    const std::vector<Sample> train_set(data.begin(), data.begin() + 6);
    const std::vector<Sample> val_set(data.begin() + 6, data.end());

    Network<float> net(micro_arch());
    TrainOptions opt;
    opt.epochs = 12;
    opt.batch = 2;
    opt.lr = 1e-3;
    opt.aug = no_aug();
    const Checkpoint ckpt = train(net, train_set, val_set, opt);

    REQUIRE(ckpt.history.train_loss.size() == 12);
    REQUIRE(ckpt.history.val_loss.size() == 12);
    CHECK(ckpt.history.train_loss.back() < ckpt.history.train_loss.front());

    const auto& val = ckpt.history.val_loss;
    const int argmin = static_cast<int>(std::min_element(val.begin(), val.end()) -
                                        val.begin());
    CHECK(ckpt.history.best_epoch == argmin);
    for (double v : val) {
        CHECK(val[static_cast<size_t>(ckpt.history.best_epoch)] <= v);
    }
}

TEST_CASE("single-thread training is bitwise reproducible") {
    nlos_test::TempDir tmp;
    set_thread_count(1);
    const std::vector<Sample> data = micro_dataset(6, 8);
    const std::vector<Sample> train_set(data.begin(), data.begin() + 4);
    const std::vector<Sample> val_set(data.begin() + 4, data.end());

    TrainOptions opt;
    opt.epochs = 4;
    opt.batch = 2;
    opt.lr = 1e-3;
    opt.seed = 5;
    opt.aug = no_aug();
    opt.aug.mode = SensorMode::Full;
    opt.aug.c_min = 1e2;
    opt.aug.c_max = 1e3;
    opt.aug.b_max = 2.0;

    Network<float> net1(micro_arch());
    const Checkpoint c1 = train(net1, train_set, val_set, opt);
    save_checkpoint(c1, tmp.file("a.ckpt"));

    Network<float> net2(micro_arch());
    const Checkpoint c2 = train(net2, train_set, val_set, opt);
    save_checkpoint(c2, tmp.file("b.ckpt"));

    CHECK(nlos_test::read_file(tmp.file("a.ckpt")) == nlos_test::read_file(tmp.file("b.ckpt")));
}

TEST_CASE("training errors") {
    Network<float> net(micro_arch());
    const std::vector<Sample> empty;
    const std::vector<Sample> data = micro_dataset(2, 8);
    TrainOptions opt;
    opt.aug = no_aug();
    CHECK_THROWS_AS(train(net, empty, data, opt), InputError);
    CHECK_THROWS_AS(train(net, data, empty, opt), InputError);

    // runaway learning rate must abort with a diagnostic, not NaN silently
    TrainOptions blowup;
    blowup.epochs = 40;
    blowup.batch = 2;
    blowup.lr = 1e14;
    blowup.aug = no_aug();
    Network<float> net2(micro_arch());
    CHECK_THROWS_AS(train(net2, data, data, blowup), TrainError);
}

TEST_CASE("predict clamps to the depth range and is repeatable") {
    Network<float> net(micro_arch());
    TransientVolume zeros(micro_scan(), VolumeUnits::Unitless);
    const PredictionResult a = predict(net, zeros);
    CHECK(a.depth.width() == 8);
    for (float v : a.depth.values()) {
        CHECK(std::isfinite(v));
        CHECK(v >= -1.0f);
        CHECK(v <= 1.0f);
    }
    const PredictionResult b = predict(net, zeros);
    CHECK(a.depth.values() == b.depth.values());
    CHECK(a.milliseconds >= 0.0);
}

TEST_CASE("a small net memorizes a handful of samples") {
    const std::vector<Sample> data = micro_dataset(4, 8);

    Network<float> net(micro_arch());
    TrainOptions opt;
    opt.epochs = 60;
    opt.batch = 4;
    opt.lr = 2e-3;
    opt.aug = no_aug();
    const Checkpoint ckpt = train(net, data, data, opt);
    CHECK(ckpt.history.train_loss.back() < 0.05);

    // the overfit net reproduces a training label closely
    Network<float> best = network_from_checkpoint(ckpt);
    const DepthMap pred = predict(best, data[0].volume).depth;
    double mse = 0.0;
    for (size_t i = 0; i < pred.values().size(); ++i) {
        const double d = static_cast<double>(pred.values()[i]) - data[0].label.values()[i];
        mse += d * d;
    }
    mse /= static_cast<double>(pred.values().size());
    CHECK(mse < 0.05);
}
