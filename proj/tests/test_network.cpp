#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nlos/network.hpp"
#include "nlos/rng.hpp"
#include "nlos/train.hpp"
#include "test_util.hpp"

using namespace nlos;

namespace {

ArchitectureConfig tiny_config() {
    ArchitectureConfig cfg;
    cfg.nx = cfg.ny = 8;
    cfg.nt = 32;
    cfg.levels = 2;
    cfg.base_channels = 2;
    cfg.output_res = 8;
    cfg.dense_layers = 2;
    cfg.regressor_channels = 2;
    cfg.seed = 5;
    return cfg;
}

template <typename T>
Tensor<T> random_input(const ArchitectureConfig& cfg, std::uint64_t seed) {
    Tensor<T> input({1, cfg.ny, cfg.nx, cfg.nt});
    Rng rng(seed);
    for (std::int64_t i = 0; i < input.size(); ++i) {
        input[i] = static_cast<T>(rng.next_double());
    }
    return input;
}

} // namespace

TEST_CASE("config validation names the failing stage") {
    ArchitectureConfig cfg = tiny_config();
    cfg.levels = 5;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = tiny_config();
    cfg.nt = 30; // not divisible by 4
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = tiny_config();
    cfg.output_res = 12; // not nx * 2^k
    try {
        cfg.validate();
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("upsampler") != std::string::npos);
    }
    cfg = tiny_config();
    cfg.dense_layers = 3;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = tiny_config();
    cfg.ny = 4; // not square
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("default architecture maps 32x32x256 to 64x64") {
    ArchitectureConfig cfg; // defaults
    Network<float> net(cfg);
    const std::int64_t count = net.parameter_count();
    CHECK(count > 0);

    Network<float> again(cfg);
    CHECK(again.parameter_count() == count);
    // identical seeds give identical weights
    auto p1 = net.parameters();
    auto p2 = again.parameters();
    REQUIRE(p1.size() == p2.size());
    for (size_t i = 0; i < p1.size(); ++i) {
        REQUIRE(p1[i].value->size() == p2[i].value->size());
        for (std::int64_t k = 0; k < std::min<std::int64_t>(p1[i].value->size(), 16); ++k) {
            CHECK((*p1[i].value)[k] == (*p2[i].value)[k]);
        }
    }

    const Tensor<float> input = random_input<float>(cfg, 3);
    const Tensor<float> out = net.forward(input);
    REQUIRE(out.rank() == 2);
    CHECK(out.dim(0) == 64);
    CHECK(out.dim(1) == 64);
    for (std::int64_t i = 0; i < out.size(); ++i) CHECK(std::isfinite(out[i]));
}

TEST_CASE("forward is deterministic") {
    const ArchitectureConfig cfg = tiny_config();
    Network<float> net(cfg);
    const Tensor<float> input = random_input<float>(cfg, 11);
    const Tensor<float> a = net.forward(input);
    const Tensor<float> b = net.forward(input);
    for (std::int64_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("upsampler stages double the output resolution") {
    ArchitectureConfig cfg = tiny_config();
    cfg.output_res = 16;
    Network<float> net(cfg);
    const Tensor<float> out = net.forward(random_input<float>(cfg, 2));
    CHECK(out.dim(0) == 16);
    CHECK(out.dim(1) == 16);

    cfg.output_res = 32;
    cfg.dense_layers = 1;
    Network<float> net2(cfg);
    const Tensor<float> out2 = net2.forward(random_input<float>(cfg, 2));
    CHECK(out2.dim(0) == 32);
}

TEST_CASE("end-to-end parameter gradients match finite differences") {
    ArchitectureConfig cfg = tiny_config();
    Network<double> net(cfg);
    auto params = net.parameters();

    const Tensor<double> input = random_input<double>(cfg, 21);
    Tensor<double> target({cfg.output_res, cfg.output_res});
    Rng trng(22);
    for (std::int64_t i = 0; i < target.size(); ++i) {
        target[i] = 2.0 * trng.next_double() - 1.0;
    }

    auto loss_value = [&]() {
        const Tensor<double> out = net.forward(input);
        Tensor<double> grad(out.shape());
        return mse_loss(out, target, grad);
    };

    typename Network<double>::Trace trace;
    const Tensor<double> out = net.forward(input, &trace);
    Tensor<double> grad_out(out.shape());
    mse_loss(out, target, grad_out);
    std::vector<Tensor<double>> grads = net.make_grad_buffers();
    net.backward(trace, grad_out, grads);

    // ten random parameter coordinates across the whole registry
    Rng pick(23);
    const double h = 1e-5;
    for (int probe = 0; probe < 10; ++probe) {
        const size_t pi = static_cast<size_t>(pick.next_below(params.size()));
        Tensor<double>& tensor = *params[pi].value;
        const std::int64_t ci = static_cast<std::int64_t>(pick.next_below(
            static_cast<std::uint64_t>(tensor.size())));
        const double saved = tensor[ci];
        tensor[ci] = saved + h;
        const double lp = loss_value();
        tensor[ci] = saved - h;
        const double lm = loss_value();
        tensor[ci] = saved;
        const double fd = (lp - lm) / (2.0 * h);
        const double analytic = grads[pi][ci];
        const double err =
            std::abs(analytic - fd) / std::max({std::abs(analytic), std::abs(fd), 1e-5});
        CHECK(err < 1e-3);
    }
}

TEST_CASE("prepare_input normalizes by the volume peak") {
    ArchitectureConfig cfg = tiny_config();
    cfg.normalize_input = true;
    Network<float> net(cfg);
    ScanConfig scan;
    scan.nx = scan.ny = cfg.nx;
    scan.nt = cfg.nt;
    TransientVolume volume(scan, VolumeUnits::Unitless);
    Rng rng(9);
    for (float& v : volume.values) v = static_cast<float>(rng.next_double() * 50.0);
    const Tensor<float> a = net.prepare_input(volume);
    float peak = 0.0f;
    for (std::int64_t i = 0; i < a.size(); ++i) peak = std::max(peak, a[i]);
    CHECK(peak == doctest::Approx(1.0f));

    // scaling the volume leaves the prepared input unchanged
    TransientVolume doubled = volume;
    for (float& v : doubled.values) v *= 2.0f;
    const Tensor<float> b = net.prepare_input(doubled);
    for (std::int64_t i = 0; i < a.size(); ++i) {
        CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-6));
    }

    ScanConfig wrong = scan;
    wrong.nt = cfg.nt * 2;
    CHECK_THROWS_AS(net.prepare_input(TransientVolume(wrong, VolumeUnits::Unitless)),
                    InputError);
}

TEST_CASE("checkpoint save/load round trip is byte-exact") {
    nlos_test::TempDir tmp;
    const ArchitectureConfig cfg = tiny_config();
    Network<float> net(cfg);

    Checkpoint ckpt;
    ckpt.config = cfg;
    for (auto& p : net.parameters()) {
        ckpt.names.push_back(p.name);
        ckpt.params.push_back(*p.value);
        ckpt.adam_m.emplace_back(p.value->shape());
        ckpt.adam_v.emplace_back(p.value->shape());
    }
    ckpt.adam_t = 17;
    ckpt.history.train_loss = {0.5, 0.25, 0.125};
    ckpt.history.val_loss = {0.6, 0.3, 0.2};
    ckpt.history.best_epoch = 2;

    const std::string path = tmp.file("model.ckpt");
    save_checkpoint(ckpt, path);
    const Checkpoint loaded = load_checkpoint(path);
    CHECK(loaded.adam_t == 17);
    CHECK(loaded.history.best_epoch == 2);
    CHECK(loaded.history.val_loss == ckpt.history.val_loss);
    CHECK(loaded.names == ckpt.names);

    const std::string path2 = tmp.file("model2.ckpt");
    save_checkpoint(loaded, path2);
    CHECK(nlos_test::read_file(path) == nlos_test::read_file(path2));

    // restored network reproduces the original outputs exactly
    Network<float> restored = network_from_checkpoint(loaded);
    const Tensor<float> input = random_input<float>(cfg, 31);
    const Tensor<float> a = net.forward(input);
    const Tensor<float> b = restored.forward(input);
    for (std::int64_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}
