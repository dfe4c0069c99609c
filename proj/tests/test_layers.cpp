#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nlos/layers.hpp"
#include "nlos/rng.hpp"

using namespace nlos;

TEST_CASE("conv3d delta kernel is the identity") {
    Rng rng(1);
    Tensor<double> input({1, 3, 3, 9});
    for (std::int64_t i = 0; i < input.size(); ++i) input[i] = rng.next_double();
    Tensor<double> weight({1, 1, 3, 3, 9});
    weight[(1 * 3 + 1) * 9 + 4] = 1.0; // center tap
    Tensor<double> bias({1});
    const Tensor<double> out = conv3d_forward(input, weight, bias);
    for (std::int64_t i = 0; i < input.size(); ++i) {
        CHECK(out[i] == doctest::Approx(input[i]));
    }
}

TEST_CASE("conv3d all-ones kernel sums the window") {
    Tensor<double> input({1, 5, 5, 11});
    input.fill(1.0);
    Tensor<double> weight({1, 1, 3, 3, 9});
    weight.fill(1.0);
    Tensor<double> bias({1});
    const Tensor<double> out = conv3d_forward(input, weight, bias);
    // interior voxel sees the full 3*3*9 window
    const std::int64_t mid = ((0 * 5 + 2) * 5 + 2) * 11 + 5;
    CHECK(out[mid] == doctest::Approx(81.0));
}

TEST_CASE("conv3d shape errors") {
    Tensor<float> input({2, 4, 4, 8});
    Tensor<float> bias({3});
    CHECK_THROWS_AS(conv3d_forward(input, Tensor<float>({3, 1, 3, 3, 5}), bias), ShapeError);
    CHECK_THROWS_AS(conv3d_forward(input, Tensor<float>({3, 2, 2, 3, 5}), bias), ShapeError);
    CHECK_THROWS_AS(conv3d_forward(input, Tensor<float>({3, 2, 3, 3, 5}), Tensor<float>({4})),
                    ShapeError);
}

TEST_CASE("avgpool3d block means and constants") {
    Tensor<double> blocks({1, 2, 2, 2});
    for (int i = 0; i < 8; ++i) blocks[i] = i;
    const Tensor<double> pooled = avgpool3d_forward(blocks, 2, 2, 2);
    CHECK(pooled.size() == 1);
    CHECK(pooled[0] == doctest::Approx(3.5));

    Tensor<double> constant({3, 4, 4, 8});
    constant.fill(2.5);
    const Tensor<double> out = avgpool3d_forward(constant, 2, 2, 2);
    for (std::int64_t i = 0; i < out.size(); ++i) CHECK(out[i] == 2.5);

    CHECK_THROWS_AS(avgpool3d_forward(constant, 3, 2, 2), ShapeError);
}

TEST_CASE("avgpool preserves the global mean") {
    Rng rng(7);
    Tensor<double> input({2, 4, 4, 8});
    for (std::int64_t i = 0; i < input.size(); ++i) input[i] = rng.next_double();
    const Tensor<double> out = avgpool3d_forward(input, 2, 2, 2);
    double min = 0.0, mout = 0.0;
    for (std::int64_t i = 0; i < input.size(); ++i) min += input[i];
    for (std::int64_t i = 0; i < out.size(); ++i) mout += out[i];
    CHECK(min / input.size() == doctest::Approx(mout / out.size()).epsilon(1e-12));
}

TEST_CASE("upconv2d paints independent patches") {
    Tensor<double> input({1, 3, 3});
    input[(0 * 3 + 1) * 3 + 1] = 2.0; // single nonzero pixel
    Tensor<double> weight({1, 1, 2, 2});
    weight[0] = 0.5;
    weight[1] = -1.0;
    weight[2] = 0.25;
    weight[3] = 3.0;
    Tensor<double> bias({1});
    const Tensor<double> out = upconv2d_forward(input, weight, bias);
    CHECK(out.dim(1) == 6);
    CHECK(out.dim(2) == 6);
    CHECK(out[2 * 6 + 2] == doctest::Approx(1.0));
    CHECK(out[2 * 6 + 3] == doctest::Approx(-2.0));
    CHECK(out[3 * 6 + 2] == doctest::Approx(0.5));
    CHECK(out[3 * 6 + 3] == doctest::Approx(6.0));
    // everything else is zero
    double total = 0.0;
    for (std::int64_t i = 0; i < out.size(); ++i) total += out[i];
    CHECK(total == doctest::Approx(2.0 * (0.5 - 1.0 + 0.25 + 3.0)));
}

TEST_CASE("upconv2d output sum equals kernel sum times input sum") {
    Rng rng(9);
    Tensor<double> input({1, 4, 5});
    for (std::int64_t i = 0; i < input.size(); ++i) input[i] = rng.next_double();
    Tensor<double> weight({1, 1, 2, 2});
    for (int i = 0; i < 4; ++i) weight[i] = rng.next_double();
    Tensor<double> bias({1});
    const Tensor<double> out = upconv2d_forward(input, weight, bias);
    double in_sum = 0.0, w_sum = 0.0, out_sum = 0.0;
    for (std::int64_t i = 0; i < input.size(); ++i) in_sum += input[i];
    for (int i = 0; i < 4; ++i) w_sum += weight[i];
    for (std::int64_t i = 0; i < out.size(); ++i) out_sum += out[i];
    CHECK(out_sum == doctest::Approx(in_sum * w_sum).epsilon(1e-10));
}

TEST_CASE("relu basics and idempotence") {
    Tensor<float> x({4});
    x[0] = -3.0f;
    x[1] = 5.0f;
    x[2] = 0.0f;
    x[3] = -0.25f;
    const Tensor<float> once = relu_forward(x);
    CHECK(once[0] == 0.0f);
    CHECK(once[1] == 5.0f);
    CHECK(once[2] == 0.0f);
    CHECK(once[3] == 0.0f);
    const Tensor<float> twice = relu_forward(once);
    for (int i = 0; i < 4; ++i) CHECK(twice[i] == once[i]);
}

TEST_CASE("dense identity passthrough") {
    const int n = 6;
    Tensor<double> input({n});
    for (int i = 0; i < n; ++i) input[i] = 0.5 * i - 1.0;
    Tensor<double> weight({n, n});
    for (int i = 0; i < n; ++i) weight[i * n + i] = 1.0;
    Tensor<double> bias({n});
    const Tensor<double> out = dense_forward(input, weight, bias);
    for (int i = 0; i < n; ++i) CHECK(out[i] == doctest::Approx(input[i]));

    CHECK_THROWS_AS(dense_forward(input, Tensor<double>({n, n + 1}), bias), ShapeError);
}

TEST_CASE("mse loss values and gradient shape") {
    Tensor<double> pred({10});
    Tensor<double> target({10});
    Tensor<double> grad({10});
    CHECK(mse_loss(pred, target, grad) == 0.0);

    pred.fill(0.1);
    CHECK(mse_loss(pred, target, grad) == doctest::Approx(0.01));
    for (int i = 0; i < 10; ++i) {
        CHECK(grad[i] == doctest::Approx(2.0 * 0.1 / 10.0));
    }
    CHECK_THROWS_AS(mse_loss(pred, Tensor<double>({4}), grad), ShapeError);
}

TEST_CASE("l1 loss value and sign gradient") {
    Tensor<double> pred({4});
    Tensor<double> target({4});
    pred[0] = 0.5;
    pred[1] = -0.5;
    Tensor<double> grad({4});
    CHECK(l1_loss(pred, target, grad) == doctest::Approx(0.25));
    CHECK(grad[0] == doctest::Approx(0.25));
    CHECK(grad[1] == doctest::Approx(-0.25));
    CHECK(grad[2] == 0.0);
}

TEST_CASE("he_init statistics") {
    const std::int64_t n = 100000;
    const Tensor<double> w = he_init<double>({static_cast<int>(n)}, 2, 77);
    double mean = 0.0;
    for (std::int64_t i = 0; i < n; ++i) mean += w[i];
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::int64_t i = 0; i < n; ++i) var += (w[i] - mean) * (w[i] - mean);
    var /= static_cast<double>(n - 1);
    CHECK(std::abs(mean) < 0.01);
    CHECK(std::abs(var - 1.0) < 0.02); // variance 2 / fan_in with fan_in = 2

    const Tensor<double> w2 = he_init<double>({static_cast<int>(n)}, 2, 77);
    for (std::int64_t i = 0; i < 64; ++i) CHECK(w[i] == w2[i]);

    CHECK_THROWS_AS(he_init<double>({4}, 0, 1), ShapeError);
}

TEST_CASE("adam: zero gradient leaves parameters untouched") {
    Tensor<double> param({4});
    for (int i = 0; i < 4; ++i) param[i] = 1.0 + i;
    Tensor<double> grad({4});
    AdamState<double> state;
    adam_step(param, grad, state, 1);
    for (int i = 0; i < 4; ++i) {
        CHECK(param[i] == 1.0 + i);
        CHECK(state.m[i] == 0.0);
        CHECK(state.v[i] == 0.0);
    }
}

TEST_CASE("adam: first step magnitude is about lr") {
    Tensor<double> param({3});
    Tensor<double> grad({3});
    grad[0] = 4.0;
    grad[1] = -0.01;
    grad[2] = 1e3;
    AdamState<double> state;
    AdamConfig cfg;
    cfg.lr = 1e-4;
    adam_step(param, grad, state, 1, cfg);
    for (int i = 0; i < 3; ++i) {
        CHECK(std::abs(param[i]) == doctest::Approx(cfg.lr).epsilon(1e-3));
        CHECK(param[i] * grad[i] < 0.0); // moves against the gradient
    }
}

TEST_CASE("adam descends on a quadratic") {
    Tensor<double> x({1});
    x[0] = 1.0;
    AdamState<double> state;
    AdamConfig cfg;
    cfg.lr = 1e-4;
    double prev = x[0];
    for (int t = 1; t <= 50; ++t) {
        Tensor<double> grad({1});
        grad[0] = 2.0 * x[0];
        adam_step(x, grad, state, t, cfg);
        if (t > 1) CHECK(std::abs(x[0]) < std::abs(prev));
        prev = x[0];
    }

    Tensor<double> wrong({2});
    AdamState<double> fresh;
    CHECK_THROWS_AS(adam_step(x, wrong, fresh, 1), ShapeError);
}

TEST_CASE("fold_time round trip") {
    Rng rng(3);
    Tensor<double> input({2, 3, 4, 5});
    for (std::int64_t i = 0; i < input.size(); ++i) input[i] = rng.next_double();
    const Tensor<double> folded = fold_time_forward(input);
    CHECK(folded.dim(0) == 10);
    CHECK(folded.dim(1) == 3);
    CHECK(folded.dim(2) == 4);
    Tensor<double> back(input.shape());
    fold_time_backward(folded, back);
    for (std::int64_t i = 0; i < input.size(); ++i) CHECK(back[i] == input[i]);
}

TEST_CASE("concat and split are inverse") {
    Rng rng(4);
    Tensor<double> a({2, 3, 3});
    Tensor<double> b({4, 3, 3});
    for (std::int64_t i = 0; i < a.size(); ++i) a[i] = rng.next_double();
    for (std::int64_t i = 0; i < b.size(); ++i) b[i] = rng.next_double();
    const Tensor<double> cat = concat_channels(a, b);
    CHECK(cat.dim(0) == 6);
    Tensor<double> ga(a.shape()), gb(b.shape());
    split_channels_backward(cat, ga, gb);
    for (std::int64_t i = 0; i < a.size(); ++i) CHECK(ga[i] == a[i]);
    for (std::int64_t i = 0; i < b.size(); ++i) CHECK(gb[i] == b[i]);
}
