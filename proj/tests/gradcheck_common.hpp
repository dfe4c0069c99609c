#pragma once

// Central finite-difference gradient checks for every layer kind, shared
// by the fast unit suite and the full acceptance run.

#include <functional>
#include <vector>

#include "nlos/layers.hpp"
#include "nlos/rng.hpp"

namespace nlos_test {

using nlos::Rng;
using nlos::Tensor;

inline Tensor<double> random_tensor(std::vector<int> shape, Rng& rng, double scale = 1.0) {
    Tensor<double> t(std::move(shape));
    for (std::int64_t i = 0; i < t.size(); ++i) {
        t[i] = scale * (2.0 * rng.next_double() - 1.0);
    }
    return t;
}

// Compares analytic gradients of L = sum(forward() * proj) against
// central differences for every coordinate of every listed tensor.
// Near-zero gradients are compared on an absolute floor tied to the
// gradient magnitude so the ratio stays meaningful.
inline double gradcheck_max_rel_error(
    const std::function<Tensor<double>()>& forward, const Tensor<double>& proj,
    const std::vector<Tensor<double>*>& perturbed,
    const std::vector<const Tensor<double>*>& analytic_grads, double h = 1e-4) {
    auto loss = [&]() {
        const Tensor<double> out = forward();
        double acc = 0.0;
        for (std::int64_t i = 0; i < out.size(); ++i) acc += out[i] * proj[i];
        return acc;
    };

    double gmax = 0.0;
    for (const Tensor<double>* g : analytic_grads) {
        for (std::int64_t i = 0; i < g->size(); ++i) {
            gmax = std::max(gmax, std::abs((*g)[i]));
        }
    }
    const double floor = std::max(1e-6, 1e-3 * gmax);

    double worst = 0.0;
    for (size_t k = 0; k < perturbed.size(); ++k) {
        Tensor<double>& t = *perturbed[k];
        const Tensor<double>& g = *analytic_grads[k];
        for (std::int64_t i = 0; i < t.size(); ++i) {
            const double saved = t[i];
            t[i] = saved + h;
            const double lp = loss();
            t[i] = saved - h;
            const double lm = loss();
            t[i] = saved;
            const double fd = (lp - lm) / (2.0 * h);
            const double err = std::abs(g[i] - fd) / std::max({std::abs(g[i]), std::abs(fd), floor});
            worst = std::max(worst, err);
        }
    }
    return worst;
}

inline double check_conv3d(Rng& rng, bool pinned_shape = false) {
    using namespace nlos;
    const int ci = pinned_shape ? 2 : 1 + static_cast<int>(rng.next_below(3));
    const int co = pinned_shape ? 2 : 1 + static_cast<int>(rng.next_below(3));
    const int d1 = pinned_shape ? 4 : 2 + static_cast<int>(rng.next_below(4));
    const int d2 = pinned_shape ? 4 : 2 + static_cast<int>(rng.next_below(4));
    const int d3 = pinned_shape ? 12 : 4 + static_cast<int>(rng.next_below(8));
    const int k3 = pinned_shape ? 9 : 1 + 2 * static_cast<int>(rng.next_below(3));
    Tensor<double> input = random_tensor({ci, d1, d2, d3}, rng);
    Tensor<double> weight = random_tensor({co, ci, 3, 3, k3}, rng, 0.5);
    Tensor<double> bias = random_tensor({co}, rng, 0.2);
    const Tensor<double> proj = random_tensor({co, d1, d2, d3}, rng);

    Tensor<double> gi(input.shape()), gw(weight.shape()), gb(bias.shape());
    conv3d_backward(input, weight, proj, gi, gw, gb);
    return gradcheck_max_rel_error(
        [&]() { return conv3d_forward(input, weight, bias); }, proj,
        {&input, &weight, &bias}, {&gi, &gw, &gb});
}

inline double check_avgpool3d(Rng& rng) {
    using namespace nlos;
    const int c = 1 + static_cast<int>(rng.next_below(3));
    const int w1 = 1 + static_cast<int>(rng.next_below(2));
    const int w2 = 1 + static_cast<int>(rng.next_below(2));
    const int w3 = 1 + static_cast<int>(rng.next_below(3));
    const int d1 = w1 * (1 + static_cast<int>(rng.next_below(3)));
    const int d2 = w2 * (1 + static_cast<int>(rng.next_below(3)));
    const int d3 = w3 * (1 + static_cast<int>(rng.next_below(3)));
    Tensor<double> input = random_tensor({c, d1, d2, d3}, rng);
    const Tensor<double> out = avgpool3d_forward(input, w1, w2, w3);
    const Tensor<double> proj = random_tensor(out.shape(), rng);

    Tensor<double> gi(input.shape());
    avgpool3d_backward(proj, w1, w2, w3, gi);
    return gradcheck_max_rel_error(
        [&]() { return avgpool3d_forward(input, w1, w2, w3); }, proj, {&input}, {&gi});
}

inline double check_conv2d(Rng& rng) {
    using namespace nlos;
    const int ci = 1 + static_cast<int>(rng.next_below(3));
    const int co = 1 + static_cast<int>(rng.next_below(3));
    const int hh = 2 + static_cast<int>(rng.next_below(5));
    const int ww = 2 + static_cast<int>(rng.next_below(5));
    const int k = 1 + 2 * static_cast<int>(rng.next_below(3));
    Tensor<double> input = random_tensor({ci, hh, ww}, rng);
    Tensor<double> weight = random_tensor({co, ci, k, k}, rng, 0.5);
    Tensor<double> bias = random_tensor({co}, rng, 0.2);
    const Tensor<double> proj = random_tensor({co, hh, ww}, rng);

    Tensor<double> gi(input.shape()), gw(weight.shape()), gb(bias.shape());
    conv2d_backward(input, weight, proj, gi, gw, gb);
    return gradcheck_max_rel_error(
        [&]() { return conv2d_forward(input, weight, bias); }, proj,
        {&input, &weight, &bias}, {&gi, &gw, &gb});
}

inline double check_upconv2d(Rng& rng) {
    using namespace nlos;
    const int ci = 1 + static_cast<int>(rng.next_below(3));
    const int co = 1 + static_cast<int>(rng.next_below(3));
    const int hh = 2 + static_cast<int>(rng.next_below(4));
    const int ww = 2 + static_cast<int>(rng.next_below(4));
    Tensor<double> input = random_tensor({ci, hh, ww}, rng);
    Tensor<double> weight = random_tensor({ci, co, 2, 2}, rng, 0.5);
    Tensor<double> bias = random_tensor({co}, rng, 0.2);
    const Tensor<double> proj = random_tensor({co, 2 * hh, 2 * ww}, rng);

    Tensor<double> gi(input.shape()), gw(weight.shape()), gb(bias.shape());
    upconv2d_backward(input, weight, proj, gi, gw, gb);
    return gradcheck_max_rel_error(
        [&]() { return upconv2d_forward(input, weight, bias); }, proj,
        {&input, &weight, &bias}, {&gi, &gw, &gb});
}

inline double check_dense(Rng& rng) {
    using namespace nlos;
    const int in = 4 + static_cast<int>(rng.next_below(30));
    const int out = 2 + static_cast<int>(rng.next_below(16));
    Tensor<double> input = random_tensor({in}, rng);
    Tensor<double> weight = random_tensor({out, in}, rng, 0.5);
    Tensor<double> bias = random_tensor({out}, rng, 0.2);
    const Tensor<double> proj = random_tensor({out}, rng);

    Tensor<double> gi(input.shape()), gw(weight.shape()), gb(bias.shape());
    dense_backward(input, weight, proj, gi, gw, gb);
    return gradcheck_max_rel_error(
        [&]() { return dense_forward(input, weight, bias); }, proj,
        {&input, &weight, &bias}, {&gi, &gw, &gb});
}

inline double check_relu(Rng& rng) {
    using namespace nlos;
    const int n = 8 + static_cast<int>(rng.next_below(40));
    Tensor<double> input = random_tensor({n}, rng);
    const Tensor<double> proj = random_tensor({n}, rng);
    const Tensor<double> out = relu_forward(input);
    Tensor<double> gi(input.shape());
    relu_backward(out, proj, gi);
    return gradcheck_max_rel_error([&]() { return relu_forward(input); }, proj, {&input},
                                   {&gi});
}

inline double check_mse(Rng& rng) {
    using namespace nlos;
    const int n = 8 + static_cast<int>(rng.next_below(40));
    Tensor<double> pred = random_tensor({n}, rng);
    const Tensor<double> target = random_tensor({n}, rng);

    Tensor<double> grad(pred.shape());
    nlos::mse_loss(pred, target, grad);

    double worst = 0.0;
    const double h = 1e-5;
    for (std::int64_t i = 0; i < pred.size(); ++i) {
        const double saved = pred[i];
        Tensor<double> scratch(pred.shape());
        pred[i] = saved + h;
        const double lp = nlos::mse_loss(pred, target, scratch);
        pred[i] = saved - h;
        const double lm = nlos::mse_loss(pred, target, scratch);
        pred[i] = saved;
        const double fd = (lp - lm) / (2.0 * h);
        const double err =
            std::abs(grad[i] - fd) / std::max({std::abs(grad[i]), std::abs(fd), 1e-8});
        worst = std::max(worst, err);
    }
    return worst;
}

} // namespace nlos_test
