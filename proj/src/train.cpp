#include "nlos/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "nlos/common.hpp"
#include "nlos/rng.hpp"

namespace nlos {

namespace {

constexpr std::uint64_t kValAugStream = 0x8000000000000000ULL;

Tensor<float> label_tensor(const DepthMap& label) {
    Tensor<float> t({label.height(), label.width()});
    std::copy(label.values().begin(), label.values().end(), t.data());
    return t;
}

// Sensor simulation keyed by a fixed stream so a sample's augmentation
// is reproducible independent of batch order and worker count.
TransientVolume augment(const TransientVolume& volume, const AugmentationConfig& aug,
                        std::uint64_t param_stream, std::uint64_t noise_seed) {
    const AugParams p = sample_aug_params(aug, param_stream);
    return apply_sensor(volume, p.c, p.b, aug.mode, noise_seed);
}

double sample_loss(const Network<float>& net, const Sample& sample,
                   const TransientVolume& augmented, LossKind loss,
                   typename Network<float>::Trace* trace, Tensor<float>* grad_out) {
    const Tensor<float> input = net.prepare_input(augmented);
    const Tensor<float> out = net.forward(input, trace);
    const Tensor<float> target = label_tensor(sample.label);
    Tensor<float> grad(out.shape());
    const double l = (loss == LossKind::L1) ? l1_loss(out, target, grad)
                                            : mse_loss(out, target, grad);
    if (grad_out) *grad_out = std::move(grad);
    return l;
}

} // namespace

Checkpoint train(Network<float>& net, const std::vector<Sample>& train_set,
                 const std::vector<Sample>& val_set, const TrainOptions& opt) {
    if (train_set.empty() || val_set.empty()) {
        throw InputError("train: training and validation sets must be non-empty");
    }
    if (opt.batch < 1) throw InputError("train: batch size must be >= 1");
    if (opt.epochs < 1) throw InputError("train: epoch count must be >= 1");
    opt.aug.validate();

    auto params = net.parameters();
    std::vector<AdamState<float>> adam(params.size());
    AdamConfig adam_cfg;
    adam_cfg.lr = opt.lr;
    std::int64_t step = 0;

    const size_t n_train = train_set.size();
    const int batches = static_cast<int>((n_train + opt.batch - 1) / opt.batch);

    Checkpoint best;
    best.config = net.config();
    double best_val = std::numeric_limits<double>::infinity();

    std::vector<Tensor<float>> batch_grads = net.make_grad_buffers();

    for (int epoch = 0; epoch < opt.epochs; ++epoch) {
        // deterministic shuffle per epoch
        std::vector<std::uint32_t> order(n_train);
        std::iota(order.begin(), order.end(), 0u);
        Rng shuffle_rng(opt.seed, 0x0EAC4 + static_cast<std::uint64_t>(epoch));
        for (size_t i = n_train; i > 1; --i) {
            const size_t j = static_cast<size_t>(shuffle_rng.next_below(i));
            std::swap(order[i - 1], order[j]);
        }

        double epoch_loss = 0.0;
        for (int b = 0; b < batches; ++b) {
            const size_t begin = static_cast<size_t>(b) * opt.batch;
            const size_t end = std::min(n_train, begin + opt.batch);
            const int count = static_cast<int>(end - begin);

            // Per-sample gradients land in private buffers and are
            // reduced in sample order afterwards.
            std::vector<std::vector<Tensor<float>>> grads(static_cast<size_t>(count));
            std::vector<double> losses(static_cast<size_t>(count), 0.0);
            parallel_for(count, [&](std::int64_t k) {
                const std::uint32_t idx = order[begin + static_cast<size_t>(k)];
                const std::uint64_t stream =
                    static_cast<std::uint64_t>(epoch) * n_train + idx;
                const TransientVolume aug_vol =
                    augment(train_set[idx].volume, opt.aug, stream,
                            mix_key(opt.seed ^ 0xA0610, stream));
                typename Network<float>::Trace trace;
                Tensor<float> grad_out;
                losses[static_cast<size_t>(k)] = sample_loss(
                    net, train_set[idx], aug_vol, opt.loss, &trace, &grad_out);
                auto local = net.make_grad_buffers();
                net.backward(trace, grad_out, local);
                grads[static_cast<size_t>(k)] = std::move(local);
            });

            double batch_loss = 0.0;
            for (double l : losses) batch_loss += l;
            batch_loss /= count;
            epoch_loss += batch_loss * count;
            if (!std::isfinite(batch_loss)) {
                throw TrainError("train: non-finite loss at epoch " + std::to_string(epoch) +
                                 ", batch " + std::to_string(b));
            }

            for (auto& g : batch_grads) g.fill(0.0f);
            for (int k = 0; k < count; ++k) {
                for (size_t p = 0; p < batch_grads.size(); ++p) {
                    const Tensor<float>& src = grads[static_cast<size_t>(k)][p];
                    Tensor<float>& dst = batch_grads[p];
                    for (std::int64_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
                }
            }
            const float inv = 1.0f / static_cast<float>(count);
            for (auto& g : batch_grads) {
                for (std::int64_t i = 0; i < g.size(); ++i) g[i] *= inv;
            }

            ++step;
            for (size_t p = 0; p < params.size(); ++p) {
                adam_step(*params[p].value, batch_grads[p], adam[p], step, adam_cfg);
            }
        }
        epoch_loss /= static_cast<double>(n_train);

        // validation with fixed per-sample augmentation
        std::vector<double> val_losses(val_set.size(), 0.0);
        parallel_for(static_cast<std::int64_t>(val_set.size()), [&](std::int64_t k) {
            const std::uint64_t stream = kValAugStream + static_cast<std::uint64_t>(k);
            const TransientVolume aug_vol =
                augment(val_set[static_cast<size_t>(k)].volume, opt.aug, stream,
                        mix_key(opt.seed ^ 0x7A1, stream));
            val_losses[static_cast<size_t>(k)] = sample_loss(
                net, val_set[static_cast<size_t>(k)], aug_vol, opt.loss, nullptr, nullptr);
        });
        const double val_loss =
            std::accumulate(val_losses.begin(), val_losses.end(), 0.0) /
            static_cast<double>(val_set.size());
        if (!std::isfinite(val_loss)) {
            throw TrainError("train: non-finite validation loss at epoch " +
                             std::to_string(epoch));
        }

        best.history.train_loss.push_back(epoch_loss);
        best.history.val_loss.push_back(val_loss);
        if (val_loss < best_val) {
            best_val = val_loss;
            best.history.best_epoch = epoch;
            best.names.clear();
            best.params.clear();
            best.adam_m.clear();
            best.adam_v.clear();
            for (size_t p = 0; p < params.size(); ++p) {
                best.names.push_back(params[p].name);
                best.params.push_back(*params[p].value);
                best.adam_m.push_back(adam[p].m);
                best.adam_v.push_back(adam[p].v);
            }
            best.adam_t = step;
        }
        if (opt.verbose) {
            std::fprintf(stderr, "epoch %3d  train %.6f  val %.6f%s\n", epoch, epoch_loss,
                         val_loss, best.history.best_epoch == epoch ? "  *" : "");
        }
    }
    return best;
}

Network<float> network_from_checkpoint(const Checkpoint& ckpt) {
    Network<float> net(ckpt.config);
    auto params = net.parameters();
    if (params.size() != ckpt.params.size()) {
        throw InputError("checkpoint: parameter count does not match architecture");
    }
    for (size_t p = 0; p < params.size(); ++p) {
        if (!params[p].value->same_shape(ckpt.params[p])) {
            throw InputError("checkpoint: shape mismatch for " + params[p].name);
        }
        *params[p].value = ckpt.params[p];
    }
    return net;
}

PredictionResult predict(const Network<float>& net, const TransientVolume& volume) {
    const auto start = std::chrono::steady_clock::now();
    const Tensor<float> input = net.prepare_input(volume);
    const Tensor<float> out = net.forward(input);
    const auto stop = std::chrono::steady_clock::now();

    std::vector<float> values(static_cast<size_t>(out.size()));
    for (std::int64_t i = 0; i < out.size(); ++i) {
        values[static_cast<size_t>(i)] = std::clamp(out[i], -1.0f, 1.0f);
    }
    PredictionResult result{
        DepthMap(net.config().output_res, net.config().output_res, std::move(values)),
        std::chrono::duration<double, std::milli>(stop - start).count()};
    return result;
}

} // namespace nlos
