#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "nlos/depth_map.hpp"
#include "nlos/network.hpp"
#include "nlos/sensor.hpp"
#include "nlos/transient.hpp"

namespace nlos {

struct Sample {
    TransientVolume volume; // unitless rendering
    DepthMap label;
};

struct TrainHistory {
    std::vector<double> train_loss;
    std::vector<double> val_loss;
    int best_epoch = -1;
};

// Trained model state: architecture, parameters, optimizer state at the
// best validation epoch, and the full loss history.
struct Checkpoint {
    ArchitectureConfig config;
    std::vector<std::string> names;
    std::vector<Tensor<float>> params;
    std::vector<Tensor<float>> adam_m;
    std::vector<Tensor<float>> adam_v;
    std::int64_t adam_t = 0;
    TrainHistory history;
};

enum class LossKind { Mse, L1 };

struct TrainOptions {
    int epochs = 50;
    int batch = 8;
    double lr = 1e-4;
    std::uint64_t seed = 0;
    AugmentationConfig aug;
    LossKind loss = LossKind::Mse;
    bool verbose = false;
};

// Supervised training with on-the-fly sensor augmentation, re-drawn per
// (epoch, sample). Validation inputs use fixed per-sample augmentation so
// the early-stopping signal is deterministic. Returns the checkpoint at
// the minimal-validation-loss epoch. Throws TrainError on non-finite
// loss.
Checkpoint train(Network<float>& net, const std::vector<Sample>& train_set,
                 const std::vector<Sample>& val_set, const TrainOptions& opt);

// Restores a network from checkpoint parameters.
Network<float> network_from_checkpoint(const Checkpoint& ckpt);

struct PredictionResult {
    DepthMap depth;
    double milliseconds = 0.0;
};

// Forward pass; output clamped to the depth range [-1, 1].
PredictionResult predict(const Network<float>& net, const TransientVolume& volume);

// Single binary file: magic, JSON header (config, history, tensor
// manifest), then raw f32le blocks. Byte-exact round trip.
void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

} // namespace nlos
