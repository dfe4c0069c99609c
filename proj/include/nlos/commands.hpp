#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nlos/dataset.hpp"
#include "nlos/metrics.hpp"
#include "nlos/network.hpp"
#include "nlos/sensor.hpp"
#include "nlos/train.hpp"
#include "nlos/volume_ops.hpp"

namespace nlos {

// Resolves a read path against NLOS_DATA_DIR when the path as given does
// not exist.
std::string resolve_data_path(const std::string& path);

struct TrainCmdOptions {
    std::string manifest_path;
    std::string checkpoint_out;
    std::string loss_csv;      // optional
    ArchitectureConfig arch;   // input dims are overwritten from the manifest
    TrainOptions train;
};

Checkpoint run_train(const TrainCmdOptions& opt);

struct PredictCmdOptions {
    std::string checkpoint;
    std::vector<std::string> volumes;  // explicit volume files
    std::string manifest_path;         // or: manifest test split
    std::string out_dir;
    bool normalize_import = false;     // per-volume max normalization on load
    int decimate_fx = 1, decimate_fy = 1, decimate_ft = 1; // applied then restored
};

// Writes pred_XXXXX (+ sidecar) and PGM previews; returns output paths.
std::vector<std::string> run_predict(const PredictCmdOptions& opt);

struct EvalCmdOptions {
    std::string manifest_path;
    std::string pred_dir;
    std::string out_dir;
    float eps = 0.05f;
};

struct EvalSummary {
    double mean_accuracy = 0.0;
    double mean_rmse_tp = 0.0; // over samples with at least one TP
    int rmse_defined = 0;
    std::vector<double> accuracy;
    std::vector<RmseResult> rmse;
};

EvalSummary evaluate_predictions(const std::vector<DepthMap>& preds,
                                 const std::vector<DepthMap>& gts, float eps);

// Compares pred_XXXXX files against the manifest's test labels; emits
// metrics.json and error-map PGM pairs.
EvalSummary run_eval(const EvalCmdOptions& opt);

struct ExtractCmdOptions {
    std::string volume_path;
    std::string out_prefix;
    int grid_nx = 32, grid_ny = 32, grid_nz = 64;
    double fraction = 0.30;
    int window_t0 = -1, window_t1 = -1; // optional temporal crop
    std::string gt_path;                // optional reference label
    double tolerance_voxels = 1.0;
};

struct ExtractReport {
    double in_tolerance_fraction = -1.0; // vs gt, when given
    int foreground_pixels = 0;
};

ExtractReport run_extract_depth(const ExtractCmdOptions& opt);

// --- ablations ---------------------------------------------------------

struct NoiseSweepLevel {
    double target_psnr_db = 0.0;  // +inf encodes the clean baseline
    double measured_psnr_db = 0.0;
    double accuracy = 0.0;
    double rmse_tp = 0.0;
};

std::vector<NoiseSweepLevel> noise_sweep(const Network<float>& net,
                                         const std::vector<Sample>& test_set,
                                         const std::vector<double>& target_psnr_db,
                                         int n_seeds, float eps, std::uint64_t seed);

struct DecimateLevel {
    char axis = 's';  // 's' spatial, 't' temporal
    int factor = 1;
    double accuracy = 0.0;
    double rmse_tp = 0.0;
};

std::vector<DecimateLevel> decimate_sweep(const Network<float>& net,
                                          const std::vector<Sample>& test_set,
                                          const std::vector<int>& factors, float eps);

struct ModesReport {
    std::vector<double> acc_full;     // one entry per evaluation seed
    std::vector<double> acc_poisson;
    std::vector<double> acc_plain;
};

ModesReport sensor_modes_eval(const Network<float>& net_full,
                              const Network<float>& net_poisson,
                              const Network<float>& net_plain,
                              const std::vector<Sample>& test_set,
                              const AugmentationConfig& eval_aug, int n_seeds, float eps);

struct AblateCmdOptions {
    std::string kind; // noise_sweep | decimate_sweep | sensor_modes
    std::string checkpoint;
    std::string checkpoint_poisson; // sensor_modes
    std::string checkpoint_plain;   // sensor_modes
    std::string manifest_path;
    std::string out_dir;
    std::vector<double> psnr_db = {30.0, 20.0, 10.0, -10.0};
    std::vector<int> factors = {1, 2, 4, 8};
    int seeds = 20;
    float eps = 0.05f;
    std::uint64_t seed = 0;
    AugmentationConfig eval_aug;
};

void run_ablate(const AblateCmdOptions& opt);

// One-sided paired comparison: returns true when `lower` does NOT exceed
// `higher` significantly at the 95% level (ties allowed, inversions
// rejected).
bool ordering_holds(const std::vector<double>& higher, const std::vector<double>& lower);

} // namespace nlos
