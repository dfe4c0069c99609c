#include "nlos/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "nlos/common.hpp"
#include "nlos/rng.hpp"

namespace fs = std::filesystem;

namespace nlos {

std::string resolve_data_path(const std::string& path) {
    if (path.empty() || fs::exists(path) || fs::path(path).is_absolute()) return path;
    const char* root = std::getenv("NLOS_DATA_DIR");
    if (root != nullptr) {
        const fs::path candidate = fs::path(root) / path;
        if (fs::exists(candidate)) return candidate.string();
    }
    return path;
}

Checkpoint run_train(const TrainCmdOptions& opt) {
    const std::string manifest_path = resolve_data_path(opt.manifest_path);
    const DatasetManifest manifest = load_manifest(manifest_path);
    const std::string base = manifest_dir(manifest_path);
    manifest.validate(base);
    if (manifest.train_count < 2) throw InputError("train: manifest has no train split");

    ArchitectureConfig arch = opt.arch;
    arch.nx = manifest.input_nx;
    arch.ny = manifest.input_ny;
    arch.nt = manifest.input_nt;
    arch.output_res = manifest.label_res;
    arch.validate();

    std::vector<Sample> train_all = load_samples(manifest, base, 0);
    // Hold out a tenth of the train split for early stopping.
    const size_t val_count = std::max<size_t>(1, train_all.size() / 10);
    std::vector<Sample> val_set(train_all.end() - static_cast<std::ptrdiff_t>(val_count),
                                train_all.end());
    train_all.resize(train_all.size() - val_count);

    Network<float> net(arch);
    const Checkpoint ckpt = train(net, train_all, val_set, opt.train);

    if (!opt.checkpoint_out.empty()) save_checkpoint(ckpt, opt.checkpoint_out);
    if (!opt.loss_csv.empty()) {
        std::ofstream csv(opt.loss_csv);
        if (!csv) throw IoError("train: cannot open " + opt.loss_csv);
        csv << "epoch,train_loss,val_loss\n";
        for (size_t e = 0; e < ckpt.history.train_loss.size(); ++e) {
            csv << e << "," << ckpt.history.train_loss[e] << "," << ckpt.history.val_loss[e]
                << "\n";
        }
    }
    return ckpt;
}

namespace {

std::string indexed_name(const char* prefix, int i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s_%05d", prefix, i);
    return buf;
}

void normalize_volume(TransientVolume& volume) {
    const float peak = volume.max_value();
    if (peak <= 0.0f) return;
    for (float& v : volume.values) v /= peak;
}

} // namespace

std::vector<std::string> run_predict(const PredictCmdOptions& opt) {
    const Checkpoint ckpt = load_checkpoint(resolve_data_path(opt.checkpoint));
    const Network<float> net = network_from_checkpoint(ckpt);

    std::vector<std::string> inputs = opt.volumes;
    if (inputs.empty() && !opt.manifest_path.empty()) {
        const std::string manifest_path = resolve_data_path(opt.manifest_path);
        const DatasetManifest manifest = load_manifest(manifest_path);
        for (int i = manifest.train_count; i < manifest.count; ++i) {
            inputs.push_back((fs::path(manifest_dir(manifest_path)) /
                              manifest.samples[static_cast<size_t>(i)].volume)
                                 .string());
        }
    }
    if (inputs.empty()) throw InputError("predict: no input volumes given");
    fs::create_directories(opt.out_dir);

    std::vector<std::string> outputs(inputs.size());
    double total_ms = 0.0;
    for (size_t i = 0; i < inputs.size(); ++i) {
        TransientVolume volume = load_volume(resolve_data_path(inputs[i]));
        if (opt.normalize_import) normalize_volume(volume);
        if (opt.decimate_fx > 1 || opt.decimate_fy > 1 || opt.decimate_ft > 1) {
            volume = decimate(volume, opt.decimate_fx, opt.decimate_fy, opt.decimate_ft);
            volume = block_upsample(volume, opt.decimate_fx, opt.decimate_fy, opt.decimate_ft);
        }
        const PredictionResult result = predict(net, volume);
        total_ms += result.milliseconds;
        const std::string out =
            (fs::path(opt.out_dir) / indexed_name("pred", static_cast<int>(i))).string();
        save_depth_map(result.depth, out);
        save_depth_pgm(result.depth, out + ".pgm");
        outputs[i] = out;
    }
    std::fprintf(stderr, "predicted %zu volume(s), %.2f ms/prediction\n", inputs.size(),
                 total_ms / static_cast<double>(inputs.size()));
    return outputs;
}

EvalSummary evaluate_predictions(const std::vector<DepthMap>& preds,
                                 const std::vector<DepthMap>& gts, float eps) {
    if (preds.size() != gts.size() || preds.empty()) {
        throw InputError("evaluate_predictions: prediction/label count mismatch");
    }
    EvalSummary summary;
    double rmse_acc = 0.0;
    for (size_t i = 0; i < preds.size(); ++i) {
        const ConfusionCounts counts = classify(preds[i], gts[i], eps);
        summary.accuracy.push_back(accuracy(counts));
        const RmseResult r = rmse_tp(preds[i], gts[i], eps);
        summary.rmse.push_back(r);
        summary.mean_accuracy += summary.accuracy.back();
        if (r.defined()) {
            rmse_acc += r.value;
            ++summary.rmse_defined;
        }
    }
    summary.mean_accuracy /= static_cast<double>(preds.size());
    summary.mean_rmse_tp = summary.rmse_defined > 0
                               ? rmse_acc / static_cast<double>(summary.rmse_defined)
                               : 0.0;
    return summary;
}

EvalSummary run_eval(const EvalCmdOptions& opt) {
    const std::string manifest_path = resolve_data_path(opt.manifest_path);
    const DatasetManifest manifest = load_manifest(manifest_path);
    const std::string base = manifest_dir(manifest_path);

    std::vector<DepthMap> preds, gts;
    for (int i = manifest.train_count; i < manifest.count; ++i) {
        const int k = i - manifest.train_count;
        const std::string pred_path =
            (fs::path(resolve_data_path(opt.pred_dir)) / indexed_name("pred", k)).string();
        preds.push_back(load_depth_map(pred_path));
        gts.push_back(load_depth_map(
            (fs::path(base) / manifest.samples[static_cast<size_t>(i)].label).string()));
    }
    const EvalSummary summary = evaluate_predictions(preds, gts, opt.eps);

    fs::create_directories(opt.out_dir);
    nlohmann::json j;
    j["epsilon"] = opt.eps;
    j["mean_accuracy"] = summary.mean_accuracy;
    j["mean_rmse_tp"] = summary.mean_rmse_tp;
    j["rmse_defined_samples"] = summary.rmse_defined;
    nlohmann::json per = nlohmann::json::array();
    for (size_t i = 0; i < preds.size(); ++i) {
        const ConfusionCounts c = classify(preds[i], gts[i], opt.eps);
        nlohmann::json e;
        e["accuracy"] = summary.accuracy[i];
        e["rmse_tp"] = summary.rmse[i].defined() ? summary.rmse[i].value : nullptr;
        e["counts"] = {{"tp", c.tp}, {"tn", c.tn}, {"fp", c.fp}, {"fn", c.fn}};
        per.push_back(e);
        const ErrorMap em = error_map(preds[i], gts[i], opt.eps);
        const std::string stem =
            (fs::path(opt.out_dir) / indexed_name("error", static_cast<int>(i))).string();
        save_pgm(em.difference, stem + "_diff.pgm", 0.0f, 2.0f);
        save_pgm(em.mask, stem + "_mask.pgm", 0.0f, 1.0f);
    }
    j["samples"] = per;
    std::ofstream out((fs::path(opt.out_dir) / "metrics.json").string());
    out << j.dump(2) << "\n";
    return summary;
}

ExtractReport run_extract_depth(const ExtractCmdOptions& opt) {
    TransientVolume volume = load_volume(resolve_data_path(opt.volume_path));
    if (opt.window_t0 >= 0 && opt.window_t1 > opt.window_t0) {
        volume = temporal_window(volume, opt.window_t0, opt.window_t1);
    }
    const ReconVolume recon = backproject(volume, opt.grid_nx, opt.grid_ny, opt.grid_nz);
    const DepthMap depth = extract_depth(recon, opt.fraction);

    save_depth_map(depth, opt.out_prefix + "_depth");
    save_depth_pgm(depth, opt.out_prefix + "_depth.pgm");
    save_recon(recon, opt.out_prefix + "_recon");
    for (int axis = 0; axis < 3; ++axis) {
        const Image mip = max_intensity_projection(recon, axis);
        float peak = 0.0f;
        for (float v : mip.values) peak = std::max(peak, v);
        const char* names[3] = {"_mip_yz.pgm", "_mip_xz.pgm", "_mip_xy.pgm"};
        save_pgm(mip, opt.out_prefix + names[axis], 0.0f, peak > 0.0f ? peak : 1.0f);
    }

    ExtractReport report;
    for (int y = 0; y < depth.height(); ++y) {
        for (int x = 0; x < depth.width(); ++x) {
            if (depth.is_foreground(x, y, 0.0f)) ++report.foreground_pixels;
        }
    }
    nlohmann::json j;
    j["fraction"] = opt.fraction;
    j["grid"] = {opt.grid_nx, opt.grid_ny, opt.grid_nz};
    j["foreground_pixels"] = report.foreground_pixels;

    if (!opt.gt_path.empty()) {
        const DepthMap gt = load_depth_map(resolve_data_path(opt.gt_path));
        if (gt.width() != depth.width() || gt.height() != depth.height()) {
            throw InputError("extract-depth: reference label dims do not match grid");
        }
        const double tol = opt.tolerance_voxels * 2.0 / opt.grid_nz;
        int in_tol = 0, fg = 0;
        for (int y = 0; y < depth.height(); ++y) {
            for (int x = 0; x < depth.width(); ++x) {
                if (!depth.is_foreground(x, y, 0.0f)) continue;
                ++fg;
                if (std::abs(depth.at(x, y) - gt.at(x, y)) <= tol) ++in_tol;
            }
        }
        report.in_tolerance_fraction =
            fg > 0 ? static_cast<double>(in_tol) / static_cast<double>(fg) : 0.0;
        j["in_tolerance_fraction"] = report.in_tolerance_fraction;
        j["tolerance_voxels"] = opt.tolerance_voxels;
    }
    std::ofstream out(opt.out_prefix + "_report.json");
    out << j.dump(2) << "\n";
    return report;
}

// --- ablations -------------------------------------------------------------

std::vector<NoiseSweepLevel> noise_sweep(const Network<float>& net,
                                         const std::vector<Sample>& test_set,
                                         const std::vector<double>& target_psnr_db,
                                         int n_seeds, float eps, std::uint64_t seed) {
    if (test_set.empty()) throw InputError("noise_sweep: empty test set");
    std::vector<NoiseSweepLevel> levels;
    for (size_t li = 0; li < target_psnr_db.size(); ++li) {
        const double target = target_psnr_db[li];
        NoiseSweepLevel level;
        level.target_psnr_db = target;

        if (std::isinf(target) && target > 0.0) {
            // clean baseline
            std::vector<DepthMap> preds, gts;
            for (const Sample& s : test_set) {
                preds.push_back(predict(net, s.volume).depth);
                gts.push_back(s.label);
            }
            const EvalSummary summary = evaluate_predictions(preds, gts, eps);
            level.measured_psnr_db = target;
            level.accuracy = summary.mean_accuracy;
            level.rmse_tp = summary.mean_rmse_tp;
            levels.push_back(level);
            continue;
        }

        double acc_sum = 0.0, rmse_sum = 0.0, psnr_sum = 0.0;
        int rmse_n = 0;
        std::vector<double> acc_per_seed(static_cast<size_t>(n_seeds), 0.0);
        std::vector<double> rmse_per_seed(static_cast<size_t>(n_seeds), 0.0);
        std::vector<int> rmse_cnt_per_seed(static_cast<size_t>(n_seeds), 0);
        std::vector<double> psnr_per_seed(static_cast<size_t>(n_seeds), 0.0);
        parallel_for(n_seeds, [&](std::int64_t s) {
            double acc = 0.0, psnr_acc = 0.0, rmse_acc = 0.0;
            int rmse_cnt = 0;
            for (size_t i = 0; i < test_set.size(); ++i) {
                const TransientVolume& clean = test_set[i].volume;
                double mean = clean.sum() / static_cast<double>(clean.values.size());
                double peak = clean.max_value();
                if (peak <= 0.0 || mean <= 0.0) continue;
                // c such that 10*log10(c * peak^2 / mean) hits the target
                const double c = std::pow(10.0, target / 10.0) * mean / (peak * peak);
                TransientVolume counts = apply_sensor(
                    clean, c, 0.0, SensorMode::PoissonOnly,
                    mix_key(seed, (li * 1000 + static_cast<std::uint64_t>(s)) * 100003 + i));
                TransientVolume scaled_clean = clean;
                for (float& v : scaled_clean.values) v = static_cast<float>(v * c);
                const double p = psnr(scaled_clean, counts);
                psnr_acc += p;
                const DepthMap pred = predict(net, counts).depth;
                acc += accuracy(classify(pred, test_set[i].label, eps));
                const RmseResult r = rmse_tp(pred, test_set[i].label, eps);
                if (r.defined()) {
                    rmse_acc += r.value;
                    ++rmse_cnt;
                }
            }
            acc_per_seed[static_cast<size_t>(s)] = acc / static_cast<double>(test_set.size());
            psnr_per_seed[static_cast<size_t>(s)] =
                psnr_acc / static_cast<double>(test_set.size());
            rmse_per_seed[static_cast<size_t>(s)] = rmse_acc;
            rmse_cnt_per_seed[static_cast<size_t>(s)] = rmse_cnt;
        });
        for (int s = 0; s < n_seeds; ++s) {
            acc_sum += acc_per_seed[static_cast<size_t>(s)];
            psnr_sum += psnr_per_seed[static_cast<size_t>(s)];
            rmse_sum += rmse_per_seed[static_cast<size_t>(s)];
            rmse_n += rmse_cnt_per_seed[static_cast<size_t>(s)];
        }
        level.accuracy = acc_sum / n_seeds;
        level.measured_psnr_db = psnr_sum / n_seeds;
        level.rmse_tp = rmse_n > 0 ? rmse_sum / rmse_n : 0.0;
        levels.push_back(level);
    }
    return levels;
}

std::vector<DecimateLevel> decimate_sweep(const Network<float>& net,
                                          const std::vector<Sample>& test_set,
                                          const std::vector<int>& factors, float eps) {
    if (test_set.empty()) throw InputError("decimate_sweep: empty test set");
    std::vector<DecimateLevel> out;
    for (char axis : {'s', 't'}) {
        for (int f : factors) {
            DecimateLevel level;
            level.axis = axis;
            level.factor = f;
            std::vector<DepthMap> preds, gts;
            for (const Sample& s : test_set) {
                TransientVolume v = s.volume;
                if (f > 1) {
                    const int fx = axis == 's' ? f : 1;
                    const int ft = axis == 't' ? f : 1;
                    v = block_upsample(decimate(v, fx, fx, ft), fx, fx, ft);
                }
                preds.push_back(predict(net, v).depth);
                gts.push_back(s.label);
            }
            const EvalSummary summary = evaluate_predictions(preds, gts, eps);
            level.accuracy = summary.mean_accuracy;
            level.rmse_tp = summary.mean_rmse_tp;
            out.push_back(level);
        }
    }
    return out;
}

ModesReport sensor_modes_eval(const Network<float>& net_full,
                              const Network<float>& net_poisson,
                              const Network<float>& net_plain,
                              const std::vector<Sample>& test_set,
                              const AugmentationConfig& eval_aug, int n_seeds, float eps) {
    if (test_set.empty()) throw InputError("sensor_modes_eval: empty test set");
    ModesReport report;
    report.acc_full.resize(static_cast<size_t>(n_seeds));
    report.acc_poisson.resize(static_cast<size_t>(n_seeds));
    report.acc_plain.resize(static_cast<size_t>(n_seeds));
    parallel_for(n_seeds, [&](std::int64_t s) {
        double full = 0.0, pois = 0.0, plain = 0.0;
        for (size_t i = 0; i < test_set.size(); ++i) {
            const std::uint64_t stream = static_cast<std::uint64_t>(s) * 1000003 + i;
            const AugParams p = sample_aug_params(eval_aug, stream);
            const TransientVolume noisy =
                apply_sensor(test_set[i].volume, p.c, p.b, SensorMode::Full,
                             mix_key(eval_aug.seed ^ 0xE7A1, stream));
            full += accuracy(classify(predict(net_full, noisy).depth, test_set[i].label, eps));
            pois += accuracy(
                classify(predict(net_poisson, noisy).depth, test_set[i].label, eps));
            plain += accuracy(
                classify(predict(net_plain, noisy).depth, test_set[i].label, eps));
        }
        const double n = static_cast<double>(test_set.size());
        report.acc_full[static_cast<size_t>(s)] = full / n;
        report.acc_poisson[static_cast<size_t>(s)] = pois / n;
        report.acc_plain[static_cast<size_t>(s)] = plain / n;
    });
    return report;
}

bool ordering_holds(const std::vector<double>& higher, const std::vector<double>& lower) {
    if (higher.size() != lower.size() || higher.empty()) {
        throw InputError("ordering_holds: need paired samples");
    }
    const size_t n = higher.size();
    double mean = 0.0;
    for (size_t i = 0; i < n; ++i) mean += lower[i] - higher[i];
    mean /= static_cast<double>(n);
    if (mean <= 0.0) return true; // observed order correct or tied
    if (n < 2) return false;
    double var = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double d = lower[i] - higher[i] - mean;
        var += d * d;
    }
    var /= static_cast<double>(n - 1);
    const double se = std::sqrt(var / static_cast<double>(n));
    // t-quantiles (one-sided, 95%) for df = n-1; coarse table is enough here.
    const double t95 = n >= 30 ? 1.70 : (n >= 20 ? 1.729 : (n >= 10 ? 1.833 : 2.132));
    if (se == 0.0) return false; // constant inversion
    return mean / se <= t95;     // inversion not significant
}

void run_ablate(const AblateCmdOptions& opt) {
    const std::string manifest_path = resolve_data_path(opt.manifest_path);
    const DatasetManifest manifest = load_manifest(manifest_path);
    const std::vector<Sample> test_set =
        load_samples(manifest, manifest_dir(manifest_path), 1);
    fs::create_directories(opt.out_dir);

    if (opt.kind == "noise_sweep") {
        const Checkpoint ckpt = load_checkpoint(resolve_data_path(opt.checkpoint));
        const Network<float> net = network_from_checkpoint(ckpt);
        const auto levels =
            noise_sweep(net, test_set, opt.psnr_db, opt.seeds, opt.eps, opt.seed);
        std::ofstream csv((fs::path(opt.out_dir) / "noise_sweep.csv").string());
        csv << "target_psnr_db,measured_psnr_db,accuracy,rmse_tp\n";
        for (const auto& l : levels) {
            csv << l.target_psnr_db << "," << l.measured_psnr_db << "," << l.accuracy << ","
                << l.rmse_tp << "\n";
        }
    } else if (opt.kind == "decimate_sweep") {
        const Checkpoint ckpt = load_checkpoint(resolve_data_path(opt.checkpoint));
        const Network<float> net = network_from_checkpoint(ckpt);
        const auto levels = decimate_sweep(net, test_set, opt.factors, opt.eps);
        std::ofstream csv((fs::path(opt.out_dir) / "decimate_sweep.csv").string());
        csv << "axis,factor,accuracy,rmse_tp\n";
        for (const auto& l : levels) {
            csv << l.axis << "," << l.factor << "," << l.accuracy << "," << l.rmse_tp << "\n";
        }
    } else if (opt.kind == "sensor_modes") {
        const Network<float> net_full =
            network_from_checkpoint(load_checkpoint(resolve_data_path(opt.checkpoint)));
        const Network<float> net_poisson = network_from_checkpoint(
            load_checkpoint(resolve_data_path(opt.checkpoint_poisson)));
        const Network<float> net_plain = network_from_checkpoint(
            load_checkpoint(resolve_data_path(opt.checkpoint_plain)));
        const ModesReport report = sensor_modes_eval(net_full, net_poisson, net_plain,
                                                     test_set, opt.eval_aug, opt.seeds,
                                                     opt.eps);
        std::ofstream csv((fs::path(opt.out_dir) / "sensor_modes.csv").string());
        csv << "seed,acc_full,acc_poisson,acc_plain\n";
        for (size_t s = 0; s < report.acc_full.size(); ++s) {
            csv << s << "," << report.acc_full[s] << "," << report.acc_poisson[s] << ","
                << report.acc_plain[s] << "\n";
        }
        csv << "# ordering full>=poisson holds: "
            << (ordering_holds(report.acc_full, report.acc_poisson) ? "yes" : "no") << "\n";
        csv << "# ordering poisson>=plain holds: "
            << (ordering_holds(report.acc_poisson, report.acc_plain) ? "yes" : "no") << "\n";
    } else {
        throw InputError("ablate: unknown kind '" + opt.kind + "'");
    }
}

} // namespace nlos
