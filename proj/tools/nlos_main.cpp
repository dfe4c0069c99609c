// Command-line surface for the NLoS imaging toolkit: dataset synthesis,
// sensor simulation, training, prediction, evaluation, ablations and
// volumetric depth extraction.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nlos/commands.hpp"
#include "nlos/common.hpp"
#include "nlos/dataset.hpp"
#include "nlos/rasterize.hpp"
#include "nlos/render.hpp"
#include "nlos/sensor.hpp"

using namespace nlos;

namespace {

void add_scan_options(CLI::App* cmd, ScanConfig& scan) {
    cmd->add_option("--nx", scan.nx, "wall grid width");
    cmd->add_option("--ny", scan.ny, "wall grid height");
    cmd->add_option("--nt", scan.nt, "time bins");
    cmd->add_option("--dt-s", scan.dt_s, "bin width in seconds");
    cmd->add_option("--scale-m", scan.scale_m, "meters per scene unit");
    cmd->add_option("--wall-z", scan.wall_z, "wall plane z");
    cmd->add_option("--extent", scan.extent, "scan half-extent");
}

void add_aug_options(CLI::App* cmd, AugmentationConfig& aug, std::string& mode) {
    cmd->add_option("--c-min", aug.c_min, "intensity scale lower bound");
    cmd->add_option("--c-max", aug.c_max, "intensity scale upper bound");
    cmd->add_option("--b-min", aug.b_min, "bias lower bound (counts/bin)");
    cmd->add_option("--b-max", aug.b_max, "bias upper bound (counts/bin)");
    cmd->add_option("--mode", mode, "sensor mode: plain | poisson | full");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"non-line-of-sight transient imaging toolkit"};
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    int threads = 0;
    bool deterministic = false;
    app.add_option("--seed", seed, "global random seed");
    app.add_option("--threads", threads, "worker count (0 = hardware)");
    app.add_flag("--deterministic", deterministic, "single-threaded reference mode");

    // gen-dataset
    GenOptions gen;
    std::string gen_out;
    auto* cmd_gen = app.add_subcommand("gen-dataset", "synthesize labels and renderings");
    cmd_gen->add_option("--kind", gen.kind, "flat | mesh | ingested");
    cmd_gen->add_option("--count", gen.count, "sample count");
    cmd_gen->add_option("--label-res", gen.label_res, "depth map resolution");
    cmd_gen->add_option("--supersample", gen.supersample, "render grid factor");
    cmd_gen->add_option("--train-frac", gen.train_fraction, "train split fraction");
    cmd_gen->add_option("--mesh-dir", gen.mesh_dir, "OBJ directory (kind=mesh)");
    cmd_gen->add_option("--frame-dir", gen.frame_dir, "PGM depth frames (kind=ingested)");
    cmd_gen->add_option("--near", gen.ingest.near, "ingest: near plane (native units)");
    cmd_gen->add_option("--far", gen.ingest.far, "ingest: far plane (native units)");
    cmd_gen->add_option("--crop", gen.ingest.crop, "ingest: center crop side (0 = max)");
    cmd_gen->add_option("--min-shapes", gen.min_shapes, "flat: min shapes per scene");
    cmd_gen->add_option("--max-shapes", gen.max_shapes, "flat: max shapes per scene");
    add_scan_options(cmd_gen, gen.scan);
    cmd_gen->add_option("--out", gen_out, "output directory")->required();

    // gen-scenes
    ScanConfig scenes_scan;
    int scenes_supersample = 2;
    int scenes_label_res = 64;
    std::string scenes_out;
    auto* cmd_scenes = app.add_subcommand("gen-scenes", "bundled blob/figure/spoly test set");
    add_scan_options(cmd_scenes, scenes_scan);
    cmd_scenes->add_option("--supersample", scenes_supersample, "render grid factor");
    cmd_scenes->add_option("--label-res", scenes_label_res, "depth map resolution");
    cmd_scenes->add_option("--out", scenes_out, "output directory")->required();

    // render
    std::string render_obj, render_depth, render_out;
    double render_skirt = 0.5;
    ScanConfig render_scan;
    auto* cmd_render = app.add_subcommand("render", "render one transient volume");
    cmd_render->add_option("--obj", render_obj, "OBJ mesh input");
    cmd_render->add_option("--depth", render_depth, "depth map input (triangulated)");
    cmd_render->add_option("--skirt", render_skirt, "depth triangulation jump threshold");
    add_scan_options(cmd_render, render_scan);
    cmd_render->add_option("--out", render_out, "output volume path")->required();

    // augment
    std::string aug_in, aug_out, aug_mode = "full";
    AugmentationConfig aug_cfg;
    double aug_c = 0.0, aug_b = -1.0;
    std::uint64_t aug_index = 0;
    auto* cmd_aug = app.add_subcommand("augment", "apply the sensor model to a volume");
    cmd_aug->add_option("--in", aug_in, "input volume")->required();
    cmd_aug->add_option("--out", aug_out, "output volume")->required();
    cmd_aug->add_option("--c", aug_c, "explicit intensity scale (overrides sampling)");
    cmd_aug->add_option("--b", aug_b, "explicit bias (overrides sampling)");
    cmd_aug->add_option("--sample-index", aug_index, "sampling stream index");
    add_aug_options(cmd_aug, aug_cfg, aug_mode);

    // train
    TrainCmdOptions tr;
    std::string tr_mode = "full";
    std::string tr_loss = "mse";
    auto* cmd_train = app.add_subcommand("train", "train a regressor on a dataset");
    cmd_train->add_option("--manifest", tr.manifest_path, "dataset manifest")->required();
    cmd_train->add_option("--out", tr.checkpoint_out, "checkpoint output")->required();
    cmd_train->add_option("--loss-csv", tr.loss_csv, "per-epoch loss curve CSV");
    cmd_train->add_option("--epochs", tr.train.epochs, "epoch count");
    cmd_train->add_option("--batch", tr.train.batch, "batch size");
    cmd_train->add_option("--lr", tr.train.lr, "learning rate");
    cmd_train->add_option("--levels", tr.arch.levels, "encoder level count");
    cmd_train->add_option("--base-channels", tr.arch.base_channels, "channels at level 1");
    cmd_train->add_option("--dense-layers", tr.arch.dense_layers, "regressor dense layers");
    cmd_train->add_option("--reg-channels", tr.arch.regressor_channels,
                          "regressor 1x1 contraction");
    cmd_train->add_flag("--no-normalize", [&tr](std::int64_t) {
        tr.arch.normalize_input = false;
    }, "disable per-volume input normalization");
    cmd_train->add_option("--loss", tr_loss, "mse | l1");
    cmd_train->add_flag("--verbose", tr.train.verbose, "per-epoch loss lines");
    add_aug_options(cmd_train, tr.train.aug, tr_mode);

    // predict
    PredictCmdOptions pr;
    std::vector<int> pr_decimate;
    auto* cmd_predict = app.add_subcommand("predict", "reconstruct depth maps");
    cmd_predict->add_option("--checkpoint", pr.checkpoint, "trained checkpoint")->required();
    cmd_predict->add_option("--volume", pr.volumes, "input volume(s)");
    cmd_predict->add_option("--manifest", pr.manifest_path, "manifest (test split)");
    cmd_predict->add_option("--out", pr.out_dir, "output directory")->required();
    cmd_predict->add_flag("--normalize", pr.normalize_import,
                          "max-normalize volumes on import");
    cmd_predict->add_option("--decimate", pr_decimate,
                            "fx fy ft blockwise decimation before prediction")
        ->expected(3);

    // eval
    EvalCmdOptions ev;
    auto* cmd_eval = app.add_subcommand("eval", "score predictions against labels");
    cmd_eval->add_option("--manifest", ev.manifest_path, "dataset manifest")->required();
    cmd_eval->add_option("--pred", ev.pred_dir, "prediction directory")->required();
    cmd_eval->add_option("--out", ev.out_dir, "metrics/error-map output dir")->required();
    cmd_eval->add_option("--eps", ev.eps, "foreground threshold");

    // extract-depth
    ExtractCmdOptions ex;
    std::vector<int> ex_grid;
    std::vector<int> ex_window;
    auto* cmd_extract = app.add_subcommand("extract-depth",
                                           "backproject and segment a depth map");
    cmd_extract->add_option("--volume", ex.volume_path, "input volume")->required();
    cmd_extract->add_option("--out", ex.out_prefix, "output prefix")->required();
    cmd_extract->add_option("--grid", ex_grid, "nx ny nz voxel grid")->expected(3);
    cmd_extract->add_option("--fraction", ex.fraction, "segmentation threshold fraction");
    cmd_extract->add_option("--window", ex_window, "t0 t1 temporal crop")->expected(2);
    cmd_extract->add_option("--gt", ex.gt_path, "reference label for the report");
    cmd_extract->add_option("--tol-voxels", ex.tolerance_voxels, "report tolerance");

    // ablate
    AblateCmdOptions ab;
    std::string ab_mode = "full";
    auto* cmd_ablate = app.add_subcommand("ablate",
                                          "noise_sweep | decimate_sweep | sensor_modes");
    cmd_ablate->add_option("--kind", ab.kind, "ablation kind")->required();
    cmd_ablate->add_option("--checkpoint", ab.checkpoint, "checkpoint (full model)")
        ->required();
    cmd_ablate->add_option("--checkpoint-poisson", ab.checkpoint_poisson,
                           "poisson-only checkpoint (sensor_modes)");
    cmd_ablate->add_option("--checkpoint-plain", ab.checkpoint_plain,
                           "plain checkpoint (sensor_modes)");
    cmd_ablate->add_option("--manifest", ab.manifest_path, "dataset manifest")->required();
    cmd_ablate->add_option("--out", ab.out_dir, "report directory")->required();
    cmd_ablate->add_option("--psnr", ab.psnr_db, "noise sweep PSNR ladder (dB)");
    cmd_ablate->add_option("--factors", ab.factors, "decimation factors");
    cmd_ablate->add_option("--eval-seeds", ab.seeds, "evaluation seed count");
    cmd_ablate->add_option("--eps", ab.eps, "foreground threshold");
    add_aug_options(cmd_ablate, ab.eval_aug, ab_mode);

    CLI11_PARSE(app, argc, argv);

    try {
        set_thread_count(deterministic ? 1 : (threads > 0 ? threads : thread_count()));

        if (cmd_gen->parsed()) {
            gen.seed = seed;
            const DatasetManifest m = generate_dataset(gen, gen_out);
            std::printf("wrote %d samples (%d train / %d test) to %s\n", m.count,
                        m.train_count, m.test_count, gen_out.c_str());
        } else if (cmd_scenes->parsed()) {
            const DatasetManifest m =
                generate_scenes(scenes_scan, scenes_supersample, scenes_label_res, scenes_out);
            std::printf("wrote %d test scenes to %s\n", m.count, scenes_out.c_str());
        } else if (cmd_render->parsed()) {
            TriangleMesh mesh;
            if (!render_obj.empty()) {
                mesh = load_obj(resolve_data_path(render_obj));
            } else if (!render_depth.empty()) {
                mesh = triangulate_depth(load_depth_map(resolve_data_path(render_depth)),
                                         render_skirt);
            } else {
                throw InputError("render: need --obj or --depth");
            }
            save_volume(render_confocal(mesh, render_scan), render_out);
            std::printf("rendered %zu triangles to %s\n", mesh.triangles.size(),
                        render_out.c_str());
        } else if (cmd_aug->parsed()) {
            aug_cfg.mode = sensor_mode_from_string(aug_mode);
            aug_cfg.seed = seed;
            double c = aug_c, b = aug_b;
            if (c <= 0.0 || b < 0.0) {
                const AugParams p = sample_aug_params(aug_cfg, aug_index);
                if (c <= 0.0) c = p.c;
                if (b < 0.0) b = p.b;
            }
            const TransientVolume volume = load_volume(resolve_data_path(aug_in));
            save_volume(apply_sensor(volume, c, b, aug_cfg.mode, mix_key(seed, aug_index)),
                        aug_out);
            std::printf("applied %s sensor model (c=%g, b=%g) to %s\n", aug_mode.c_str(), c,
                        b, aug_out.c_str());
        } else if (cmd_train->parsed()) {
            tr.train.aug.mode = sensor_mode_from_string(tr_mode);
            tr.train.aug.seed = seed;
            tr.train.seed = seed;
            tr.arch.seed = seed + 1;
            tr.train.loss = tr_loss == "l1" ? LossKind::L1 : LossKind::Mse;
            const Checkpoint ckpt = run_train(tr);
            std::printf("best epoch %d, val loss %.6f, checkpoint %s\n",
                        ckpt.history.best_epoch,
                        ckpt.history.val_loss[static_cast<size_t>(ckpt.history.best_epoch)],
                        tr.checkpoint_out.c_str());
        } else if (cmd_predict->parsed()) {
            if (pr_decimate.size() == 3) {
                pr.decimate_fx = pr_decimate[0];
                pr.decimate_fy = pr_decimate[1];
                pr.decimate_ft = pr_decimate[2];
            }
            const auto outputs = run_predict(pr);
            std::printf("wrote %zu prediction(s) to %s\n", outputs.size(),
                        pr.out_dir.c_str());
        } else if (cmd_eval->parsed()) {
            const EvalSummary s = run_eval(ev);
            std::printf("accuracy %.4f  rmse_tp %.4f (%d samples with TP)\n",
                        s.mean_accuracy, s.mean_rmse_tp, s.rmse_defined);
        } else if (cmd_extract->parsed()) {
            if (ex_grid.size() == 3) {
                ex.grid_nx = ex_grid[0];
                ex.grid_ny = ex_grid[1];
                ex.grid_nz = ex_grid[2];
            }
            if (ex_window.size() == 2) {
                ex.window_t0 = ex_window[0];
                ex.window_t1 = ex_window[1];
            }
            const ExtractReport r = run_extract_depth(ex);
            if (r.in_tolerance_fraction >= 0.0) {
                std::printf("foreground %d px, in-tolerance %.2f%%\n", r.foreground_pixels,
                            100.0 * r.in_tolerance_fraction);
            } else {
                std::printf("foreground %d px\n", r.foreground_pixels);
            }
        } else if (cmd_ablate->parsed()) {
            ab.seed = seed;
            ab.eval_aug.mode = sensor_mode_from_string(ab_mode);
            ab.eval_aug.seed = seed;
            run_ablate(ab);
            std::printf("ablation reports written to %s\n", ab.out_dir.c_str());
        }
    } catch (const ParamError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const ShapeError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const InputError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const IngestError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
