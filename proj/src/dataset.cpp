#include "nlos/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "nlos/common.hpp"
#include "nlos/primitives.hpp"
#include "nlos/rasterize.hpp"
#include "nlos/render.hpp"
#include "nlos/rng.hpp"
#include "nlos/sensor.hpp"

namespace fs = std::filesystem;

namespace nlos {

void DatasetManifest::validate(const std::string& base_dir) const {
    if (train_count + test_count != count || count != static_cast<int>(samples.size())) {
        throw InputError("manifest: split sizes do not sum to the sample count");
    }
    for (const auto& s : samples) {
        for (const std::string& rel : {s.volume, s.label}) {
            const fs::path p = fs::path(base_dir) / rel;
            if (!fs::exists(p)) throw InputError("manifest: missing file " + p.string());
            if (!fs::exists(p.string() + ".json")) {
                throw InputError("manifest: missing sidecar for " + p.string());
            }
        }
    }
}

void save_manifest(const DatasetManifest& manifest, const std::string& path) {
    nlohmann::json j;
    j["count"] = manifest.count;
    j["input_nx"] = manifest.input_nx;
    j["input_ny"] = manifest.input_ny;
    j["input_nt"] = manifest.input_nt;
    j["label_res"] = manifest.label_res;
    j["train_count"] = manifest.train_count;
    j["test_count"] = manifest.test_count;
    j["seed"] = manifest.seed;
    j["kind"] = manifest.kind;
    nlohmann::json samples = nlohmann::json::array();
    for (const auto& s : manifest.samples) {
        samples.push_back({{"volume", s.volume}, {"label", s.label}});
    }
    j["samples"] = samples;
    std::ofstream out(path);
    if (!out) throw IoError("save_manifest: cannot open " + path);
    out << j.dump(2) << "\n";
}

DatasetManifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("load_manifest: cannot open " + path);
    nlohmann::json j;
    in >> j;
    DatasetManifest m;
    m.count = j.at("count").get<int>();
    m.input_nx = j.at("input_nx").get<int>();
    m.input_ny = j.at("input_ny").get<int>();
    m.input_nt = j.at("input_nt").get<int>();
    m.label_res = j.at("label_res").get<int>();
    m.train_count = j.at("train_count").get<int>();
    m.test_count = j.at("test_count").get<int>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.kind = j.at("kind").get<std::string>();
    for (const auto& e : j.at("samples")) {
        m.samples.push_back({e.at("volume").get<std::string>(),
                             e.at("label").get<std::string>()});
    }
    return m;
}

std::string manifest_dir(const std::string& manifest_path) {
    const fs::path dir = fs::path(manifest_path).parent_path();
    return dir.empty() ? std::string(".") : dir.string();
}

namespace {

TriangleMesh place_flat(const TriangleMesh& mesh, double sx, double sy, double tx,
                        double ty, double tz) {
    TriangleMesh out = mesh;
    for (Vec3& v : out.vertices) {
        v = {v.x * sx + tx, v.y * sy + ty, v.z + tz};
    }
    return out;
}

TriangleMesh random_flat_shape(Rng& rng, std::uint64_t shape_seed) {
    PrimitiveParams params;
    TriangleMesh shape;
    switch (rng.next_below(4)) {
        case 0:
            params.radius = 0.7;
            params.segments = 16 + static_cast<int>(rng.next_below(33));
            shape = make_primitive(PrimitiveKind::Circle, params);
            break;
        case 1:
            params.width = 1.0 + rng.uniform(0.0, 0.6);
            params.height = 0.6 + rng.uniform(0.0, 0.6);
            shape = make_primitive(PrimitiveKind::Rectangle, params);
            break;
        case 2:
            params.base = 1.0 + rng.uniform(0.0, 0.6);
            params.height = 0.8 + rng.uniform(0.0, 0.6);
            shape = make_primitive(PrimitiveKind::Triangle, params);
            break;
        default: {
            const auto& letters = letter_set();
            params.letter = letters[rng.next_below(letters.size())];
            shape = make_primitive(PrimitiveKind::Letter, params);
            shape = place_flat(shape, 1.5, 1.5, 0.0, 0.0, 0.0);
            break;
        }
    }
    return random_affine(shape, AffineRanges{}, shape_seed);
}

} // namespace

DepthMap flat_label(int label_res, std::uint64_t seed, std::uint64_t sample_index,
                    int min_shapes, int max_shapes) {
    Rng rng(seed, 0xF1A7 + sample_index * 0x9E37);
    const int n_shapes = min_shapes + static_cast<int>(rng.next_below(
                             static_cast<std::uint64_t>(max_shapes - min_shapes + 1)));
    TriangleMesh scene;
    for (int s = 0; s < n_shapes; ++s) {
        const std::uint64_t shape_seed = mix_key(seed, sample_index * 16 + s);
        merge_mesh(scene, random_flat_shape(rng, shape_seed));
    }
    return project_depth(scene, label_res, label_res);
}

namespace {

ScanConfig render_config(const ScanConfig& scan, int supersample) {
    ScanConfig cfg = scan;
    cfg.nx *= supersample;
    cfg.ny *= supersample;
    return cfg;
}

TransientVolume render_label(const DepthMap& label, const GenOptions& opt) {
    const TriangleMesh mesh = triangulate_depth(label, opt.skirt_threshold);
    TransientVolume volume = render_confocal(mesh, render_config(opt.scan, opt.supersample));
    if (opt.supersample > 1) {
        volume = decimate(volume, opt.supersample, opt.supersample, 1);
    }
    return volume;
}

std::vector<std::string> list_files(const std::string& dir, const std::string& ext) {
    std::vector<std::string> files;
    if (!fs::is_directory(dir)) throw InputError("not a directory: " + dir);
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.is_regular_file() && e.path().extension() == ext) {
            files.push_back(e.path().string());
        }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw InputError("no " + ext + " files in " + dir);
    return files;
}

std::string sample_name(const char* prefix, int i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s_%05d", prefix, i);
    return buf;
}

DatasetManifest write_dataset(const std::string& out_dir, const GenOptions& opt,
                              const std::vector<DepthMap>& labels) {
    fs::create_directories(out_dir);
    DatasetManifest manifest;
    manifest.count = static_cast<int>(labels.size());
    manifest.input_nx = opt.scan.nx;
    manifest.input_ny = opt.scan.ny;
    manifest.input_nt = opt.scan.nt;
    manifest.label_res = opt.label_res;
    manifest.train_count = static_cast<int>(
        std::llround(opt.train_fraction * static_cast<double>(labels.size())));
    manifest.test_count = manifest.count - manifest.train_count;
    manifest.seed = opt.seed;
    manifest.kind = opt.kind;
    manifest.samples.resize(labels.size());

    parallel_for(static_cast<std::int64_t>(labels.size()), [&](std::int64_t i) {
        const std::string label_name = sample_name("label", static_cast<int>(i));
        const std::string volume_name = sample_name("volume", static_cast<int>(i));
        save_depth_map(labels[static_cast<size_t>(i)],
                       (fs::path(out_dir) / label_name).string());
        const TransientVolume volume = render_label(labels[static_cast<size_t>(i)], opt);
        save_volume(volume, (fs::path(out_dir) / volume_name).string());
        manifest.samples[static_cast<size_t>(i)] = {volume_name, label_name};
    });

    save_manifest(manifest, (fs::path(out_dir) / "manifest.json").string());
    return manifest;
}

} // namespace

DatasetManifest generate_dataset(const GenOptions& opt, const std::string& out_dir) {
    if (opt.count < 1) throw InputError("generate_dataset: count must be >= 1");
    if (opt.supersample < 1) throw InputError("generate_dataset: supersample must be >= 1");
    render_config(opt.scan, opt.supersample).validate();

    std::vector<DepthMap> labels(static_cast<size_t>(opt.count));
    if (opt.kind == "flat") {
        parallel_for(opt.count, [&](std::int64_t i) {
            labels[static_cast<size_t>(i)] =
                flat_label(opt.label_res, opt.seed, static_cast<std::uint64_t>(i),
                           opt.min_shapes, opt.max_shapes);
        });
    } else if (opt.kind == "mesh") {
        const std::vector<std::string> files = list_files(opt.mesh_dir, ".obj");
        std::vector<TriangleMesh> meshes;
        meshes.reserve(files.size());
        for (const auto& f : files) meshes.push_back(normalize_to_unit(load_obj(f)));
        parallel_for(opt.count, [&](std::int64_t i) {
            Rng rng(opt.seed, 0x3E54 + static_cast<std::uint64_t>(i));
            const TriangleMesh& base = meshes[rng.next_below(meshes.size())];
            const TriangleMesh posed =
                random_affine(base, AffineRanges{},
                              mix_key(opt.seed, 0xBEEF0 + static_cast<std::uint64_t>(i)));
            labels[static_cast<size_t>(i)] =
                project_depth(posed, opt.label_res, opt.label_res);
        });
    } else if (opt.kind == "ingested") {
        const std::vector<std::string> files = list_files(opt.frame_dir, ".pgm");
        IngestOptions ingest = opt.ingest;
        ingest.target_res = opt.label_res;
        for (int i = 0; i < opt.count; ++i) {
            const Image frame = load_pgm(files[static_cast<size_t>(i) % files.size()]);
            labels[static_cast<size_t>(i)] = ingest_depth_frame(frame, ingest);
        }
    } else {
        throw InputError("generate_dataset: unknown kind '" + opt.kind + "'");
    }
    return write_dataset(out_dir, opt, labels);
}

namespace {

// Hemisphere bump over an elliptical footprint.
void stamp_blob(DepthMap& map, double cx, double cy, double r, double base, double h) {
    for (int y = 0; y < map.height(); ++y) {
        for (int x = 0; x < map.width(); ++x) {
            const double px = grid_coord(x, map.width());
            const double py = grid_coord(y, map.height());
            const double d = std::sqrt((px - cx) * (px - cx) + (py - cy) * (py - cy));
            if (d < r) {
                const double z = base + h * std::sqrt(1.0 - (d / r) * (d / r));
                map.at(x, y) = std::max(map.at(x, y), static_cast<float>(z));
            }
        }
    }
}

void stamp_box(DepthMap& map, double x0, double y0, double x1, double y1, double z) {
    for (int y = 0; y < map.height(); ++y) {
        for (int x = 0; x < map.width(); ++x) {
            const double px = grid_coord(x, map.width());
            const double py = grid_coord(y, map.height());
            if (px >= x0 && px <= x1 && py >= y0 && py <= y1) {
                map.at(x, y) = std::max(map.at(x, y), static_cast<float>(z));
            }
        }
    }
}

DepthMap scene_blob(int res) {
    DepthMap map(res, res);
    stamp_blob(map, 0.1, -0.05, 0.45, -0.1, 0.45);
    return map;
}

DepthMap scene_figure(int res) {
    DepthMap map(res, res);
    stamp_box(map, -0.12, -0.25, 0.12, 0.35, 0.0);    // torso
    stamp_blob(map, 0.0, 0.5, 0.16, 0.05, 0.05);      // head
    stamp_box(map, -0.55, 0.15, 0.55, 0.3, 0.05);     // arms
    stamp_box(map, -0.14, -0.75, -0.03, -0.25, -0.05); // legs
    stamp_box(map, 0.03, -0.75, 0.14, -0.25, -0.05);
    return map;
}

DepthMap scene_spoly(int res) {
    PrimitiveParams params;
    params.letter = 'S';
    TriangleMesh s = make_primitive(PrimitiveKind::Letter, params);
    s = place_flat(s, 1.6, 1.6, 0.0, 0.0, 0.1);
    return project_depth(s, res, res);
}

} // namespace

DatasetManifest generate_scenes(const ScanConfig& scan, int supersample, int label_res,
                                const std::string& out_dir) {
    GenOptions opt;
    opt.kind = "scenes";
    opt.count = 3;
    opt.label_res = label_res;
    opt.scan = scan;
    opt.supersample = supersample;
    opt.train_fraction = 0.0; // all test
    render_config(scan, supersample).validate();

    std::vector<DepthMap> labels = {scene_blob(label_res), scene_figure(label_res),
                                    scene_spoly(label_res)};
    return write_dataset(out_dir, opt, labels);
}

std::vector<Sample> load_samples(const DatasetManifest& manifest,
                                 const std::string& base_dir, int which) {
    size_t begin = 0, end = manifest.samples.size();
    if (which == 0) end = static_cast<size_t>(manifest.train_count);
    if (which == 1) begin = static_cast<size_t>(manifest.train_count);
    std::vector<Sample> samples;
    samples.reserve(end - begin);
    for (size_t i = begin; i < end; ++i) {
        Sample s;
        s.volume = load_volume((fs::path(base_dir) / manifest.samples[i].volume).string());
        s.label = load_depth_map((fs::path(base_dir) / manifest.samples[i].label).string());
        samples.push_back(std::move(s));
    }
    return samples;
}

} // namespace nlos
