#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nlos/depth_map.hpp"
#include "nlos/ingest.hpp"
#include "nlos/mesh.hpp"
#include "nlos/train.hpp"
#include "nlos/transient.hpp"

namespace nlos {

struct SampleEntry {
    std::string volume;
    std::string label;
};

struct DatasetManifest {
    int count = 0;
    int input_nx = 0, input_ny = 0, input_nt = 0;
    int label_res = 0;
    int train_count = 0, test_count = 0;
    std::uint64_t seed = 0;
    std::string kind;
    std::vector<SampleEntry> samples; // train split first, then test

    void validate(const std::string& base_dir) const;
};

void save_manifest(const DatasetManifest& manifest, const std::string& path);
DatasetManifest load_manifest(const std::string& path);

std::string manifest_dir(const std::string& manifest_path);

struct GenOptions {
    std::string kind = "flat"; // flat | mesh | ingested
    int count = 16;
    int label_res = 64;
    ScanConfig scan;           // input dims come from scan.{nx,ny,nt}
    int supersample = 2;       // render wall-grid factor, averaged back down
    double train_fraction = 0.9;
    std::uint64_t seed = 0;
    int min_shapes = 1, max_shapes = 3; // flat
    std::string mesh_dir;      // mesh: directory of .obj files
    std::string frame_dir;     // ingested: directory of .pgm depth frames
    IngestOptions ingest;
    double skirt_threshold = 0.5;
};

// Draws a label depth map (flat primitives, posed meshes, or ingested
// frames), triangulates it, renders the transient volume at the
// supersampled wall grid and averages down. Deterministic per seed.
DatasetManifest generate_dataset(const GenOptions& opt, const std::string& out_dir);

// The three bundled test scenes (blob, figure, spoly) as a small
// all-test dataset.
DatasetManifest generate_scenes(const ScanConfig& scan, int supersample, int label_res,
                                const std::string& out_dir);

// Label generator for one flat-composition sample; exposed for tests.
DepthMap flat_label(int label_res, std::uint64_t seed, std::uint64_t sample_index,
                    int min_shapes, int max_shapes);

// Loads manifest samples into memory. which: 0 = train split, 1 = test
// split, 2 = all.
std::vector<Sample> load_samples(const DatasetManifest& manifest,
                                 const std::string& base_dir, int which);

} // namespace nlos
