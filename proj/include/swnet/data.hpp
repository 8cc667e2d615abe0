#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "swnet/tensor.hpp"

namespace swnet::data {

/// One aligned record: rgb (3,H,W) and nir (1,H,W) in [0,1], mask (H,W) in
/// {0,1}. The edge map, when present, is always derive_edge_gt(mask).
struct BimodalSample {
    std::string id;
    Tensor rgb;
    Tensor nir;
    Tensor mask;
    std::optional<Tensor> edge;
    int edge_window = 3;
};

struct DatasetManifest {
    std::filesystem::path root;
    std::vector<std::string> samples;  // sorted, unique
    std::string split;                 // train | test | all
    std::string source;                // disk | synthetic
};

/// Generator settings for the spectral-camouflage corpus. rgb_gap is the
/// foreground brightness offset in the visible channels (0 = targets share
/// the background colour distribution); nir_gap is the reflectance offset in
/// the NIR band.
struct SynthConfig {
    int n_samples = 200;
    int size = 64;
    int blobs_min = 1;
    int blobs_max = 3;
    real rgb_gap = 0.0;
    real nir_gap = 0.4;
    real texture_scale = 16.0;
    real noise_sigma = 0.03;
    uint64_t seed = 1;

    void validate() const;
};

/// Scans root/{rgb,nir,mask} for identically named PNG files. Any id missing
/// one of its three files is a hard error naming the id. The train/test split
/// is a deterministic 80/20 cut of the lexicographically sorted id list.
DatasetManifest load_dataset(const std::filesystem::path& root, const std::string& split);

BimodalSample load_sample(const std::filesystem::path& root, const std::string& id);
void save_sample(const std::filesystem::path& root, const BimodalSample& sample);

/// Deterministic under (cfg.seed, index); used by generate_synthetic and by
/// in-memory tests.
BimodalSample synthesize_sample(const SynthConfig& cfg, int index);

/// Materializes cfg.n_samples records under out_root in the same layout
/// load_dataset consumes, plus a manifest.json.
DatasetManifest generate_synthetic(const SynthConfig& cfg, const std::filesystem::path& out_root);

/// edge(p) = maxpool_k(mask)(p) - minpool_k(mask)(p), replicate padding.
Tensor derive_edge_gt(const Tensor& mask, int k = 3);

/// Bilinear for rgb/nir, nearest + re-binarize for the mask; the edge map is
/// recomputed from the resized mask, never resampled.
BimodalSample resize_sample(const BimodalSample& s, int side);

void write_manifest(const DatasetManifest& m, const std::filesystem::path& path);
DatasetManifest read_manifest(const std::filesystem::path& path);

}  // namespace swnet::data
