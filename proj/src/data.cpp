#include "swnet/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "swnet/image_io.hpp"
#include "swnet/rng.hpp"
#include "swnet/tensor_ops.hpp"

namespace swnet::data {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kModalityDirs[3] = {"rgb", "nir", "mask"};

std::set<std::string> list_png_stems(const fs::path& dir) {
    std::set<std::string> stems;
    if (!fs::is_directory(dir)) return stems;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        if (entry.path().extension() == ".png") stems.insert(entry.path().stem().string());
    }
    return stems;
}

uint64_t mix64(uint64_t a, uint64_t b) {
    uint64_t x = a + 0x9E3779B97F4A7C15ull + (b << 6) + (b >> 2);
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ull;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBull;
    x ^= x >> 31;
    return x;
}

/// Bilinearly interpolated lattice noise in [0,1], `cell` pixels per lattice
/// step, two octaves.
Tensor value_noise(int size, real cell, Rng& rng) {
    Tensor field({size, size});
    real amp_total = 0;
    real amp = real(0.65);
    real scale = cell;
    for (int octave = 0; octave < 2; ++octave) {
        const int grid = static_cast<int>(std::ceil(size / scale)) + 2;
        std::vector<real> lattice(static_cast<size_t>(grid) * grid);
        for (auto& v : lattice) v = rng.uniform01();
        for (int y = 0; y < size; ++y) {
            const real fy = y / scale;
            const int y0 = static_cast<int>(fy);
            const real wy = fy - y0;
            for (int x = 0; x < size; ++x) {
                const real fx = x / scale;
                const int x0 = static_cast<int>(fx);
                const real wx = fx - x0;
                const real v00 = lattice[static_cast<size_t>(y0) * grid + x0];
                const real v01 = lattice[static_cast<size_t>(y0) * grid + x0 + 1];
                const real v10 = lattice[static_cast<size_t>(y0 + 1) * grid + x0];
                const real v11 = lattice[static_cast<size_t>(y0 + 1) * grid + x0 + 1];
                const real v = (v00 * (1 - wx) + v01 * wx) * (1 - wy) +
                               (v10 * (1 - wx) + v11 * wx) * wy;
                field.at(y, x) += amp * v;
            }
        }
        amp_total += amp;
        amp *= real(0.5);
        scale = std::max(real(2), scale * real(0.5));
    }
    for (size_t i = 0; i < field.size(); ++i) field[i] /= amp_total;
    return field;
}

/// Star-convex blob: radius modulated by a few low harmonics.
void stamp_blob(Tensor& mask, int size, Rng& rng) {
    const real margin = real(0.2) * size;
    const real cy = rng.uniform(margin, size - margin);
    const real cx = rng.uniform(margin, size - margin);
    const real r0 = rng.uniform(real(0.09) * size, real(0.16) * size);
    real amp[3], phase[3];
    for (int k = 0; k < 3; ++k) {
        amp[k] = rng.uniform(0, real(0.2) / (k + 1));
        phase[k] = rng.uniform(0, 2 * M_PI);
    }
    const int reach = static_cast<int>(std::ceil(r0 * real(1.8))) + 1;
    const int y_lo = std::max(0, static_cast<int>(cy) - reach);
    const int y_hi = std::min(size - 1, static_cast<int>(cy) + reach);
    const int x_lo = std::max(0, static_cast<int>(cx) - reach);
    const int x_hi = std::min(size - 1, static_cast<int>(cx) + reach);
    for (int y = y_lo; y <= y_hi; ++y) {
        for (int x = x_lo; x <= x_hi; ++x) {
            const real dy = y - cy;
            const real dx = x - cx;
            const real dist = std::sqrt(dy * dy + dx * dx);
            const real theta = std::atan2(dy, dx);
            real radius = r0;
            for (int k = 0; k < 3; ++k) radius += r0 * amp[k] * std::cos((k + 2) * theta + phase[k]);
            if (dist <= radius) mask.at(y, x) = 1;
        }
    }
}

void require_binary_mask(const Tensor& mask, const char* what) {
    if (!ops::is_binary(mask))
        throw std::invalid_argument(std::string(what) + ": mask must be binary {0,1}");
}

}  // namespace

void SynthConfig::validate() const {
    if (n_samples <= 0) throw std::invalid_argument("synth: n_samples must be positive");
    if (size < 64) throw std::invalid_argument("synth: size must be at least 64");
    if (blobs_min < 1 || blobs_max < blobs_min)
        throw std::invalid_argument("synth: blob count range must satisfy 1 <= min <= max");
    if (rgb_gap < 0 || rgb_gap > 1 || nir_gap < 0 || nir_gap > 1)
        throw std::invalid_argument("synth: gaps must lie in [0,1]");
    if (rgb_gap == 0 && nir_gap == 0)
        throw std::invalid_argument(
            "synth: rgb_gap and nir_gap are both zero; targets would be undetectable");
    if (texture_scale < 2) throw std::invalid_argument("synth: texture_scale too small");
    if (noise_sigma < 0) throw std::invalid_argument("synth: noise_sigma must be nonnegative");
}

Tensor derive_edge_gt(const Tensor& mask, int k) {
    if (mask.rank() != 2) throw std::invalid_argument("derive_edge_gt: mask must be (H,W)");
    if (k < 1 || k % 2 == 0) throw std::invalid_argument("derive_edge_gt: window must be odd");
    require_binary_mask(mask, "derive_edge_gt");
    Tensor hi = ops::maxpool(mask, k);
    Tensor lo = ops::minpool(mask, k);
    Tensor edge(mask.shape());
    for (size_t i = 0; i < edge.size(); ++i) edge[i] = hi[i] - lo[i];
    return edge;
}

DatasetManifest load_dataset(const std::filesystem::path& root, const std::string& split) {
    if (split != "train" && split != "test" && split != "all")
        throw std::invalid_argument("load_dataset: split must be train, test or all");

    std::set<std::string> stems[3];
    for (int m = 0; m < 3; ++m) stems[m] = list_png_stems(root / kModalityDirs[m]);

    std::set<std::string> all;
    for (const auto& s : stems) all.insert(s.begin(), s.end());
    if (all.empty())
        throw std::runtime_error("load_dataset: no complete samples under " + root.string());

    for (const auto& id : all)
        for (int m = 0; m < 3; ++m)
            if (!stems[m].count(id))
                throw std::runtime_error("load_dataset: sample '" + id + "' is missing its " +
                                         kModalityDirs[m] + " file");

    std::vector<std::string> ids(all.begin(), all.end());  // set iterates sorted
    const size_t n_train = ids.size() * 4 / 5;
    DatasetManifest manifest;
    manifest.root = root;
    manifest.split = split;
    manifest.source = "disk";
    if (split == "train")
        manifest.samples.assign(ids.begin(), ids.begin() + static_cast<long>(n_train));
    else if (split == "test")
        manifest.samples.assign(ids.begin() + static_cast<long>(n_train), ids.end());
    else
        manifest.samples = std::move(ids);
    return manifest;
}

BimodalSample load_sample(const std::filesystem::path& root, const std::string& id) {
    BimodalSample s;
    s.id = id;
    const auto rgb_img = img::read_png(root / "rgb" / (id + ".png"));
    const auto nir_img = img::read_png(root / "nir" / (id + ".png"));
    const auto mask_img = img::read_png(root / "mask" / (id + ".png"));
    if (rgb_img.channels != 3)
        throw std::runtime_error("load_sample: rgb image for '" + id + "' must be 3-channel");
    if (nir_img.channels != 1)
        throw std::runtime_error("load_sample: nir image for '" + id + "' must be 1-channel");
    if (nir_img.width != rgb_img.width || nir_img.height != rgb_img.height ||
        mask_img.width != rgb_img.width || mask_img.height != rgb_img.height)
        throw std::runtime_error("load_sample: size mismatch across modalities for '" + id + "'");
    s.rgb = img::to_tensor_rgb(rgb_img);
    s.nir = img::to_tensor_gray(nir_img);
    s.mask = img::to_mask(mask_img);
    return s;
}

void save_sample(const std::filesystem::path& root, const BimodalSample& s) {
    for (const char* d : kModalityDirs) std::filesystem::create_directories(root / d);
    img::write_png(root / "rgb" / (s.id + ".png"), img::from_tensor_rgb(s.rgb));
    img::write_png(root / "nir" / (s.id + ".png"), img::from_tensor_gray(s.nir));
    img::write_png(root / "mask" / (s.id + ".png"), img::from_mask(s.mask));
}

BimodalSample synthesize_sample(const SynthConfig& cfg, int index) {
    cfg.validate();
    Rng rng(mix64(cfg.seed, static_cast<uint64_t>(index)));

    const int size = cfg.size;
    Tensor base = value_noise(size, cfg.texture_scale, rng);

    Tensor mask({size, size});
    const int blobs = rng.uniform_int(cfg.blobs_min, cfg.blobs_max);
    for (int b = 0; b < blobs; ++b) stamp_blob(mask, size, rng);

    // RGB channels are affine views of the shared texture field; the target
    // offset (rgb_gap) is the only foreground cue in the visible range.
    const real coef[3][2] = {{real(0.30), real(0.30)}, {real(0.40), real(0.35)}, {real(0.22), real(0.20)}};
    BimodalSample s;
    char name[32];
    std::snprintf(name, sizeof(name), "synth_%04d", index);
    s.id = name;
    s.rgb = Tensor({3, size, size});
    for (int c = 0; c < 3; ++c)
        for (int y = 0; y < size; ++y)
            for (int x = 0; x < size; ++x) {
                real v = coef[c][0] + coef[c][1] * base.at(y, x);
                if (mask.at(y, x) != 0) v += cfg.rgb_gap;
                v += cfg.noise_sigma * rng.normal();
                s.rgb.at(c, y, x) = std::clamp(v, real(0), real(1));
            }

    // NIR rides the same texture field, so the visible channels explain the
    // NIR background; the reflectance offset marks the target.
    s.nir = Tensor({1, size, size});
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) {
            real v = real(0.10) + real(0.45) * base.at(y, x);
            if (mask.at(y, x) != 0) v += cfg.nir_gap;
            v += cfg.noise_sigma * rng.normal();
            s.nir.at(0, y, x) = std::clamp(v, real(0), real(1));
        }

    s.mask = std::move(mask);
    return s;
}

DatasetManifest generate_synthetic(const SynthConfig& cfg, const std::filesystem::path& out_root) {
    cfg.validate();
    DatasetManifest manifest;
    manifest.root = out_root;
    manifest.split = "all";
    manifest.source = "synthetic";
    for (int i = 0; i < cfg.n_samples; ++i) {
        BimodalSample s = synthesize_sample(cfg, i);
        save_sample(out_root, s);
        manifest.samples.push_back(s.id);
    }
    write_manifest(manifest, out_root / "manifest.json");
    return manifest;
}

BimodalSample resize_sample(const BimodalSample& s, int side) {
    if (side <= 0) throw std::invalid_argument("resize_sample: side must be positive");
    BimodalSample out;
    out.id = s.id;
    out.rgb = ops::resize_bilinear(s.rgb, side, side);
    out.nir = ops::resize_bilinear(s.nir, side, side);
    Tensor mask = ops::resize_nearest(s.mask, side, side);
    for (size_t i = 0; i < mask.size(); ++i) mask[i] = mask[i] > real(0.5) ? real(1) : real(0);
    out.mask = std::move(mask);
    if (s.edge) out.edge = derive_edge_gt(out.mask, s.edge_window > 0 ? s.edge_window : 3);
    return out;
}

void write_manifest(const DatasetManifest& m, const std::filesystem::path& path) {
    json j;
    j["root"] = m.root.string();
    j["split"] = m.split;
    j["source"] = m.source;
    j["samples"] = m.samples;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write manifest: " + path.string());
    out << j.dump(2) << '\n';
}

DatasetManifest read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read manifest: " + path.string());
    json j;
    in >> j;
    DatasetManifest m;
    m.root = j.at("root").get<std::string>();
    m.split = j.at("split").get<std::string>();
    m.source = j.at("source").get<std::string>();
    m.samples = j.at("samples").get<std::vector<std::string>>();
    return m;
}

}  // namespace swnet::data
