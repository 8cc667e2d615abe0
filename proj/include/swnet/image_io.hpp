#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "swnet/tensor.hpp"

namespace swnet::img {

/// Interleaved 8-bit image, 1 channel (gray) or 3 channels (RGB).
struct ImageU8 {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<uint8_t> pixels;

    uint8_t at(int y, int x, int c) const {
        return pixels[(static_cast<size_t>(y) * width + x) * channels + c];
    }
    uint8_t& at(int y, int x, int c) {
        return pixels[(static_cast<size_t>(y) * width + x) * channels + c];
    }
};

/// Reads an 8-bit PNG. Palette/16-bit/alpha inputs are folded to 8-bit
/// gray or RGB. Throws on unreadable files.
ImageU8 read_png(const std::filesystem::path& path);

void write_png(const std::filesystem::path& path, const ImageU8& image);

// ---- Tensor bridges (values scaled to/from [0,1]) ---------------------------

Tensor to_tensor_rgb(const ImageU8& image);              // (3,H,W)
Tensor to_tensor_gray(const ImageU8& image);             // (1,H,W)
Tensor to_mask(const ImageU8& image);                    // (H,W), binarized at half intensity

ImageU8 from_tensor_rgb(const Tensor& t);                // rounds to 8-bit
ImageU8 from_tensor_gray(const Tensor& t);               // accepts (H,W) or (1,H,W)
ImageU8 from_mask(const Tensor& mask);                   // {0,1} -> {0,255}

/// Probability map in [0,1] -> 8-bit gray, value = round(p * 255).
ImageU8 from_probability(const Tensor& prob);

}  // namespace swnet::img
