#include "swnet/image_io.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <memory>
#include <stdexcept>

namespace swnet::img {
namespace {

struct FileCloser {
    void operator()(FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<FILE, FileCloser>;

[[noreturn]] void fail(const std::filesystem::path& path, const char* what) {
    throw std::runtime_error(std::string(what) + ": " + path.string());
}

}  // namespace

ImageU8 read_png(const std::filesystem::path& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) fail(path, "cannot open image");

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) fail(path, "png alloc failure");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        fail(path, "png alloc failure");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(path, "unreadable image");
    }

    png_init_io(png, fp.get());
    png_read_info(png, info);

    const png_byte color_type = png_get_color_type(png, info);
    const png_byte bit_depth = png_get_bit_depth(png, info);

    if (bit_depth == 16) png_set_strip_16(png);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    png_set_strip_alpha(png);
    png_read_update_info(png, info);

    ImageU8 out;
    out.width = static_cast<int>(png_get_image_width(png, info));
    out.height = static_cast<int>(png_get_image_height(png, info));
    out.channels = static_cast<int>(png_get_channels(png, info));
    if (out.channels != 1 && out.channels != 3) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(path, "unsupported channel count");
    }

    out.pixels.resize(static_cast<size_t>(out.width) * out.height * out.channels);
    std::vector<png_bytep> rows(static_cast<size_t>(out.height));
    const size_t stride = static_cast<size_t>(out.width) * out.channels;
    for (int y = 0; y < out.height; ++y) rows[static_cast<size_t>(y)] = out.pixels.data() + y * stride;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return out;
}

void write_png(const std::filesystem::path& path, const ImageU8& image) {
    if (image.channels != 1 && image.channels != 3)
        throw std::invalid_argument("write_png: only gray or RGB supported");
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) fail(path, "cannot open for writing");

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) fail(path, "png alloc failure");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        fail(path, "png alloc failure");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        fail(path, "png write failure");
    }

    png_init_io(png, fp.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(image.width),
                 static_cast<png_uint_32>(image.height), 8,
                 image.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    const size_t stride = static_cast<size_t>(image.width) * image.channels;
    std::vector<png_const_bytep> rows(static_cast<size_t>(image.height));
    for (int y = 0; y < image.height; ++y) rows[static_cast<size_t>(y)] = image.pixels.data() + y * stride;
    png_write_image(png, const_cast<png_bytepp>(reinterpret_cast<png_bytep const*>(rows.data())));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

Tensor to_tensor_rgb(const ImageU8& image) {
    if (image.channels != 3) throw std::invalid_argument("to_tensor_rgb: expected 3 channels");
    Tensor t({3, image.height, image.width});
    for (int c = 0; c < 3; ++c)
        for (int y = 0; y < image.height; ++y)
            for (int x = 0; x < image.width; ++x)
                t.at(c, y, x) = image.at(y, x, c) / real(255);
    return t;
}

Tensor to_tensor_gray(const ImageU8& image) {
    if (image.channels != 1) throw std::invalid_argument("to_tensor_gray: expected 1 channel");
    Tensor t({1, image.height, image.width});
    for (int y = 0; y < image.height; ++y)
        for (int x = 0; x < image.width; ++x) t.at(0, y, x) = image.at(y, x, 0) / real(255);
    return t;
}

Tensor to_mask(const ImageU8& image) {
    Tensor t({image.height, image.width});
    for (int y = 0; y < image.height; ++y)
        for (int x = 0; x < image.width; ++x) {
            // gray value (or luminance-free first channel for RGB masks),
            // binarized at half of full intensity
            const uint8_t v = image.at(y, x, 0);
            t.at(y, x) = v >= 128 ? real(1) : real(0);
        }
    return t;
}

namespace {

uint8_t quantize(real v) {
    if (v <= 0) return 0;
    if (v >= 1) return 255;
    return static_cast<uint8_t>(std::lround(v * 255));
}

}  // namespace

ImageU8 from_tensor_rgb(const Tensor& t) {
    if (t.rank() != 3 || t.dim(0) != 3) throw std::invalid_argument("from_tensor_rgb: expected (3,H,W)");
    ImageU8 image;
    image.height = t.dim(1);
    image.width = t.dim(2);
    image.channels = 3;
    image.pixels.resize(static_cast<size_t>(image.width) * image.height * 3);
    for (int y = 0; y < image.height; ++y)
        for (int x = 0; x < image.width; ++x)
            for (int c = 0; c < 3; ++c) image.at(y, x, c) = quantize(t.at(c, y, x));
    return image;
}

ImageU8 from_tensor_gray(const Tensor& t) {
    const bool chw = t.rank() == 3;
    if (chw && t.dim(0) != 1) throw std::invalid_argument("from_tensor_gray: expected single channel");
    if (!chw && t.rank() != 2) throw std::invalid_argument("from_tensor_gray: expected (H,W) or (1,H,W)");
    ImageU8 image;
    image.height = chw ? t.dim(1) : t.dim(0);
    image.width = chw ? t.dim(2) : t.dim(1);
    image.channels = 1;
    image.pixels.resize(static_cast<size_t>(image.width) * image.height);
    for (int y = 0; y < image.height; ++y)
        for (int x = 0; x < image.width; ++x)
            image.at(y, x, 0) = quantize(chw ? t.at(0, y, x) : t.at(y, x));
    return image;
}

ImageU8 from_mask(const Tensor& mask) {
    if (mask.rank() != 2) throw std::invalid_argument("from_mask: expected (H,W)");
    ImageU8 image;
    image.height = mask.dim(0);
    image.width = mask.dim(1);
    image.channels = 1;
    image.pixels.resize(static_cast<size_t>(image.width) * image.height);
    for (int y = 0; y < image.height; ++y)
        for (int x = 0; x < image.width; ++x)
            image.at(y, x, 0) = mask.at(y, x) != real(0) ? 255 : 0;
    return image;
}

ImageU8 from_probability(const Tensor& prob) { return from_tensor_gray(prob); }

}  // namespace swnet::img
