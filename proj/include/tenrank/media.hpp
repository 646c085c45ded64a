// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <png.h>

#include "tenrank/io.hpp"
#include "tenrank/kruskal.hpp"
#include "tenrank/tensor.hpp"

namespace tenrank {

namespace detail {

struct PngBuffer {
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    std::vector<std::uint8_t> rgb;  // row-major, 3 bytes per pixel
};

inline PngBuffer read_png_rgb(const std::filesystem::path& path, bool require_color) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, path.string().c_str())) {
        std::string msg = image.message;
        png_image_free(&image);
        throw FormatError("png read failed for " + path.string() + ": " + msg);
    }
    const bool has_color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
    const bool has_alpha = (image.format & PNG_FORMAT_FLAG_ALPHA) != 0;
    if (require_color && (!has_color || has_alpha)) {
        png_image_free(&image);
        throw FormatError("expected an 8-bit RGB image: " + path.string());
    }
    image.format = PNG_FORMAT_RGB;
    PngBuffer buf;
    buf.width = image.width;
    buf.height = image.height;
    buf.rgb.resize(static_cast<std::size_t>(PNG_IMAGE_SIZE(image)));
    if (!png_image_finish_read(&image, nullptr, buf.rgb.data(), 0, nullptr)) {
        std::string msg = image.message;
        png_image_free(&image);
        throw FormatError("png decode failed for " + path.string() + ": " + msg);
    }
    return buf;
}

inline void write_png(const std::filesystem::path& path, std::uint32_t width,
                      std::uint32_t height, const std::vector<std::uint8_t>& pixels,
                      bool rgb) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    image.width = width;
    image.height = height;
    image.format = rgb ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    if (!png_image_write_to_file(&image, path.string().c_str(), 0, pixels.data(), 0, nullptr)) {
        std::string msg = image.message;
        png_image_free(&image);
        throw IoError("png write failed for " + path.string() + ": " + msg);
    }
}

inline std::uint8_t to_byte(double v) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

}  // namespace detail

/// 8-bit RGB image -> height x width x 3 tensor with values v/255.
inline DenseTensor3 image_to_tensor(const std::filesystem::path& path) {
    detail::PngBuffer buf = detail::read_png_rgb(path, /*require_color=*/true);
    const Index I = buf.height, J = buf.width;
    Vec data(I * J * 3);
    for (Index i = 0; i < I; ++i)
        for (Index j = 0; j < J; ++j) {
            const std::size_t p = 3 * static_cast<std::size_t>(i * J + j);
            for (Index k = 0; k < 3; ++k)
                data[i + j * I + k * I * J] = buf.rgb[p + static_cast<std::size_t>(k)] / 255.0;
        }
    return DenseTensor3(I, J, 3, std::move(data));
}

/// Clamps to [0,1], rounds to the nearest 8-bit level and writes RGB.
inline void tensor_to_image(const DenseTensor3& t, const std::filesystem::path& path) {
    if (t.dim(2) != 3)
        throw DimensionError("tensor_to_image: third extent must be 3 (RGB channels)");
    const Index I = t.dim(0), J = t.dim(1);
    std::vector<std::uint8_t> pixels(static_cast<std::size_t>(I * J * 3));
    for (Index i = 0; i < I; ++i)
        for (Index j = 0; j < J; ++j)
            for (Index k = 0; k < 3; ++k)
                pixels[3 * static_cast<std::size_t>(i * J + j) + static_cast<std::size_t>(k)] =
                    detail::to_byte(t(i, j, k));
    detail::write_png(path, static_cast<std::uint32_t>(J), static_cast<std::uint32_t>(I),
                      pixels, /*rgb=*/true);
}

/// Reads a directory of equally sized 8-bit PNG frames in lexicographic
/// filename order. Color frames are converted to ITU-R BT.601 luma.
inline DenseTensor3 frames_to_tensor(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> files;
    if (std::filesystem::is_directory(dir))
        for (const auto& entry : std::filesystem::directory_iterator(dir))
            if (entry.is_regular_file() && entry.path().extension() == ".png")
                files.push_back(entry.path());
    if (files.empty()) throw IoError("no .png frames in " + dir.string());
    std::sort(files.begin(), files.end());

    Vec data;
    Index I = 0, J = 0;
    const Index K = static_cast<Index>(files.size());
    for (Index k = 0; k < K; ++k) {
        detail::PngBuffer buf = detail::read_png_rgb(files[static_cast<std::size_t>(k)],
                                                     /*require_color=*/false);
        if (k == 0) {
            I = buf.height;
            J = buf.width;
            data.resize(I * J * K);
        } else if (static_cast<Index>(buf.height) != I || static_cast<Index>(buf.width) != J) {
            throw DimensionError("frame size mismatch: " +
                                 files[static_cast<std::size_t>(k)].string());
        }
        for (Index i = 0; i < I; ++i)
            for (Index j = 0; j < J; ++j) {
                const std::size_t p = 3 * static_cast<std::size_t>(i * J + j);
                const double luma = 0.299 * buf.rgb[p] + 0.587 * buf.rgb[p + 1] +
                                    0.114 * buf.rgb[p + 2];
                data[i + j * I + k * I * J] = luma / 255.0;
            }
    }
    return DenseTensor3(I, J, K, std::move(data));
}

/// Writes slice k as frame_%04d.png (8-bit grayscale, clamped to [0,1]).
inline void tensor_to_frames(const DenseTensor3& t, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const Index I = t.dim(0), J = t.dim(1), K = t.dim(2);
    for (Index k = 0; k < K; ++k) {
        std::vector<std::uint8_t> pixels(static_cast<std::size_t>(I * J));
        for (Index i = 0; i < I; ++i)
            for (Index j = 0; j < J; ++j)
                pixels[static_cast<std::size_t>(i * J + j)] = detail::to_byte(t(i, j, k));
        char name[32];
        std::snprintf(name, sizeof name, "frame_%04d.png", static_cast<int>(k));
        detail::write_png(dir / name, static_cast<std::uint32_t>(J),
                          static_cast<std::uint32_t>(I), pixels, /*rgb=*/false);
    }
}

struct BackgroundForeground {
    DenseTensor3 background;  // reconstruct(m)
    DenseTensor3 foreground;  // x - background, signed residual
};

inline BackgroundForeground split_background_foreground(const DenseTensor3& x,
                                                        const KruskalModel& m) {
    if (x.dims() != m.dims())
        throw DimensionError("split: tensor and model dimensions differ");
    DenseTensor3 bg = reconstruct(m);
    Vec fg = x.data() - bg.data();
    return BackgroundForeground{std::move(bg),
                                DenseTensor3(x.dim(0), x.dim(1), x.dim(2), std::move(fg))};
}

/// |foreground| rescaled to [0,1] by its maximum, for frame export.
inline DenseTensor3 foreground_for_export(const DenseTensor3& fg) {
    Vec v = fg.data().cwiseAbs();
    const double peak = v.maxCoeff();
    if (peak > 0.0) v /= peak;
    return DenseTensor3(fg.dim(0), fg.dim(1), fg.dim(2), std::move(v));
}

}  // namespace tenrank
