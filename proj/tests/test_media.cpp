// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <random>

#include "tenrank/media.hpp"
#include "tenrank/synth.hpp"

using namespace tenrank;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("tenrank_media_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

// values on the exact 8-bit grid so encode/decode is lossless
DenseTensor3 grid_image_tensor(Index h, Index w, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> byte(0, 255);
    Vec v(h * w * 3);
    for (Index p = 0; p < v.size(); ++p) v[p] = byte(rng) / 255.0;
    return DenseTensor3(h, w, 3, v);
}

}  // namespace

TEST_CASE("byte quantization clamps and rounds") {
    CHECK(detail::to_byte(0.0) == 0);
    CHECK(detail::to_byte(1.0) == 255);
    CHECK(detail::to_byte(1.7) == 255);
    CHECK(detail::to_byte(-0.3) == 0);
    CHECK(detail::to_byte(0.5) == 128);  // lround(127.5) rounds half away from zero
    CHECK(detail::to_byte(128.0 / 255.0) == 128);
}

TEST_CASE("rgb image round-trips losslessly on the 8-bit grid") {
    TempDir tmp;
    DenseTensor3 t = grid_image_tensor(9, 7, 21);
    const fs::path file = tmp.path / "img.png";
    tensor_to_image(t, file);
    DenseTensor3 back = image_to_tensor(file);
    CHECK(back.dims() == t.dims());
    CHECK((back.data() - t.data()).lpNorm<Eigen::Infinity>() == 0.0);

    // off-grid values land on the nearest 8-bit level
    Vec v = Vec::Constant(2 * 2 * 3, 0.5003);
    tensor_to_image(DenseTensor3(2, 2, 3, v), file);
    DenseTensor3 q = image_to_tensor(file);
    CHECK(q.data()[0] == Catch::Approx(128.0 / 255.0));

    CHECK_THROWS_AS(tensor_to_image(DenseTensor3(2, 2, 2), file), DimensionError);
    CHECK_THROWS_AS(image_to_tensor(tmp.path / "missing.png"), FormatError);
}

TEST_CASE("grayscale png is rejected where rgb is required") {
    TempDir tmp;
    std::vector<std::uint8_t> gray(16, 100);
    detail::write_png(tmp.path / "gray.png", 4, 4, gray, /*rgb=*/false);
    CHECK_THROWS_AS(image_to_tensor(tmp.path / "gray.png"), FormatError);
}

TEST_CASE("frame directories round-trip within quantization error") {
    TempDir tmp;
    SyntheticVideo v = make_moving_square_video(12, 10, 5, 3, 0.2);
    tensor_to_frames(v.tensor, tmp.path / "frames");
    for (int k = 0; k < 5; ++k) {
        char name[32];
        std::snprintf(name, sizeof name, "frame_%04d.png", k);
        CHECK(fs::exists(tmp.path / "frames" / name));
    }
    DenseTensor3 back = frames_to_tensor(tmp.path / "frames");
    CHECK(back.dims() == v.tensor.dims());
    CHECK((back.data() - v.tensor.data()).lpNorm<Eigen::Infinity>() <= 1.0 / 510.0 + 1e-12);

    CHECK_THROWS_AS(frames_to_tensor(tmp.path / "nothing"), IoError);
}

TEST_CASE("luma conversion uses the 601 weights") {
    TempDir tmp;
    fs::create_directories(tmp.path / "frames");
    // one solid-color rgb frame
    std::vector<std::uint8_t> rgb(2 * 2 * 3);
    for (int p = 0; p < 4; ++p) {
        rgb[std::size_t(3 * p)] = 200;
        rgb[std::size_t(3 * p + 1)] = 100;
        rgb[std::size_t(3 * p + 2)] = 50;
    }
    detail::write_png(tmp.path / "frames" / "frame_0000.png", 2, 2, rgb, /*rgb=*/true);
    DenseTensor3 t = frames_to_tensor(tmp.path / "frames");
    const double want = (0.299 * 200 + 0.587 * 100 + 0.114 * 50) / 255.0;
    CHECK(t(0, 0, 0) == Catch::Approx(want));
    CHECK(t(1, 1, 0) == Catch::Approx(want));
}

TEST_CASE("frames are read in lexicographic filename order") {
    TempDir tmp;
    fs::create_directories(tmp.path / "frames");
    auto solid = [&](const char* name, std::uint8_t level) {
        std::vector<std::uint8_t> px(4, level);
        detail::write_png(tmp.path / "frames" / name, 2, 2, px, /*rgb=*/false);
    };
    // write out of order on purpose
    solid("frame_0002.png", 30);
    solid("frame_0000.png", 10);
    solid("frame_0001.png", 20);
    DenseTensor3 t = frames_to_tensor(tmp.path / "frames");
    CHECK(t.dim(2) == 3);
    CHECK(t(0, 0, 0) == Catch::Approx(10.0 / 255.0));
    CHECK(t(0, 0, 1) == Catch::Approx(20.0 / 255.0));
    CHECK(t(0, 0, 2) == Catch::Approx(30.0 / 255.0));
}

TEST_CASE("background/foreground split is exact") {
    SyntheticVideo v = make_moving_square_video(10, 10, 4, 3, 0.2);
    Mat a = Mat::Ones(10, 1), b = Mat::Ones(10, 1), c = Mat::Ones(4, 1);
    KruskalModel m(a, b, c, 0.5 * Vec::Ones(1));
    BackgroundForeground split = split_background_foreground(v.tensor, m);
    CHECK((split.background.data() - reconstruct(m).data()).norm() == 0.0);
    CHECK((split.background.data() + split.foreground.data() - v.tensor.data()).norm() == 0.0);

    KruskalModel wrong(Mat::Ones(9, 1), b, c, Vec::Ones(1));
    CHECK_THROWS_AS(split_background_foreground(v.tensor, wrong), DimensionError);
}

TEST_CASE("foreground export normalizes by the absolute peak") {
    Vec fg(8);
    fg << -0.4, 0.2, 0.0, 0.1, -0.1, 0.3, 0.0, 0.05;
    DenseTensor3 t(2, 2, 2, fg);
    DenseTensor3 e = foreground_for_export(t);
    CHECK(e.data().maxCoeff() == Catch::Approx(1.0));
    CHECK(e.data().minCoeff() >= 0.0);
    CHECK(e.data()[0] == Catch::Approx(1.0));
    CHECK(e.data()[1] == Catch::Approx(0.5));

    DenseTensor3 zero(2, 2, 2);
    CHECK(foreground_for_export(zero).data().isZero(0.0));
}
