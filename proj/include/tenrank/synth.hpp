// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "tenrank/kruskal.hpp"
#include "tenrank/solver.hpp"
#include "tenrank/tensor.hpp"

namespace tenrank {

enum class FactorDist { standard_normal, uniform01 };
enum class WeightDist { ones, uniform_half_to_three_halves };

struct SynthSpec {
    std::array<Index, 3> dims{1, 1, 1};
    Index true_rank = 1;
    std::uint64_t seed = 0;
    FactorDist factor_dist = FactorDist::standard_normal;
    WeightDist weight_dist = WeightDist::uniform_half_to_three_halves;
    double noise_sigma = 0.0;

    void validate() const {
        if (dims[0] < 1 || dims[1] < 1 || dims[2] < 1)
            throw ConfigError("synth: dims must be positive");
        if (true_rank < 1) throw ConfigError("synth: true_rank must be >= 1");
        if (noise_sigma < 0.0) throw ConfigError("synth: noise_sigma must be >= 0");
    }
};

struct GroundTruth {
    DenseTensor3 tensor;
    KruskalModel truth;
};

/// Random low-rank ground truth: tensor = reconstruct(truth) + noise.
/// Deterministic in spec.seed.
inline GroundTruth make_ground_truth(const SynthSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif01(0.0, 1.0);

    auto fill = [&](Index rows) {
        Mat m(rows, spec.true_rank);
        for (Index c = 0; c < spec.true_rank; ++c)
            for (Index i = 0; i < rows; ++i)
                m(i, c) = spec.factor_dist == FactorDist::standard_normal ? gauss(rng)
                                                                          : unif01(rng);
        return m;
    };
    Mat a = fill(spec.dims[0]), b = fill(spec.dims[1]), c = fill(spec.dims[2]);
    Vec w(spec.true_rank);
    for (Index r = 0; r < spec.true_rank; ++r)
        w[r] = spec.weight_dist == WeightDist::ones ? 1.0 : 0.5 + unif01(rng);
    KruskalModel truth(std::move(a), std::move(b), std::move(c), std::move(w));

    Vec data = reconstruct(truth).data();
    if (spec.noise_sigma > 0.0)
        for (Index i = 0; i < data.size(); ++i)
            data[i] += spec.noise_sigma * gauss(rng);
    DenseTensor3 t(spec.dims[0], spec.dims[1], spec.dims[2], std::move(data));
    return GroundTruth{std::move(t), std::move(truth)};
}

/// Default component bound: min{IJ, JK, IK}.
inline Index default_rank_bound(const std::array<Index, 3>& dims) {
    if (dims[0] < 1 || dims[1] < 1 || dims[2] < 1)
        throw ConfigError("default_rank_bound: dims must be positive");
    return std::min({dims[0] * dims[1], dims[1] * dims[2], dims[0] * dims[2]});
}

struct SyntheticVideo {
    DenseTensor3 tensor;             // I x J x K grayscale frames in [0,1]
    std::vector<std::uint8_t> mask;  // per-voxel object indicator, vec order
};

/// Static smooth background plus a bright square moving diagonally across
/// the frames. The mask marks the square's true positions.
inline SyntheticVideo make_moving_square_video(Index height = 48, Index width = 48,
                                               Index frames = 51, Index square = 6,
                                               double brightness = 0.2) {
    const Index I = height, J = width, K = frames;
    Vec data(I * J * K);
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(I * J * K), 0);

    Mat bg(I, J);
    constexpr double pi = 3.14159265358979323846;
    for (Index i = 0; i < I; ++i)
        for (Index j = 0; j < J; ++j) {
            const double u = I > 1 ? double(i) / double(I - 1) : 0.0;
            const double v = J > 1 ? double(j) / double(J - 1) : 0.0;
            double val = 0.5 + 0.25 * std::sin(2 * pi * u) * std::cos(2 * pi * v) + 0.15 * u * v;
            bg(i, j) = std::clamp(val, 0.05, 0.95);
        }

    for (Index k = 0; k < K; ++k) {
        const double phase = K > 1 ? double(k) / double(K - 1) : 0.0;
        const Index r0 = static_cast<Index>((I - square) * phase);
        const Index c0 = static_cast<Index>((J - square) * (0.2 + 0.6 * phase));
        for (Index j = 0; j < J; ++j)
            for (Index i = 0; i < I; ++i) {
                const bool in_square =
                    i >= r0 && i < r0 + square && j >= c0 && j < c0 + square;
                double val = bg(i, j) + (in_square ? brightness : 0.0);
                const Index p = i + j * I + k * I * J;
                data[p] = std::min(val, 1.0);
                mask[static_cast<std::size_t>(p)] = in_square ? 1 : 0;
            }
    }
    return SyntheticVideo{DenseTensor3(I, J, K, std::move(data)), std::move(mask)};
}

}  // namespace tenrank
