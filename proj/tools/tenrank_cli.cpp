// SPDX-License-Identifier: Apache-2.0
//
// tenrank: rank estimation and CP decomposition of dense third-order
// tensors, with media front-ends for images and video frame stacks.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tenrank/tenrank.hpp"

namespace fs = std::filesystem;
using namespace tenrank;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumerical = 3;

struct SolverFlags {
    double lambda = 0.3;
    std::optional<double> gamma;  // absolute; defaults to gamma_rel * ||X||_F
    double gamma_rel = 0.07;
    double eta = 0.99;
    double beta_fixed = 0.0;
    int max_iters = 2000;
    double tol_psi = 1e-8;
    double tol_residual = 1e-10;
    std::uint64_t seed = 0;
    std::optional<Index> rank_bound;

    void add_to(CLI::App& cmd, bool with_rank_bound = true) {
        cmd.add_option("--lambda", lambda, "Tikhonov weight on the factor matrices")
            ->capture_default_str();
        cmd.add_option("--gamma", gamma, "l1 weight on the component weights (absolute)");
        cmd.add_option("--gamma-rel", gamma_rel,
                       "l1 weight as a fraction of ||X||_F, used when --gamma is absent")
            ->capture_default_str();
        cmd.add_option("--eta", eta, "step-safety factor in (0,1); step = eta / Q_alpha")
            ->capture_default_str();
        cmd.add_option("--beta-fixed", beta_fixed,
                       "fixed stepsize for the weight update (0 = adaptive eta/Q_alpha)")
            ->capture_default_str();
        cmd.add_option("--max-iters", max_iters, "iteration budget")->capture_default_str();
        cmd.add_option("--tol-psi", tol_psi, "relative objective-decrease stopping tolerance")
            ->capture_default_str();
        cmd.add_option("--tol-residual", tol_residual, "relative residual stopping tolerance")
            ->capture_default_str();
        cmd.add_option("--seed", seed, "RNG seed for the factor initialization")
            ->capture_default_str();
        if (with_rank_bound)
            cmd.add_option("--rank-bound", rank_bound,
                           "component bound R (default: min{IJ, JK, IK})");
    }

    SolverConfig config(const DenseTensor3& x) const {
        SolverConfig cfg;
        cfg.lambda = lambda;
        cfg.gamma = gamma ? *gamma : gamma_rel * frob_norm(x);
        cfg.eta = eta;
        cfg.beta_fixed = beta_fixed;
        cfg.max_iters = max_iters;
        cfg.tol_psi = tol_psi;
        cfg.tol_residual = tol_residual;
        cfg.seed = seed;
        cfg.rank_bound = rank_bound ? *rank_bound : default_rank_bound(x.dims());
        return cfg;
    }
};

void print_summary(const SolveResult& res, double wall_seconds) {
    const IterTrace& last = res.trace.back();
    std::printf("estimated rank : %lld\n", static_cast<long long>(res.estimated_rank));
    std::printf("residual       : %.6e\n", last.residual);
    std::printf("relative error : %.6e\n", last.relative);
    std::printf("iterations     : %zu\n", res.trace.size());
    std::printf("termination    : %s\n", to_string(res.termination));
    std::printf("wall time      : %.3f s\n", wall_seconds);
    std::printf("RANK_ESTIMATE %lld RELERR %.17g ITERS %zu\n",
                static_cast<long long>(res.estimated_rank), last.relative, res.trace.size());
}

int cmd_synth(const std::vector<Index>& dims, Index rank, std::uint64_t seed, double noise,
              const fs::path& output) {
    SynthSpec spec;
    spec.dims = {dims[0], dims[1], dims[2]};
    spec.true_rank = rank;
    spec.seed = seed;
    spec.noise_sigma = noise;
    GroundTruth gt = make_ground_truth(spec);
    fs::create_directories(output);
    save_tensor(gt.tensor, output / "tensor.t3");
    write_factors(gt.truth, output / "truth");
    std::printf("wrote %s (%lld x %lld x %lld, rank %lld)\n",
                (output / "tensor.t3").string().c_str(), static_cast<long long>(dims[0]),
                static_cast<long long>(dims[1]), static_cast<long long>(dims[2]),
                static_cast<long long>(rank));
    return 0;
}

int cmd_estimate_rank(const fs::path& input, const fs::path& output, const SolverFlags& flags) {
    DenseTensor3 x = load_tensor(input);
    SolverConfig cfg = flags.config(x);
    const auto t0 = std::chrono::steady_clock::now();
    SolveResult res = solve(x, cfg);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    fs::create_directories(output);
    write_factors(res.model, output / "factors");
    write_trace_csv(res.trace, output / "trace.csv");
    print_summary(res, secs);
    return 0;
}

int cmd_decompose(const fs::path& input, const fs::path& output, const SolverFlags& flags) {
    DenseTensor3 x = load_tensor(input);
    SolverConfig cfg = flags.config(x);
    cfg.gamma = 0.0;  // plain regularized ALS at the requested component count
    const auto t0 = std::chrono::steady_clock::now();
    SolveResult res = solve_als_baseline(x, cfg);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    fs::create_directories(output);
    write_factors(res.model, output / "factors");
    write_trace_csv(res.trace, output / "trace.csv");
    print_summary(res, secs);
    return 0;
}

int cmd_compare(const fs::path& input, const fs::path& output, const SolverFlags& flags) {
    DenseTensor3 x = load_tensor(input);
    SolverConfig cfg = flags.config(x);
    SolveResult sparse = solve(x, cfg);
    SolverConfig als_cfg = cfg;
    als_cfg.gamma = 0.0;
    SolveResult baseline = solve_als_baseline(x, als_cfg);
    fs::create_directories(output);
    write_trace_csv(sparse.trace, output / "trace_bcd.csv");
    write_trace_csv(baseline.trace, output / "trace_als.csv");
    auto report = [](const char* name, const SolveResult& r) {
        const IterTrace& last = r.trace.back();
        std::printf("%-8s relerr %.6e  nnz %lld  iters %zu  (%s)\n", name, last.relative,
                    static_cast<long long>(last.nnz_alpha), r.trace.size(),
                    to_string(r.termination));
    };
    report("bcd", sparse);
    report("als", baseline);
    return 0;
}

SolveResult estimate_and_refine(const DenseTensor3& x, SolverConfig cfg) {
    SolveResult est = solve(x, cfg);
    if (est.estimated_rank == 0) return est;
    SolverConfig refine = cfg;
    refine.lambda = 1e-12;
    refine.gamma = 0.0;
    refine.max_iters = 500;
    refine.tol_residual = 1e-12;
    SolveResult polished = refine_als(x, est.model, refine);
    polished.estimated_rank = est.estimated_rank;
    return polished;
}

int cmd_image(const fs::path& input, const fs::path& output, const SolverFlags& flags) {
    DenseTensor3 x = image_to_tensor(input);
    SolverConfig cfg = flags.config(x);
    const auto t0 = std::chrono::steady_clock::now();
    SolveResult res = estimate_and_refine(x, cfg);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    fs::create_directories(output);
    const auto [I, J, K] = x.dims();
    if (res.estimated_rank > 0)
        tensor_to_image(reconstruct(res.model), output / "reconstructed.png");
    write_factors(res.model, output / "factors");
    write_trace_csv(res.trace, output / "trace.csv");
    const double ratio =
        res.estimated_rank > 0
            ? double(I * J * K) / (double(res.estimated_rank) * double(I + J + K + 1))
            : 0.0;
    print_summary(res, secs);
    std::printf("compression    : %.2f\n", ratio);
    std::printf("COMPRESSION %.17g\n", ratio);
    return 0;
}

int cmd_video_bg(const fs::path& input, const fs::path& output, const SolverFlags& flags) {
    DenseTensor3 x = frames_to_tensor(input);
    SolverConfig cfg = flags.config(x);
    const auto t0 = std::chrono::steady_clock::now();
    SolveResult res = solve(x, cfg);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    fs::create_directories(output);
    KruskalModel model = res.model;
    if (model.rank_bound() == 0)  // zero video: background is all zeros
        model = KruskalModel(Mat::Zero(x.dim(0), 1), Mat::Zero(x.dim(1), 1),
                             Mat::Zero(x.dim(2), 1), Vec::Zero(1));
    BackgroundForeground split = split_background_foreground(x, model);
    tensor_to_frames(split.background, output / "background");
    tensor_to_frames(foreground_for_export(split.foreground), output / "foreground");
    write_factors(res.model, output / "factors");
    write_trace_csv(res.trace, output / "trace.csv");
    print_summary(res, secs);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tensor rank estimation and CP decomposition"};
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "Generate a random low-rank tensor");
    std::vector<Index> dims;
    Index rank = 1;
    std::uint64_t synth_seed = 0;
    double noise = 0.0;
    fs::path synth_out;
    synth->add_option("--dims", dims, "tensor extents I J K")->expected(3)->required();
    synth->add_option("--rank", rank, "ground-truth rank")->check(CLI::PositiveNumber)->required();
    synth->add_option("--seed", synth_seed, "RNG seed")->capture_default_str();
    synth->add_option("--noise", noise, "additive Gaussian noise sigma")->capture_default_str();
    synth->add_option("--output", synth_out, "output directory")->required();

    auto add_io_cmd = [&](const char* name, const char* desc, fs::path& in, fs::path& out,
                          SolverFlags& flags) {
        auto* cmd = app.add_subcommand(name, desc);
        cmd->add_option("--input", in, "input path")->required();
        cmd->add_option("--output", out, "output directory")->required();
        flags.add_to(*cmd);
        return cmd;
    };

    fs::path est_in, est_out, dec_in, dec_out, cmp_in, cmp_out, img_in, img_out, vid_in, vid_out;
    SolverFlags est_flags, dec_flags, cmp_flags, img_flags, vid_flags;
    vid_flags.gamma_rel = 0.15;  // stronger sparsity suits background extraction
    add_io_cmd("estimate-rank", "Estimate tensor rank and CP decomposition (.t3 input)",
               est_in, est_out, est_flags);
    add_io_cmd("decompose", "Plain regularized ALS decomposition at a fixed component count",
               dec_in, dec_out, dec_flags);
    add_io_cmd("compare", "Run the rank estimator and the ALS baseline side by side",
               cmp_in, cmp_out, cmp_flags);
    add_io_cmd("image", "Estimate rank of an RGB image and write a compressed reconstruction",
               img_in, img_out, img_flags);
    add_io_cmd("video-bg", "Background/foreground split of a directory of grayscale frames",
               vid_in, vid_out, vid_flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (app.got_subcommand("synth"))
            return cmd_synth(dims, rank, synth_seed, noise, synth_out);
        if (app.got_subcommand("estimate-rank"))
            return cmd_estimate_rank(est_in, est_out, est_flags);
        if (app.got_subcommand("decompose")) return cmd_decompose(dec_in, dec_out, dec_flags);
        if (app.got_subcommand("compare")) return cmd_compare(cmp_in, cmp_out, cmp_flags);
        if (app.got_subcommand("image")) return cmd_image(img_in, img_out, img_flags);
        if (app.got_subcommand("video-bg")) return cmd_video_bg(vid_in, vid_out, vid_flags);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const NumericalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const SingularityError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::runtime_error& e) {  // format, io, dimension, value
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
