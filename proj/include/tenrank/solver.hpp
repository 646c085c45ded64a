// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "tenrank/kruskal.hpp"
#include "tenrank/tensor.hpp"

namespace tenrank {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SingularityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SolverConfig {
    double lambda = 0.3;        // Tikhonov weight on the factor matrices
    double gamma = 0.0;         // l1 weight on alpha (absolute; see default_gamma)
    double eta = 0.99;          // step-safety factor: beta_k = eta / Q_alpha^k
    double beta_fixed = 0.0;    // > 0 enables the fixed-stepsize mode
    int max_iters = 2000;
    double tol_psi = 1e-8;      // relative Psi-decrease stopping tolerance
    double tol_residual = 1e-10;
    Index rank_bound = 1;
    std::uint64_t seed = 0;
    int power_iters = 100;
    double power_tol = 1e-6;

    void validate() const {
        if (lambda < 0.0) throw ConfigError("lambda must be >= 0");
        if (gamma < 0.0) throw ConfigError("gamma must be >= 0");
        if (!(eta > 0.0 && eta < 1.0)) throw ConfigError("eta must lie in (0,1)");
        if (beta_fixed < 0.0) throw ConfigError("beta_fixed must be >= 0");
        if (max_iters < 1) throw ConfigError("max_iters must be >= 1");
        if (tol_psi <= 0.0 || tol_residual <= 0.0) throw ConfigError("tolerances must be > 0");
        if (rank_bound < 1) throw ConfigError("rank_bound must be >= 1");
        if (power_iters < 1 || power_tol <= 0.0) throw ConfigError("invalid power iteration budget");
    }
};

/// Default l1 weight, scaled with the data magnitude so the soft threshold
/// is dimensionally sensible.
inline double default_gamma(const DenseTensor3& x) { return 0.07 * frob_norm(x); }

struct IterTrace {
    int iter = 0;
    double psi = 0.0;
    double residual = 0.0;
    double residual_sq = 0.0;
    double relative = 0.0;
    Index nnz_alpha = 0;
    double beta_k = 0.0;
    double q_alpha = 0.0;
    double step_norm_sq = 0.0;
    bool degenerate_alpha_step = false;
};

enum class Termination { converged_psi, converged_residual, max_iters };

inline const char* to_string(Termination t) {
    switch (t) {
    case Termination::converged_psi: return "converged_psi";
    case Termination::converged_residual: return "converged_residual";
    default: return "max_iters";
    }
}

struct SolveResult {
    KruskalModel model;  // compacted
    Index estimated_rank = 0;
    std::vector<IterTrace> trace;
    Termination termination = Termination::max_iters;
};

/// Random initial model: standard normal factors, alpha = ones.
/// Deterministic in (dims, R, seed).
inline KruskalModel init_model(const std::array<Index, 3>& dims, Index r, std::uint64_t seed) {
    if (r < 1) throw ConfigError("init_model: R must be >= 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto fill = [&](Index rows) {
        Mat m(rows, r);
        for (Index c = 0; c < r; ++c)
            for (Index i = 0; i < rows; ++i)
                m(i, c) = gauss(rng);
        return m;
    };
    Mat a = fill(dims[0]), b = fill(dims[1]), c = fill(dims[2]);
    return KruskalModel(std::move(a), std::move(b), std::move(c), Vec::Ones(r));
}

/// Ridge normal-equation update for one factor: solves
///   F (E E^T + lambda I) = X_(n) E^T,  E = diag(alpha) Kr^T,
/// where Kr is the Khatri-Rao product of the other two factors.
inline Mat update_factor(const Mat& x_unf, const Mat& kr, const Vec& alpha, double lambda) {
    const Index r = kr.cols();
    if (alpha.size() != r)
        throw DimensionError("update_factor: alpha length does not match Khatri-Rao columns");
    if (x_unf.cols() != kr.rows())
        throw DimensionError("update_factor: unfolding and Khatri-Rao shapes disagree");
    Mat sys = (alpha * alpha.transpose()).array() * (kr.transpose() * kr).array();
    sys.diagonal().array() += lambda;
    Mat rhs = x_unf * kr * alpha.asDiagonal();  // X_(n) E^T, shape rows x R
    Eigen::LDLT<Mat> ldlt(sys);
    const Vec d = ldlt.vectorD();
    const bool deficient = d.minCoeff() <= d.maxCoeff() * Eigen::NumTraits<double>::epsilon() * r;
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || deficient) {
        if (lambda == 0.0)
            throw SingularityError(
                "update_factor: normal equations singular; use lambda > 0");
        // fall back to a rank-revealing least-squares solve
        return sys.completeOrthogonalDecomposition().solve(rhs.transpose()).transpose();
    }
    return ldlt.solve(rhs.transpose()).transpose();
}

/// grad_alpha f = M^T (M alpha - vec(X)) = gram(m) alpha - mttkrp.
inline Vec grad_alpha(const DenseTensor3& x, const KruskalModel& m) {
    if (x.dims() != m.dims())
        throw DimensionError("grad_alpha: tensor and model dimensions differ");
    return gram(m) * m.alpha - mttkrp(unfold(x, 1), m);
}

/// Spectral norm of gram(m) by power iteration with Rayleigh quotients,
/// inflated by 1.01 to stay an upper bound under early stopping.
inline double lipschitz_alpha(const KruskalModel& m, int power_iters = 100,
                              double power_tol = 1e-6) {
    const Mat g = gram(m);
    const Index r = g.rows();
    if (r == 0 || g.norm() == 0.0) return 0.0;
    Vec v = Vec::Ones(r);
    // deterministic tilt so the start is not orthogonal to the top eigenvector
    for (Index i = 0; i < r; ++i) v[i] += 1e-3 * static_cast<double>(i + 1);
    v.normalize();
    double est = v.dot(g * v);
    for (int it = 0; it < power_iters; ++it) {
        Vec w = g * v;
        const double n = w.norm();
        if (n == 0.0) return 0.0;
        v = w / n;
        const double next = v.dot(g * v);
        const bool done = std::abs(next - est) <= power_tol * std::max(1.0, std::abs(next));
        est = next;
        if (done) break;
    }
    return 1.01 * est;
}

/// Elementwise soft threshold; zeros on the middle branch are exact.
inline Vec prox_l1(const Vec& y, double tau) {
    if (tau < 0.0) throw ConfigError("prox_l1: tau must be >= 0");
    Vec out(y.size());
    for (Index i = 0; i < y.size(); ++i) {
        if (y[i] > tau)
            out[i] = y[i] - tau;
        else if (y[i] < -tau)
            out[i] = y[i] + tau;
        else
            out[i] = 0.0;
    }
    return out;
}

struct AlphaStep {
    Vec alpha;
    double beta_k = 0.0;
    double q_k = 0.0;
    bool degenerate = false;  // Q_alpha == 0: step is a no-op
};

/// Proximal gradient step on alpha: prox_{beta g}(alpha - beta grad f).
inline AlphaStep update_alpha(const DenseTensor3& x, const KruskalModel& m,
                              const SolverConfig& cfg) {
    AlphaStep step;
    step.q_k = lipschitz_alpha(m, cfg.power_iters, cfg.power_tol);
    if (step.q_k == 0.0) {
        step.alpha = m.alpha;
        step.degenerate = true;
        return step;
    }
    if (cfg.beta_fixed > 0.0) {
        if (cfg.beta_fixed * step.q_k >= 1.0)
            throw NumericalError("fixed stepsize violates beta * Q_alpha < 1 (Q_alpha = " +
                                 std::to_string(step.q_k) + ")");
        step.beta_k = cfg.beta_fixed;
    } else {
        step.beta_k = cfg.eta / step.q_k;
    }
    Vec y = m.alpha - step.beta_k * grad_alpha(x, m);
    step.alpha = prox_l1(y, step.beta_k * cfg.gamma);
    return step;
}

/// Psi = 1/2 ||X - [A,B,C,alpha]||_F^2
///     + lambda/2 (||A||_F^2 + ||B||_F^2 + ||C||_F^2) + gamma ||alpha||_1.
inline double objective_psi(const DenseTensor3& x, const KruskalModel& m,
                            const SolverConfig& cfg) {
    const double r = (x.data() - reconstruct(m).data()).norm();
    return 0.5 * r * r +
           0.5 * cfg.lambda *
               (m.A.squaredNorm() + m.B.squaredNorm() + m.C.squaredNorm()) +
           cfg.gamma * m.alpha.lpNorm<1>();
}

namespace detail {

inline SolveResult run_bcd(const DenseTensor3& x, const SolverConfig& cfg, bool sparse_alpha,
                           const KruskalModel* init = nullptr) {
    cfg.validate();
    if (init && (init->dims() != x.dims() || init->rank_bound() != cfg.rank_bound))
        throw ConfigError("initial model does not match tensor dims or rank_bound");

    const double nx = frob_norm(x);
    if (nx == 0.0) {
        // analytically forced minimum of Psi: the zero model, estimated rank 0
        KruskalModel zero(Mat::Zero(x.dim(0), cfg.rank_bound), Mat::Zero(x.dim(1), cfg.rank_bound),
                          Mat::Zero(x.dim(2), cfg.rank_bound), Vec::Zero(cfg.rank_bound));
        SolveResult res{compact(zero), 0, {}, Termination::converged_residual};
        IterTrace t;
        t.nnz_alpha = 0;
        res.trace.push_back(t);
        return res;
    }

    KruskalModel m = init ? *init : init_model(x.dims(), cfg.rank_bound, cfg.seed);
    const Mat x1 = unfold(x, 1);
    const Mat x2 = unfold(x, 2);
    const Mat x3 = unfold(x, 3);

    SolveResult res{m, 0, {}, Termination::max_iters};
    double prev_psi = objective_psi(x, m, cfg);

    for (int k = 0; k < cfg.max_iters; ++k) {
        const KruskalModel before = m;

        m.A = update_factor(x1, khatri_rao(m.C, m.B), m.alpha, cfg.lambda);
        m.B = update_factor(x2, khatri_rao(m.C, m.A), m.alpha, cfg.lambda);
        m.C = update_factor(x3, khatri_rao(m.B, m.A), m.alpha, cfg.lambda);

        IterTrace t;
        t.iter = k;
        if (sparse_alpha) {
            AlphaStep step = update_alpha(x, m, cfg);
            m.alpha = step.alpha;
            t.beta_k = step.beta_k;
            t.q_alpha = step.q_k;
            t.degenerate_alpha_step = step.degenerate;
        }

        if (!m.A.allFinite() || !m.B.allFinite() || !m.C.allFinite() || !m.alpha.allFinite())
            throw NumericalError("non-finite iterate at iteration " + std::to_string(k));

        const ResidualError err = residual_error(x, m);
        t.psi = objective_psi(x, m, cfg);
        t.residual = err.residual;
        t.residual_sq = err.residual_sq;
        t.relative = err.relative;
        t.nnz_alpha = count_rank(m).nnz;
        t.step_norm_sq = (m.A - before.A).squaredNorm() + (m.B - before.B).squaredNorm() +
                         (m.C - before.C).squaredNorm() +
                         (m.alpha - before.alpha).squaredNorm();
        res.trace.push_back(t);

        if (err.relative <= cfg.tol_residual) {
            res.termination = Termination::converged_residual;
            break;
        }
        if (std::abs(prev_psi - t.psi) / std::max(1.0, prev_psi) <= cfg.tol_psi) {
            res.termination = Termination::converged_psi;
            break;
        }
        prev_psi = t.psi;
    }

    res.model = compact(m);
    res.estimated_rank = count_rank(m).nnz;
    return res;
}

}  // namespace detail

/// Rank-estimating block coordinate descent: ridge normal-equation updates
/// for A, B, C in Gauss-Seidel order, then a proximal l1 step on alpha.
inline SolveResult solve(const DenseTensor3& x, const SolverConfig& cfg) {
    return detail::run_bcd(x, cfg, /*sparse_alpha=*/true);
}

/// Plain regularized ALS: alpha held at ones, no l1 step. Used as the
/// comparison baseline; the trace is field-for-field comparable with solve.
inline SolveResult solve_als_baseline(const DenseTensor3& x, const SolverConfig& cfg) {
    return detail::run_bcd(x, cfg, /*sparse_alpha=*/false);
}

/// ALS refinement warm-started from an existing model: the weights are
/// absorbed into the C factor and held at ones while the factors are
/// polished at the model's component count.
inline SolveResult refine_als(const DenseTensor3& x, const KruskalModel& start,
                              const SolverConfig& cfg) {
    SolverConfig c = cfg;
    c.rank_bound = start.rank_bound();
    Mat scaled_c = start.C * start.alpha.asDiagonal();
    KruskalModel init(start.A, start.B, std::move(scaled_c), Vec::Ones(start.rank_bound()));
    return detail::run_bcd(x, c, /*sparse_alpha=*/false, &init);
}

}  // namespace tenrank
