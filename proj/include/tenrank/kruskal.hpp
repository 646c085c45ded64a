// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <utility>
#include <vector>

#include "tenrank/tensor.hpp"

namespace tenrank {

/// Weighted CP model: X ~ sum_r alpha_r (a_r o b_r o c_r).
struct KruskalModel {
    Mat A;      // I x R
    Mat B;      // J x R
    Mat C;      // K x R
    Vec alpha;  // length R

    KruskalModel(Mat a, Mat b, Mat c, Vec w)
        : A(std::move(a)), B(std::move(b)), C(std::move(c)), alpha(std::move(w)) {
        const Index r = A.cols();
        if (B.cols() != r || C.cols() != r || alpha.size() != r)
            throw DimensionError("kruskal model: component counts disagree");
        if (!A.allFinite() || !B.allFinite() || !C.allFinite() || !alpha.allFinite())
            throw ValueError("kruskal model: non-finite entries");
    }

    Index rank_bound() const { return A.cols(); }
    std::array<Index, 3> dims() const { return {A.rows(), B.rows(), C.rows()}; }
};

struct RankEstimate {
    Index nnz = 0;
    std::vector<Index> support;  // 0-based component indices with alpha_r != 0
};

inline DenseTensor3 reconstruct(const KruskalModel& m) {
    const Index I = m.A.rows(), J = m.B.rows(), K = m.C.rows();
    Vec v = Vec::Zero(I * J * K);
    for (Index r = 0; r < m.rank_bound(); ++r) {
        if (m.alpha[r] == 0.0) continue;
        Index p = 0;
        for (Index k = 0; k < K; ++k)
            for (Index j = 0; j < J; ++j) {
                const double s = m.alpha[r] * m.B(j, r) * m.C(k, r);
                for (Index i = 0; i < I; ++i)
                    v[p++] += s * m.A(i, r);
            }
    }
    return DenseTensor3(I, J, K, std::move(v));
}

/// The IJK x R matrix M with columns c_r (x) b_r (x) a_r, so that
/// vec(reconstruct(m)) = M * alpha. Only practical for small problems.
inline Mat design_matrix(const KruskalModel& m) {
    const Index I = m.A.rows(), J = m.B.rows(), K = m.C.rows();
    Mat M(I * J * K, m.rank_bound());
    for (Index r = 0; r < m.rank_bound(); ++r)
        M.col(r) = kron_vec(m.C.col(r), kron_vec(m.B.col(r), m.A.col(r)));
    return M;
}

/// M^T M through the Hadamard identity (A^T A) .* (B^T B) .* (C^T C).
inline Mat gram(const KruskalModel& m) {
    return ((m.A.transpose() * m.A).array() * (m.B.transpose() * m.B).array() *
            (m.C.transpose() * m.C).array())
        .matrix();
}

/// M^T vec(X) without forming M: w_r = a_r . (X_(1) (C kr B))_r.
inline Vec mttkrp(const Mat& x_unf1, const KruskalModel& m) {
    Mat w = x_unf1 * khatri_rao(m.C, m.B);  // I x R
    Vec out(m.rank_bound());
    for (Index r = 0; r < m.rank_bound(); ++r)
        out[r] = m.A.col(r).dot(w.col(r));
    return out;
}

struct ResidualError {
    double residual = 0.0;     // ||X - reconstruct(m)||_F
    double relative = 0.0;     // residual / ||X||_F
    double residual_sq = 0.0;  // residual^2, for trace reporting
    bool zero_norm = false;    // ||X||_F == 0; relative then reports residual
};

inline ResidualError residual_error(const DenseTensor3& x, const KruskalModel& m) {
    if (x.dims() != m.dims())
        throw DimensionError("residual_error: tensor and model dimensions differ");
    ResidualError e;
    e.residual = (x.data() - reconstruct(m).data()).norm();
    e.residual_sq = e.residual * e.residual;
    const double nx = frob_norm(x);
    if (nx == 0.0) {
        e.zero_norm = true;
        e.relative = e.residual;
    } else {
        e.relative = e.residual / nx;
    }
    return e;
}

/// Counts exact zeros: the proximal update produces literal zeros.
inline RankEstimate count_rank(const KruskalModel& m) {
    RankEstimate est;
    for (Index r = 0; r < m.alpha.size(); ++r)
        if (m.alpha[r] != 0.0) est.support.push_back(r);
    est.nnz = static_cast<Index>(est.support.size());
    return est;
}

/// Diagnostic count with a relative near-zero threshold, for user insight
/// into borderline components. Not used for the reported rank.
inline Index count_rank_near(const KruskalModel& m, double rel_tol = 1e-8) {
    if (m.alpha.size() == 0) return 0;
    const double cutoff = rel_tol * m.alpha.cwiseAbs().maxCoeff();
    Index n = 0;
    for (Index r = 0; r < m.alpha.size(); ++r)
        if (std::abs(m.alpha[r]) > cutoff) ++n;
    return n;
}

/// Drops zero-weight components; reconstruct is unchanged.
inline KruskalModel compact(const KruskalModel& m) {
    const RankEstimate est = count_rank(m);
    if (est.nnz == m.rank_bound()) return m;
    Mat A(m.A.rows(), est.nnz), B(m.B.rows(), est.nnz), C(m.C.rows(), est.nnz);
    Vec alpha(est.nnz);
    for (Index q = 0; q < est.nnz; ++q) {
        const Index r = est.support[q];
        A.col(q) = m.A.col(r);
        B.col(q) = m.B.col(r);
        C.col(q) = m.C.col(r);
        alpha[q] = m.alpha[r];
    }
    return KruskalModel(std::move(A), std::move(B), std::move(C), std::move(alpha));
}

}  // namespace tenrank
