// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace tenrank {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using Index = Eigen::Index;

struct DimensionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ValueError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Dense third-order tensor of extents (I, J, K).
///
/// Entries are stored flat in vectorization order: element (i, j, k)
/// lives at offset i + j*I + k*I*J (0-based), so data() is exactly the
/// column vector vec(X) and the mode-1 unfolding is a free reshape.
class DenseTensor3 {
public:
    DenseTensor3(Index i, Index j, Index k)
        : dims_{i, j, k}, data_(Vec::Zero(check_dims(i, j, k))) {}

    DenseTensor3(Index i, Index j, Index k, Vec data)
        : dims_{i, j, k}, data_(std::move(data)) {
        if (data_.size() != check_dims(i, j, k))
            throw DimensionError("tensor data length " + std::to_string(data_.size()) +
                                 " does not match extents " + std::to_string(i) + "x" +
                                 std::to_string(j) + "x" + std::to_string(k));
        if (!data_.allFinite())
            throw ValueError("tensor contains non-finite entries");
    }

    Index dim(int n) const { return dims_[n]; }
    const std::array<Index, 3>& dims() const { return dims_; }
    Index size() const { return data_.size(); }

    const Vec& data() const { return data_; }

    double operator()(Index i, Index j, Index k) const {
        return data_[i + j * dims_[0] + k * dims_[0] * dims_[1]];
    }

    bool same_dims(const DenseTensor3& other) const { return dims_ == other.dims_; }

private:
    static Index check_dims(Index i, Index j, Index k) {
        if (i <= 0 || j <= 0 || k <= 0)
            throw DimensionError("tensor extents must be positive");
        return i * j * k;
    }

    std::array<Index, 3> dims_;
    Vec data_;
};

inline Vec vec_tensor(const DenseTensor3& t) { return t.data(); }

/// Mode-n unfolding. Shapes are I x JK, J x IK, K x IJ with the column
/// index l = j + k*J, l = i + k*I, l = i + j*I respectively (0-based).
inline Mat unfold(const DenseTensor3& t, int mode) {
    const Index I = t.dim(0), J = t.dim(1), K = t.dim(2);
    switch (mode) {
    case 1:
        // vec order coincides with column-major I x JK
        return Eigen::Map<const Mat>(t.data().data(), I, J * K);
    case 2: {
        Mat m(J, I * K);
        for (Index k = 0; k < K; ++k)
            for (Index j = 0; j < J; ++j)
                for (Index i = 0; i < I; ++i)
                    m(j, i + k * I) = t(i, j, k);
        return m;
    }
    case 3:
        // columns of the IJ x K reshape are the frontal slices
        return Eigen::Map<const Mat>(t.data().data(), I * J, K).transpose();
    default:
        throw DimensionError("unfold: mode must be 1, 2 or 3");
    }
}

/// Inverse of unfold; fold(unfold(t, n), n, t.dims()) == t exactly.
inline DenseTensor3 fold(const Mat& m, int mode, const std::array<Index, 3>& dims) {
    const Index I = dims[0], J = dims[1], K = dims[2];
    auto expect = [&](Index rows, Index cols) {
        if (m.rows() != rows || m.cols() != cols)
            throw DimensionError("fold: matrix is " + std::to_string(m.rows()) + "x" +
                                 std::to_string(m.cols()) + ", expected " +
                                 std::to_string(rows) + "x" + std::to_string(cols));
    };
    switch (mode) {
    case 1: {
        expect(I, J * K);
        Vec v = Eigen::Map<const Vec>(m.data(), I * J * K);
        return DenseTensor3(I, J, K, std::move(v));
    }
    case 2: {
        expect(J, I * K);
        Vec v(I * J * K);
        for (Index k = 0; k < K; ++k)
            for (Index j = 0; j < J; ++j)
                for (Index i = 0; i < I; ++i)
                    v[i + j * I + k * I * J] = m(j, i + k * I);
        return DenseTensor3(I, J, K, std::move(v));
    }
    case 3: {
        expect(K, I * J);
        Mat slices = m.transpose();
        Vec v = Eigen::Map<const Vec>(slices.data(), I * J * K);
        return DenseTensor3(I, J, K, std::move(v));
    }
    default:
        throw DimensionError("fold: mode must be 1, 2 or 3");
    }
}

/// Kronecker product of vectors: block l of length |b| equals a_l * b.
inline Vec kron_vec(const Vec& a, const Vec& b) {
    Vec out(a.size() * b.size());
    for (Index i = 0; i < a.size(); ++i)
        out.segment(i * b.size(), b.size()) = a[i] * b;
    return out;
}

/// Khatri-Rao (column-wise Kronecker) product.
inline Mat khatri_rao(const Mat& a, const Mat& b) {
    if (a.cols() != b.cols())
        throw DimensionError("khatri_rao: column counts differ (" +
                             std::to_string(a.cols()) + " vs " + std::to_string(b.cols()) + ")");
    Mat out(a.rows() * b.rows(), a.cols());
    for (Index r = 0; r < a.cols(); ++r)
        for (Index i = 0; i < a.rows(); ++i)
            out.col(r).segment(i * b.rows(), b.rows()) = a(i, r) * b.col(r);
    return out;
}

/// Weighted rank-one tensor: entry (i,j,k) = weight * a_i * b_j * c_k.
inline DenseTensor3 outer3(const Vec& a, const Vec& b, const Vec& c, double weight = 1.0) {
    const Index I = a.size(), J = b.size(), K = c.size();
    if (I == 0 || J == 0 || K == 0)
        throw DimensionError("outer3: vectors must be nonempty");
    Vec v(I * J * K);
    Index p = 0;
    // multiplication order matches c (x) (b (x) a) so the vec identity
    // holds bitwise
    for (Index k = 0; k < K; ++k)
        for (Index j = 0; j < J; ++j)
            for (Index i = 0; i < I; ++i)
                v[p++] = weight * (c[k] * (b[j] * a[i]));
    return DenseTensor3(I, J, K, std::move(v));
}

inline double frob_norm(const DenseTensor3& t) { return t.data().norm(); }
inline double frob_norm_mat(const Mat& m) { return m.norm(); }

inline double inner(const DenseTensor3& t, const DenseTensor3& u) {
    if (!t.same_dims(u))
        throw DimensionError("inner: tensor dimensions differ");
    return t.data().dot(u.data());
}

}  // namespace tenrank
