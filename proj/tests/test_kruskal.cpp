// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "tenrank/kruskal.hpp"

using namespace tenrank;

namespace {

KruskalModel random_model(Index i, Index j, Index k, Index r, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    auto fill = [&](Index rows, Index cols) {
        Mat m(rows, cols);
        for (Index c = 0; c < cols; ++c)
            for (Index q = 0; q < rows; ++q) m(q, c) = gauss(rng);
        return m;
    };
    Vec alpha(r);
    for (Index q = 0; q < r; ++q) alpha[q] = gauss(rng);
    return KruskalModel(fill(i, r), fill(j, r), fill(k, r), alpha);
}

KruskalModel rank1_example() {
    Mat a(2, 1), b(2, 1), c(2, 1);
    a << 1, 2;
    b << 1, 1;
    c << 1, -1;
    Vec alpha(1);
    alpha << 3;
    return KruskalModel(a, b, c, alpha);
}

}  // namespace

TEST_CASE("model validation") {
    CHECK_THROWS_AS(KruskalModel(Mat::Ones(2, 2), Mat::Ones(2, 3), Mat::Ones(2, 2), Vec::Ones(2)),
                    DimensionError);
    Mat bad = Mat::Ones(2, 2);
    bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(KruskalModel(bad, Mat::Ones(2, 2), Mat::Ones(2, 2), Vec::Ones(2)), ValueError);
}

TEST_CASE("reconstruct: rank-one example and zero weights") {
    DenseTensor3 t = reconstruct(rank1_example());
    Vec want(8);
    want << 3, 6, 3, 6, -3, -6, -3, -6;
    CHECK((t.data() - want).norm() == 0.0);

    KruskalModel zero(Mat::Ones(2, 3), Mat::Ones(2, 3), Mat::Ones(2, 3), Vec::Zero(3));
    CHECK(reconstruct(zero).data().isZero(0.0));
}

TEST_CASE("reconstruct agrees with the design matrix route") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        KruskalModel m = random_model(3, 4, 2, 5, seed);
        Vec via_design = design_matrix(m) * m.alpha;
        Vec via_recon = reconstruct(m).data();
        CHECK((via_design - via_recon).norm() <= 1e-10 * via_design.norm());
    }
}

TEST_CASE("design_matrix columns") {
    Mat m = design_matrix(rank1_example());
    Vec want(8);
    want << 1, 2, 1, 2, -1, -2, -1, -2;
    CHECK(m.cols() == 1);
    CHECK((m.col(0) - want).norm() == 0.0);

    // standard-basis factors give disjoint column supports
    Mat basis = Mat::Identity(3, 2);
    KruskalModel disjoint(basis, Mat::Ones(2, 2), Mat::Ones(2, 2), Vec::Ones(2));
    Mat d = design_matrix(disjoint);
    CHECK((d.col(0).array() * d.col(1).array() == 0.0).all());
}

TEST_CASE("gram equals the brute-force M^T M") {
    KruskalModel r1 = rank1_example();
    CHECK(gram(r1)(0, 0) == Catch::Approx(20.0));  // ||a||^2 ||b||^2 ||c||^2 = 5*2*2

    // orthonormal factors: gram is the identity
    Mat q = Mat::Identity(4, 3);
    KruskalModel ortho(q, q, q, Vec::Ones(3));
    CHECK((gram(ortho) - Mat::Identity(3, 3)).norm() <= 1e-14);

    for (std::uint64_t seed : {10u, 11u, 12u}) {
        KruskalModel m = random_model(3, 3, 3, 4, seed);
        Mat M = design_matrix(m);
        Mat brute = M.transpose() * M;
        CHECK((gram(m) - brute).norm() <= 1e-10 * brute.norm());
    }
}

TEST_CASE("gram is symmetric positive semidefinite") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        KruskalModel m = random_model(6, 5, 6, 8, 100 + seed);
        Mat g = gram(m);
        CHECK((g - g.transpose()).norm() <= 1e-14 * g.norm());
        Eigen::SelfAdjointEigenSolver<Mat> es(g);
        CHECK(es.eigenvalues().minCoeff() >= -1e-10 * g.norm());
    }
}

TEST_CASE("mttkrp matches M^T vec(X)") {
    KruskalModel m = random_model(4, 3, 5, 6, 21);
    DenseTensor3 x = reconstruct(random_model(4, 3, 5, 2, 22));
    Vec brute = design_matrix(m).transpose() * x.data();
    Vec fast = mttkrp(unfold(x, 1), m);
    CHECK((brute - fast).norm() <= 1e-10 * brute.norm());
}

TEST_CASE("residual_error") {
    KruskalModel m = rank1_example();
    DenseTensor3 x = reconstruct(m);
    ResidualError exact = residual_error(x, m);
    CHECK(exact.residual == 0.0);
    CHECK(exact.relative == 0.0);

    KruskalModel zero(Mat::Zero(2, 1), Mat::Zero(2, 1), Mat::Zero(2, 1), Vec::Zero(1));
    ResidualError all = residual_error(x, zero);
    CHECK(all.residual == Catch::Approx(frob_norm(x)));
    CHECK(all.relative == Catch::Approx(1.0));
    CHECK_FALSE(all.zero_norm);

    ResidualError degenerate = residual_error(DenseTensor3(2, 2, 2), zero);
    CHECK(degenerate.zero_norm);
    CHECK(degenerate.relative == 0.0);

    CHECK_THROWS_AS(residual_error(DenseTensor3(3, 2, 2), m), DimensionError);
}

TEST_CASE("count_rank uses exact zeros") {
    Vec alpha(4);
    alpha << 0.5, 0.0, -1.2, 0.0;
    KruskalModel m(Mat::Ones(2, 4), Mat::Ones(2, 4), Mat::Ones(2, 4), alpha);
    RankEstimate est = count_rank(m);
    CHECK(est.nnz == 2);
    CHECK(est.support == std::vector<Index>{0, 2});

    KruskalModel zero(Mat::Ones(2, 2), Mat::Ones(2, 2), Mat::Ones(2, 2), Vec::Zero(2));
    CHECK(count_rank(zero).nnz == 0);
}

TEST_CASE("compact drops zero components and is idempotent") {
    Vec alpha(3);
    alpha << 0.0, 2.0, 0.0;
    std::mt19937_64 rng(31);
    std::normal_distribution<double> gauss;
    Mat a(2, 3), b(2, 3), c(2, 3);
    for (Index q = 0; q < 3; ++q)
        for (Index i = 0; i < 2; ++i) {
            a(i, q) = gauss(rng);
            b(i, q) = gauss(rng);
            c(i, q) = gauss(rng);
        }
    KruskalModel m(a, b, c, alpha);
    KruskalModel small = compact(m);
    CHECK(small.rank_bound() == 1);
    CHECK(small.alpha[0] == 2.0);
    CHECK((small.A.col(0) - a.col(1)).norm() == 0.0);
    CHECK((reconstruct(small).data() - reconstruct(m).data()).norm() == 0.0);
    CHECK(count_rank(compact(m)).nnz == count_rank(m).nnz);

    KruskalModel again = compact(small);
    CHECK(again.rank_bound() == 1);

    KruskalModel dense = random_model(2, 2, 2, 3, 32);
    CHECK(compact(dense).rank_bound() == 3);
}

TEST_CASE("scaling indeterminacy: (A,B) -> (cA, B/c) leaves reconstruct unchanged") {
    KruskalModel m = random_model(4, 4, 4, 3, 41);
    const double c = -2.5;
    KruskalModel scaled(c * m.A, m.B / c, m.C, m.alpha);
    Vec lhs = reconstruct(scaled).data();
    Vec rhs = reconstruct(m).data();
    CHECK((lhs - rhs).norm() <= 1e-10 * rhs.norm());
}
