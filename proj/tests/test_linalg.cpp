#include "compos/error.hpp"
#include "compos/linalg.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace compos;
using namespace compos::testing;

TEST_CASE("centering matrix small cases") {
    Matrix c2(2, 2);
    c2 << 0.5, -0.5, -0.5, 0.5;
    CHECK(max_abs(centering_matrix(2) - c2) == 0.0);

    const Matrix c3 = centering_matrix(3);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            CHECK(c3(i, j) == doctest::Approx(i == j ? 2.0 / 3.0 : -1.0 / 3.0).epsilon(1e-15));
        }
    }
    CHECK(max_abs(centering_matrix(1)) == 0.0);
    CHECK_THROWS_AS(centering_matrix(0), Error);
}

TEST_CASE("centering matrix is a symmetric idempotent with null vector 1") {
    for (Eigen::Index d = 1; d <= 9; ++d) {
        const Matrix c = centering_matrix(d);
        CHECK(max_abs(c - c.transpose()) == 0.0);
        CHECK(max_abs(c * c - c) < 1e-14);
        CHECK(max_abs(c * Vector::Ones(d)) < 1e-14);
    }
}

TEST_CASE("pseudo-inverse fixed examples") {
    CHECK(max_abs(sym_pseudo_inverse(Matrix::Identity(4, 4)) - Matrix::Identity(4, 4)) < 1e-14);
    CHECK(max_abs(sym_pseudo_inverse(centering_matrix(3)) - centering_matrix(3)) < 1e-14);
    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = 2.0;
    Matrix expect = Matrix::Zero(2, 2);
    expect(0, 0) = 0.5;
    CHECK(max_abs(sym_pseudo_inverse(d) - expect) < 1e-15);

    Matrix asym(2, 2);
    asym << 1.0, 0.5, 0.0, 1.0;
    CHECK_THROWS_AS(sym_pseudo_inverse(asym), Error);
}

TEST_CASE("pseudo-inverse satisfies the Moore-Penrose axioms on random PSD input") {
    Rng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const Eigen::Index n = uniform_int(rng, 1, 8);
        const Matrix a = random_psd(rng, n, 1.0);
        const Matrix g = sym_pseudo_inverse(a);
        const double scale = 1.0 + max_abs(a) * max_abs(g);
        CHECK(max_abs(a * g * a - a) < 1e-9 * scale * (1.0 + max_abs(a)));
        CHECK(max_abs(g * a * g - g) < 1e-9 * scale * (1.0 + max_abs(g)));
        CHECK(max_abs((a * g).transpose() - a * g) < 1e-9 * scale);
        CHECK(max_abs((g * a).transpose() - g * a) < 1e-9 * scale);
    }
}

TEST_CASE("eigen decomposition reconstructs and sorts descending") {
    Rng rng(3);
    const Matrix a = random_psd(rng, 5, 1.0);
    const auto e = symmetric_eigen(a);
    for (Eigen::Index i = 1; i < e.values.size(); ++i) {
        CHECK(e.values[i - 1] >= e.values[i]);
    }
    CHECK(max_abs(e.vectors * e.values.asDiagonal() * e.vectors.transpose() - a) < 1e-12);
    CHECK(sym_rank(centering_matrix(6)) == 5);
}

TEST_CASE("kron matches the index definition") {
    Rng rng(5);
    const Matrix a = random_matrix(rng, 2, 3);
    const Matrix b = random_matrix(rng, 4, 2);
    const Matrix k = kron(a, b);
    REQUIRE(k.rows() == 8);
    REQUIRE(k.cols() == 6);
    for (Eigen::Index i = 0; i < 8; ++i) {
        for (Eigen::Index j = 0; j < 6; ++j) {
            CHECK(k(i, j) == a(i / 4, j / 2) * b(i % 4, j % 2));
        }
    }

    const Matrix m = random_matrix(rng, 3, 3);
    Matrix block = Matrix::Zero(6, 6);
    block.topLeftCorner(3, 3) = m;
    block.bottomRightCorner(3, 3) = m;
    CHECK(max_abs(kron(Matrix::Identity(2, 2), m) - block) == 0.0);
    CHECK(max_abs(kron(Matrix::Constant(1, 1, 2.0), m) - 2.0 * m) == 0.0);
}
