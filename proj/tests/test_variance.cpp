#include "compos/error.hpp"
#include "compos/linalg.hpp"
#include "compos/variance.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace compos;
using namespace compos::testing;

TEST_CASE("Wedderburn covariance fixed values") {
    Vector half(2);
    half << 0.5, 0.5;
    const Matrix v = wedderburn_cov(half, ErrorDispersion(Matrix::Identity(2, 2)));
    CHECK(v(0, 0) == doctest::Approx(0.125));
    CHECK(v(0, 1) == doctest::Approx(-0.125));

    const Vector u = Vector::Constant(3, 1.0 / 3.0);
    CHECK(max_abs(wedderburn_cov(u, ErrorDispersion(Matrix::Identity(3, 3))) - centering_matrix(3) / 9.0) < 1e-15);

    Vector vertex(3);
    vertex << 1.0, 0.0, 0.0;
    Rng rng(1);
    CHECK(max_abs(wedderburn_cov(vertex, ErrorDispersion(random_psd(rng, 3)))) == 0.0);
}

TEST_CASE("multinomial pseudo-inverse fixed values") {
    Vector half(2);
    half << 0.5, 0.5;
    CHECK(max_abs(multinomial_pinv(half) - 2.0 * centering_matrix(2)) < 1e-15);
    CHECK(max_abs(multinomial_pinv(Vector::Constant(3, 1.0 / 3.0)) - 3.0 * centering_matrix(3)) < 1e-14);
    Vector z(3);
    z << 0.5, 0.5, 0.0;
    CHECK_THROWS_AS(multinomial_pinv(z), Error);
}

TEST_CASE("closed-form pseudo-inverse agrees with the numeric one") {
    Rng rng(2);
    for (int t = 0; t < 100; ++t) {
        const Vector pi = random_pi(rng, uniform_int(rng, 2, 8));
        const Matrix numeric = sym_pseudo_inverse(multinomial_cov(pi), 1e-12);
        const Matrix closed = multinomial_pinv(pi);
        CHECK(max_abs(numeric - closed) < 1e-8 * (1.0 + max_abs(closed)));
    }
}

TEST_CASE("stabilization of a zero dispersion") {
    Rng rng(4);
    const Vector pi = random_pi(rng, 4);
    CHECK(max_abs(stabilize(pi, wedderburn_cov(pi, ErrorDispersion(Matrix::Zero(4, 4))))) == 0.0);
}

TEST_CASE("dispersion validation") {
    Matrix neg = Matrix::Identity(2, 2);
    neg(1, 1) = -1.0;
    CHECK_THROWS_AS(ErrorDispersion{neg}, Error);
    Matrix asym = Matrix::Identity(2, 2);
    asym(0, 1) = 0.3;
    CHECK_THROWS_AS(ErrorDispersion{asym}, Error);

    Rng rng(9);
    const Matrix phi = random_psd(rng, 4);
    const auto cdc = CenteredDispersion::from_phi(ErrorDispersion(phi));
    CHECK(max_abs(cdc.matrix - centering_matrix(4) * phi * centering_matrix(4)) < 1e-15);
    CHECK(max_abs(cdc.matrix.rowwise().sum()) < 1e-14);
    CHECK_THROWS_AS(CenteredDispersion::assumed(Matrix::Identity(3, 3)), Error);
}
