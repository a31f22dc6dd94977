#include "compos/error.hpp"
#include "compos/logratio.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace compos;
using namespace compos::testing;

TEST_CASE("alr transform") {
    CHECK(alr_transform(Composition::normalize(Vector::Ones(4)), 0).isZero(1e-15));
    Vector p(2);
    p << 0.25, 0.75;
    const Vector a = alr_transform(Composition::from_parts(p), 1);
    REQUIRE(a.size() == 1);
    CHECK(a[0] == doctest::Approx(std::log(1.0 / 3.0)));
    Vector z(3);
    z << 0.5, 0.5, 0.0;
    CHECK_THROWS_AS(alr_transform(Composition::from_parts(z), 0), Error);

    Rng rng(1);
    for (int t = 0; t < 50; ++t) {
        const Eigen::Index D = uniform_int(rng, 2, 6);
        const Eigen::Index ref = uniform_int(rng, 0, D - 1);
        const auto c = Composition::from_parts(random_pi(rng, D));
        CHECK(max_abs(alr_inverse(alr_transform(c, ref), ref).parts() - c.parts()) < 1e-14);
    }
}

TEST_CASE("log-ratio linear model") {
    Matrix raw(1, 3);
    raw << 1, 2, 3;
    CHECK_THROWS_AS(fit_logratio_lm(CompositionalDataset::from_raw(raw, Matrix(1, 0))), Error);

    // Noiseless data from a logit model is fitted exactly: alr coefficients are row differences of B.
    auto sc = lognormal_scenario(30, 3, 1, 5);
    sc.errors = LognormalLaw{Matrix::Zero(3, 3)};
    const auto data = simulate_dataset(sc).data;
    const auto f = fit_logratio_lm(data, 0);
    const Matrix B = logratio_coefficient_matrix(f);
    CHECK(B.row(0).isZero(0.0));
    Matrix expect = sc.true_B.rowwise() - sc.true_B.row(0);
    CHECK(max_abs(B - expect) < 1e-10);
    CHECK(max_abs(f.residual_covariance) < 1e-20);

    LogRatioFit zero;
    zero.coefficients = Matrix::Zero(2, 2);
    Vector x(1);
    x << 3.0;
    CHECK(max_abs(predict_logratio(zero, x).parts() - Vector::Constant(3, 1.0 / 3.0)) < 1e-15);
}

TEST_CASE("zeros require an explicit adjustment") {
    Matrix raw(5, 3);
    raw << 1, 0, 3, 2, 4, 6, 1, 1, 0, 3, 2, 1, 5, 1, 1;
    Matrix cov(5, 1);
    cov << 1, 2, 3, 4, 5;
    const auto data = CompositionalDataset::from_raw(raw, cov);
    try {
        fit_logratio_lm(data);
        FAIL("expected zeros_unsupported");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::zeros_unsupported);
    }
    const auto small = fit_logratio_lm(data, 0, 1e-6);
    const auto large = fit_logratio_lm(data, 0, 1e-3);
    CHECK(small.coefficients.allFinite());
    CHECK(std::abs(small.coefficients.norm() - large.coefficients.norm()) > 0.1 * large.coefficients.norm());
    CHECK_THROWS_AS(zero_adjust(data, -1.0), Error);
}
