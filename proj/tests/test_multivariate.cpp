#include "compos/error.hpp"
#include "compos/inference.hpp"
#include "compos/linalg.hpp"
#include "compos/multivariate.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace compos;
using namespace compos::testing;

TEST_CASE("compositional residuals") {
    Matrix same(3, 3);
    same << 1, 2, 3, 2, 4, 6, 10, 20, 30;
    CHECK(max_abs(compositional_residuals(CompositionalDataset::from_raw(same, Matrix(3, 0)))) < 1e-15);

    Matrix zeros(3, 3);
    zeros << 1, 0, 3, 2, 4, 6, 1, 1, 0;
    CHECK(compositional_residuals(CompositionalDataset::from_raw(zeros, Matrix(3, 0))).allFinite());

    Matrix dead(2, 3);
    dead << 1, 0, 3, 2, 0, 6;
    CHECK_THROWS_AS(compositional_residuals(CompositionalDataset::from_raw(dead, Matrix(2, 0))), Error);
}

TEST_CASE("null-correlation diagnostic on exact structure") {
    const Matrix C = centering_matrix(3);
    Vector phi(3);
    phi << 1, 2, 3;
    const auto d = null_correlation_diagnostic(CenteredDispersion::assumed(C * phi.asDiagonal() * C));
    CHECK(d.structure_residual < 1e-10);
    CHECK(max_abs(d.fitted_variances - phi) < 1e-10);
    CHECK_FALSE(d.bootstrap_p.has_value());

    // D = 2: only phi_1 + phi_2 is determined.
    const Matrix C2 = centering_matrix(2);
    Vector phi2(2);
    phi2 << 0.5, 1.5;
    const auto d2 = null_correlation_diagnostic(CenteredDispersion::assumed(C2 * phi2.asDiagonal() * C2));
    CHECK(d2.structure_residual < 1e-12);
    CHECK(d2.fitted_variances.sum() == doctest::Approx(2.0));
}

TEST_CASE("three parts are saturated") {
    Rng rng(12);
    const auto d = null_correlation_diagnostic(CenteredDispersion::from_phi(ErrorDispersion(random_psd(rng, 3, 1.0))));
    CHECK(d.structure_residual < 1e-12);
    const auto d4 = null_correlation_diagnostic(CenteredDispersion::from_phi(ErrorDispersion(random_psd(rng, 4, 1.0))));
    CHECK(d4.structure_residual > 1e-6);
}

TEST_CASE("null-correlation bootstrap detects a strong correlation") {
    Matrix sigma = 0.05 * Matrix::Identity(4, 4);
    sigma(0, 0) = sigma(1, 1) = 0.3;
    sigma(0, 1) = sigma(1, 0) = 0.27;
    int rejected = 0;
    for (int rep = 0; rep < 10; ++rep) {
        auto sc = lognormal_scenario(1000, 4, 0, 900 + rep);
        sc.errors = LognormalLaw{sigma};
        const auto data = simulate_dataset(sc).data;
        const auto f = fit(data, {});
        const Matrix r = standardized_residuals(f, data);
        const auto disp = estimate_centered_dispersion(r, 1);
        const auto d = null_correlation_diagnostic(disp, 200, &r, 17 + rep);
        rejected += *d.bootstrap_p < 0.05;
    }
    CHECK(rejected > 5);
}

TEST_CASE("distances") {
    Matrix r(2, 2);
    r << 0.2, -0.2, 0.0, 0.0;
    const auto d = distance_matrix(r, MetricKind::identity, nullptr, true);
    CHECK(d.entries(0, 1) == doctest::Approx(0.08));
    CHECK(d.entries(1, 0) == d.entries(0, 1));
    CHECK(d.entries(0, 0) == 0.0);
    CHECK_THROWS_AS(distance_matrix(r, MetricKind::mahalanobis_phi), Error);

    // With the identity dispersion the Mahalanobis metric on centered rows is Euclidean.
    Matrix rc = r * centering_matrix(2);
    const auto ident = CenteredDispersion::assumed(centering_matrix(2));
    CHECK(distance_matrix(rc, MetricKind::mahalanobis_phi, &ident).entries(0, 1) ==
          doctest::Approx(distance_matrix(rc, MetricKind::identity).entries(0, 1)));

    Matrix raw(2, 3);
    raw << 1, 2, 3, 1, 2, 3;
    CHECK(aitchison_distance_matrix(CompositionalDataset::from_raw(raw, Matrix(2, 0))).entries(0, 1) == 0.0);
    raw(1, 0) = 0.0;
    const auto withzero = CompositionalDataset::from_raw(raw, Matrix(2, 0));
    try {
        aitchison_distance_matrix(withzero);
        FAIL("expected zeros_unsupported");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::zeros_unsupported);
    }
    CHECK(distance_matrix(compositional_residuals(withzero), MetricKind::identity).entries.allFinite());
}
