#include "compos/error.hpp"
#include "compos/inference.hpp"
#include "compos/linalg.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace compos;
using namespace compos::testing;

TEST_CASE("dispersion estimate") {
    CHECK(max_abs(estimate_centered_dispersion(Matrix::Zero(10, 3), 2).matrix) == 0.0);
    CHECK_THROWS_AS(estimate_centered_dispersion(Matrix::Zero(2, 3), 2), Error);

    Rng rng(3);
    Matrix r = random_matrix(rng, 12, 3);
    r = r * centering_matrix(3);
    const auto s = estimate_centered_dispersion(r, 2);
    CHECK(s.df == 10.0);
    CHECK(max_abs(s.matrix - r.transpose() * r / 10.0) < 1e-14);
}

TEST_CASE("model-based covariance matches the generalized-inverse sandwich of the information") {
    const auto data = simulate_dataset(lognormal_scenario(40, 3, 2, 70)).data;
    const Matrix X = data.design_matrix();
    Rng rng(6);
    const auto cdc = CenteredDispersion::from_phi(ErrorDispersion(random_psd(rng, 3)));
    const Matrix A = kron(centering_matrix(3), X.transpose() * X);
    const Matrix Ap = sym_pseudo_inverse(A, 1e-12);
    const Matrix oracle = Ap * kron(cdc.matrix, X.transpose() * X) * Ap;
    const auto v = model_vcov(cdc, X);
    CHECK(max_abs(v.matrix - oracle) < 1e-10 * (1.0 + max_abs(oracle)));
    CHECK(v.warnings.empty());

    CHECK(max_abs(model_vcov(CenteredDispersion::assumed(Matrix::Zero(3, 3)), X).matrix) == 0.0);
}

TEST_CASE("sandwich covariance edge cases") {
    auto sc = lognormal_scenario(20, 3, 1, 71);
    sc.errors = LognormalLaw{Matrix::Zero(3, 3)};
    const auto exact = simulate_dataset(sc).data;
    const auto f = fit(exact, {});
    CHECK(max_abs(sandwich_vcov(f, exact).matrix) < 1e-20);

    Matrix raw(1, 3);
    raw << 1, 2, 3;
    const auto one = CompositionalDataset::from_raw(raw, Matrix(1, 0));
    FitResult manual;
    manual.coefficients.B = Matrix::Zero(3, 1);
    const auto v = sandwich_vcov(manual, one);
    CHECK(sym_rank(v.matrix, 1e-12) == 1);
    CHECK_FALSE(v.warnings.empty());
}

TEST_CASE("Wald tests") {
    const auto data = simulate_dataset(lognormal_scenario(200, 3, 1, 72)).data;
    const auto f = fit(data, {});
    const auto disp = estimate_centered_dispersion(standardized_residuals(f, data), 2);
    const auto v = model_vcov(disp, data.design_matrix());
    const Vector est = f.coefficients.vec();

    Vector shift = Vector::Zero(6);
    shift[0] = shift[2] = shift[4] = 1.0;
    try {
        wald(shift, est, v);
        FAIL("expected identifiability error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::identifiability);
    }

    Vector slope_diff = Vector::Zero(6);
    slope_diff[1] = 1.0;
    slope_diff[3] = -1.0;
    const auto w = wald(slope_diff, est, v);
    CHECK(w.estimate == doctest::Approx(est[1] - est[3]));
    CHECK(w.std_error > 0.0);
    CHECK(w.z_value == doctest::Approx(w.estimate / w.std_error));
    CHECK(v.standard_error(0, 1) == doctest::Approx(std::sqrt(v.matrix(1, 1))));
}
