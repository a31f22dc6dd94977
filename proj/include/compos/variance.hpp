#ifndef COMPOS_VARIANCE_HPP
#define COMPOS_VARIANCE_HPP

#include "compos/linalg.hpp"

/**
 * @file variance.hpp
 * @brief Variance-covariance function for compositions under multiplicative error.
 *
 * With relative errors U of covariance Phi, the compositional error (Y - T pi)/tau has
 * covariance V(pi; Phi) = (Pi - pi pi') Phi (Pi - pi pi'). The multinomial matrix
 * Pi - pi pi' has pseudo-inverse C Pi^{-1} C, and sandwiching V between two copies of that
 * pseudo-inverse returns C Phi C whatever pi is.
 */

namespace compos {

/// Eigenvalues down to -psd_tol * lambda_max are accepted as zero.
inline constexpr double psd_tol = 1e-9;

/// Covariance of the unit-mean relative errors. Symmetric PSD.
class ErrorDispersion {
public:
    /// Throws `contract_violation` if `phi` is not symmetric PSD within tolerance.
    explicit ErrorDispersion(Matrix phi);

    const Matrix& matrix() const { return phi_; }
    Eigen::Index dim() const { return phi_.rows(); }

private:
    Matrix phi_;
};

/// Estimate (or assumed value) of C Phi C: symmetric PSD with zero row and column sums.
struct CenteredDispersion {
    enum class Provenance { assumed, estimated };

    Matrix matrix;
    Provenance provenance = Provenance::assumed;
    double df = 0.0; ///< divisor used when estimated

    /// Throws `contract_violation` unless symmetric with row sums zero within 1e-9 (relative).
    static CenteredDispersion assumed(Matrix m);
    /// C Phi C.
    static CenteredDispersion from_phi(const ErrorDispersion& phi);
};

/// Throws `contract_violation` unless `m` is symmetric PSD within `psd_tol`.
void require_psd(const Matrix& m, const char* what);

/// (Pi - pi pi') Phi (Pi - pi pi'). Zero parts allowed.
Matrix wedderburn_cov(const Vector& pi, const ErrorDispersion& phi);

/// C Pi^{-1} C. Throws `degenerate_probability` on any zero part.
Matrix multinomial_pinv(const Vector& pi);

/// (C Pi^{-1} C) V (C Pi^{-1} C).
Matrix stabilize(const Vector& pi, const Matrix& V);

} // namespace compos

#endif
