#ifndef COMPOS_INFERENCE_HPP
#define COMPOS_INFERENCE_HPP

#include "compos/solver.hpp"

#include <string>
#include <vector>

/**
 * @file inference.hpp
 * @brief Dispersion estimation, coefficient covariances and Wald tests.
 *
 * Model-based covariance is (C Phi C) kron (X'X)^-, in part-major ordering, estimated
 * from the standardized residuals. The sandwich alternative replaces the middle of
 * A^- M A^- by the empirical outer product of per-object quasi-score contributions.
 * Both are projected onto the coefficient space of the attached identification
 * constraint, so sum-to-zero and reference-part fits share one code path.
 */

namespace compos {

struct CoefficientCovariance {
    enum class Flavor { model_based, sandwich };

    Matrix matrix; ///< D(p+1) x D(p+1), part-major
    Flavor flavor = Flavor::model_based;
    Eigen::Index num_parts = 0;
    Eigen::Index width = 0; ///< p+1
    IdentificationConstraint constraint;
    std::vector<std::string> warnings;

    double standard_error(Eigen::Index part, Eigen::Index covariate) const;
    Vector standard_errors() const;
};

struct WaldTest {
    Vector contrast;
    double estimate = 0.0;
    double std_error = 0.0;
    double z_value = 0.0; ///< NaN when std_error is zero
};

/// Two-sided 95% normal critical value.
inline constexpr double z_975 = 1.959963984540054;

/// N x D, row i = C Pi_i^{-1} (p_i - pi_i) at the fitted coefficients.
Matrix standardized_residuals(const FitResult& fit, const CompositionalDataset& data);

/// sum_i r_i r_i' / (N - q). Throws `insufficient_data` when N <= q.
CenteredDispersion estimate_centered_dispersion(const Matrix& residuals, Eigen::Index q);

/// (P S P') kron (X'X)^- with P the constraint projector.
CoefficientCovariance model_vcov(const CenteredDispersion& dispersion, const Matrix& design,
                                 const IdentificationConstraint& constraint = IdentificationConstraint::sum_to_zero());

CoefficientCovariance sandwich_vcov(const FitResult& fit, const CompositionalDataset& data);

/**
 * Wald statistic for contrast'beta under the covariance's constraint.
 *
 * A contrast is rejected with `identifiability` when it evaluates to zero for every
 * coefficient matrix satisfying the constraint, e.g. a common shift of all parts under
 * sum-to-zero, or the reference row under reference-part.
 */
WaldTest wald(const Vector& contrast, const Vector& estimate, const CoefficientCovariance& vcov);

} // namespace compos

#endif
