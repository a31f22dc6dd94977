#ifndef COMPOS_LOGRATIO_HPP
#define COMPOS_LOGRATIO_HPP

#include "compos/model.hpp"

#include <optional>

/**
 * @file logratio.hpp
 * @brief Multivariate linear model for additive log-ratios, the classical comparison method.
 *
 * Responses log(p_k / p_ref), k != ref, are regressed on x by ordinary least squares.
 * Zero parts have no logarithm, so the fit refuses them unless an explicit additive
 * adjustment is requested.
 */

namespace compos {

struct LogRatioFit {
    Eigen::Index reference_part = 0;
    Matrix coefficients;        ///< (D-1) x (p+1); row j is the j-th non-reference part
    Matrix residual_covariance; ///< (D-1) x (D-1), divisor N - (p+1)

    Eigen::Index num_parts() const { return coefficients.rows() + 1; }
};

/// log(p_k / p_ref) for k != ref, in part order. Throws `zeros_unsupported` on zero parts.
Vector alr_transform(const Composition& p, Eigen::Index ref);

/// Inverse of `alr_transform`.
Composition alr_inverse(const Vector& alr, Eigen::Index ref);

/// Adds `epsilon` to every raw measurement and renormalizes.
CompositionalDataset zero_adjust(const CompositionalDataset& data, double epsilon);

/// Throws `zeros_unsupported` on zeros (unless `zero_adjust_epsilon` is given),
/// `insufficient_data` when N <= p+1, `rank_deficiency` when X'X is singular.
LogRatioFit fit_logratio_lm(const CompositionalDataset& data, Eigen::Index ref = 0,
                            std::optional<double> zero_adjust_epsilon = std::nullopt);

/// Inverse-alr of the linear prediction at `covariates` (no intercept entry).
Composition predict_logratio(const LogRatioFit& fit, const Vector& covariates);

/// The same fit as a D x (p+1) logit coefficient matrix with the reference row zero.
Matrix logratio_coefficient_matrix(const LogRatioFit& fit);

} // namespace compos

#endif
