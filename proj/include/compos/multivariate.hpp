#ifndef COMPOS_MULTIVARIATE_HPP
#define COMPOS_MULTIVARIATE_HPP

#include "compos/model.hpp"
#include "compos/variance.hpp"

#include <cstdint>
#include <optional>

/**
 * @file multivariate.hpp
 * @brief Compositional covariance, null-correlation diagnostic and distances.
 */

namespace compos {

enum class MetricKind { mahalanobis_phi, identity, aitchison };

struct DistanceMatrix {
    Matrix entries; ///< symmetric, zero diagonal
    MetricKind kind = MetricKind::identity;
    bool squared = false;
};

struct NullCorrelationDiagnostic {
    Vector fitted_variances;          ///< minimum-norm least-squares phi_k
    double structure_residual = 0.0;  ///< || S - C diag(phi) C ||_F
    std::optional<double> bootstrap_p;
};

/// r_i = C Pihat^{-1} (p_i - pihat) with pihat the arithmetic-mean composition.
/// Throws `degenerate_probability` when some part has zero mean.
Matrix compositional_residuals(const CompositionalDataset& data);

/**
 * Least-squares fit of the family { C diag(phi) C } to a centered dispersion.
 *
 * For D >= 3 the map phi -> C diag(phi) C is injective; for D = 2 only phi_1 + phi_2 is
 * determined and the minimum-norm representative is reported.
 *
 * The family has dimension D while centered symmetric matrices have dimension
 * D(D-1)/2, so for D <= 3 every centered dispersion fits exactly: the residual is zero
 * and the test has no power. It is informative from D = 4 on.
 *
 * When `residuals` is given and `bootstrap_reps > 0`, objects are resampled with
 * replacement and the p-value compares the observed structure residual with the
 * bootstrap distribution of the structure residual of S* - S. This is a heuristic
 * test, not an exact one. The dispersion divisor is reused for S*.
 */
NullCorrelationDiagnostic null_correlation_diagnostic(const CenteredDispersion& dispersion, int bootstrap_reps = 0,
                                                      const Matrix* residuals = nullptr,
                                                      std::uint64_t seed = 0);

/// Pairwise distances between residual rows. mahalanobis_phi uses (C Phi C)^+ from `dispersion`.
DistanceMatrix distance_matrix(const Matrix& residuals, MetricKind kind,
                               const CenteredDispersion* dispersion = nullptr, bool squared = false);

/// Aitchison distance; throws `zeros_unsupported` on any zero part.
DistanceMatrix aitchison_distance_matrix(const CompositionalDataset& data, bool squared = false);

} // namespace compos

#endif
