#ifndef COMPOS_MODEL_HPP
#define COMPOS_MODEL_HPP

#include "compos/linalg.hpp"

#include <string>
#include <vector>

/**
 * @file model.hpp
 * @brief Compositions, datasets and the compositional logit-linear model.
 *
 * Coefficients live in a D x (p+1) matrix whose row k holds the coefficients for part k,
 * column 0 being the intercept. Whenever the coefficients are flattened to a vector the
 * ordering is part-major: index k*(p+1) + r.
 */

namespace compos {

/// Unit-sum tolerance for compositions.
inline constexpr double unit_sum_tol = 1e-10;

/**
 * Nonnegative unit-sum vector with at least two parts. Zero parts are allowed.
 */
class Composition {
public:
    /// Validates and wraps `parts`. Throws `contract_violation` on any invariant failure.
    static Composition from_parts(Vector parts);

    /// Divides nonnegative `raw` by its total. Throws `data` when the total is not positive.
    static Composition normalize(const Vector& raw);

    const Vector& parts() const { return parts_; }
    Eigen::Index size() const { return parts_.size(); }
    double operator[](Eigen::Index k) const { return parts_[k]; }
    bool strictly_positive() const { return (parts_.array() > 0.0).all(); }

private:
    explicit Composition(Vector parts) : parts_(std::move(parts)) {}
    Vector parts_;
};

/// One object: raw part measurements y, total t = sum(y), composition y/t, covariates (no intercept).
struct MeasurementRecord {
    Vector raw;
    double total = 0.0;
    Composition composition;
    Vector covariates;

    /// Builds a record from raw measurements. Throws `data` on negative entries or zero total.
    static MeasurementRecord from_raw(Vector raw, Vector covariates);
};

class CompositionalDataset {
public:
    CompositionalDataset(std::vector<MeasurementRecord> records,
                         std::vector<std::string> part_names = {},
                         std::vector<std::string> covariate_names = {});

    /// Rows of `raw` are objects, rows of `covariates` (N x p, p may be 0) their covariates.
    static CompositionalDataset from_raw(const Matrix& raw, const Matrix& covariates,
                                         std::vector<std::string> part_names = {},
                                         std::vector<std::string> covariate_names = {});

    Eigen::Index size() const { return static_cast<Eigen::Index>(records_.size()); }
    Eigen::Index num_parts() const { return num_parts_; }
    Eigen::Index num_covariates() const { return num_covariates_; }

    const std::vector<MeasurementRecord>& records() const { return records_; }
    const MeasurementRecord& operator[](std::size_t i) const { return records_[i]; }
    const std::vector<std::string>& part_names() const { return part_names_; }
    const std::vector<std::string>& covariate_names() const { return covariate_names_; }

    /// N x (p+1) with a leading column of ones.
    Matrix design_matrix() const;
    /// N x D, row i = p_i.
    Matrix composition_matrix() const;
    /// N x D, row i = y_i.
    Matrix raw_matrix() const;

private:
    std::vector<MeasurementRecord> records_;
    std::vector<std::string> part_names_;
    std::vector<std::string> covariate_names_;
    Eigen::Index num_parts_ = 0;
    Eigen::Index num_covariates_ = 0;
};

/// c'B = 0 with c = (1/D, ..., 1/D) or c = e_j.
struct IdentificationConstraint {
    enum class Kind { sum_to_zero, reference_part };

    Kind kind = Kind::sum_to_zero;
    Eigen::Index reference = 0; ///< 0-based part index, used by reference_part only

    static IdentificationConstraint sum_to_zero() { return {}; }
    static IdentificationConstraint reference_part(Eigen::Index j) { return {Kind::reference_part, j}; }

    Vector weights(Eigen::Index num_parts) const;

    /// I - 1c'. Maps any coefficient matrix onto the constrained one with the same probabilities.
    Matrix projector(Eigen::Index num_parts) const;
};

struct CoefficientMatrix {
    Matrix B;
    IdentificationConstraint constraint;

    Eigen::Index num_parts() const { return B.rows(); }
    Eigen::Index num_covariates() const { return B.cols() - 1; }

    /// Part-major flattening.
    Vector vec() const;
    static Matrix unvec(const Vector& v, Eigen::Index num_parts);
};

/// (1, x_1, ..., x_p).
Vector with_intercept(const Vector& covariates);

/// exp(eta_k) / sum_l exp(eta_l) with max-subtraction. Throws `numeric_overflow` on non-finite input.
Vector softmax(const Vector& eta);

/// pi_k proportional to exp(x'beta_k); `covariates` excludes the intercept.
Composition logit_probabilities(const Matrix& B, const Vector& covariates);
inline Composition logit_probabilities(const CoefficientMatrix& B, const Vector& covariates) {
    return logit_probabilities(B.B, covariates);
}

/// Subtracts the c-weighted row combination from every row so that c'B = 0.
CoefficientMatrix apply_constraint(const Matrix& B_raw, const IdentificationConstraint& constraint);

/// Pi - pi pi'.
Matrix multinomial_cov(const Vector& pi);

/// d pi / d vec(B): (Pi - pi pi') (I kron x'), D x D(p+1). Throws `degenerate_probability` on zero parts.
Matrix model_jacobian(const Composition& pi, const Vector& covariates);

} // namespace compos

#endif
