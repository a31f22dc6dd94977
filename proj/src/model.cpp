#include "compos/model.hpp"

#include "compos/error.hpp"

#include <cmath>
#include <string>

namespace compos {

Composition Composition::from_parts(Vector parts) {
    if (parts.size() < 2) {
        throw Error(ErrorKind::contract_violation, "composition needs at least two parts");
    }
    if (!parts.allFinite() || (parts.array() < 0.0).any()) {
        throw Error(ErrorKind::contract_violation, "composition parts must be finite and nonnegative");
    }
    if (std::abs(parts.sum() - 1.0) > unit_sum_tol) {
        throw Error(ErrorKind::contract_violation, "composition parts must sum to one");
    }
    return Composition(std::move(parts));
}

Composition Composition::normalize(const Vector& raw) {
    if (raw.size() < 2) {
        throw Error(ErrorKind::data, "composition needs at least two parts");
    }
    if (!raw.allFinite() || (raw.array() < 0.0).any()) {
        throw Error(ErrorKind::data, "part values must be finite and nonnegative");
    }
    const double total = raw.sum();
    if (!(total > 0.0)) {
        throw Error(ErrorKind::data, "total must be positive");
    }
    return Composition(raw / total);
}

MeasurementRecord MeasurementRecord::from_raw(Vector raw, Vector covariates) {
    auto comp = Composition::normalize(raw);
    if (!covariates.allFinite()) {
        throw Error(ErrorKind::data, "covariates must be finite");
    }
    const double total = raw.sum();
    return MeasurementRecord{std::move(raw), total, std::move(comp), std::move(covariates)};
}

CompositionalDataset::CompositionalDataset(std::vector<MeasurementRecord> records,
                                           std::vector<std::string> part_names,
                                           std::vector<std::string> covariate_names)
    : records_(std::move(records)), part_names_(std::move(part_names)),
      covariate_names_(std::move(covariate_names)) {
    if (records_.empty()) {
        throw Error(ErrorKind::insufficient_data, "dataset has no records");
    }
    num_parts_ = records_.front().composition.size();
    num_covariates_ = records_.front().covariates.size();
    for (const auto& rec : records_) {
        if (rec.composition.size() != num_parts_ || rec.raw.size() != num_parts_ ||
            rec.covariates.size() != num_covariates_) {
            throw Error(ErrorKind::invalid_dimension, "dataset records have inconsistent dimensions");
        }
    }
    if (part_names_.empty()) {
        for (Eigen::Index k = 0; k < num_parts_; ++k) {
            part_names_.push_back("part" + std::to_string(k + 1));
        }
    }
    if (covariate_names_.empty()) {
        for (Eigen::Index r = 0; r < num_covariates_; ++r) {
            covariate_names_.push_back("x" + std::to_string(r + 1));
        }
    }
    if (static_cast<Eigen::Index>(part_names_.size()) != num_parts_ ||
        static_cast<Eigen::Index>(covariate_names_.size()) != num_covariates_) {
        throw Error(ErrorKind::invalid_dimension, "dataset names do not match dimensions");
    }
}

CompositionalDataset CompositionalDataset::from_raw(const Matrix& raw, const Matrix& covariates,
                                                    std::vector<std::string> part_names,
                                                    std::vector<std::string> covariate_names) {
    if (covariates.rows() != raw.rows()) {
        throw Error(ErrorKind::invalid_dimension, "raw and covariate row counts differ");
    }
    std::vector<MeasurementRecord> records;
    records.reserve(static_cast<std::size_t>(raw.rows()));
    for (Eigen::Index i = 0; i < raw.rows(); ++i) {
        records.push_back(MeasurementRecord::from_raw(raw.row(i).transpose(), covariates.row(i).transpose()));
    }
    return CompositionalDataset(std::move(records), std::move(part_names), std::move(covariate_names));
}

Matrix CompositionalDataset::design_matrix() const {
    Matrix x(size(), num_covariates_ + 1);
    for (Eigen::Index i = 0; i < size(); ++i) {
        x(i, 0) = 1.0;
        x.row(i).tail(num_covariates_) = records_[static_cast<std::size_t>(i)].covariates.transpose();
    }
    return x;
}

Matrix CompositionalDataset::composition_matrix() const {
    Matrix p(size(), num_parts_);
    for (Eigen::Index i = 0; i < size(); ++i) {
        p.row(i) = records_[static_cast<std::size_t>(i)].composition.parts().transpose();
    }
    return p;
}

Matrix CompositionalDataset::raw_matrix() const {
    Matrix y(size(), num_parts_);
    for (Eigen::Index i = 0; i < size(); ++i) {
        y.row(i) = records_[static_cast<std::size_t>(i)].raw.transpose();
    }
    return y;
}

Vector IdentificationConstraint::weights(Eigen::Index num_parts) const {
    if (kind == Kind::sum_to_zero) {
        return Vector::Constant(num_parts, 1.0 / static_cast<double>(num_parts));
    }
    if (reference < 0 || reference >= num_parts) {
        throw Error(ErrorKind::invalid_dimension, "reference part index out of range");
    }
    Vector c = Vector::Zero(num_parts);
    c[reference] = 1.0;
    return c;
}

Matrix IdentificationConstraint::projector(Eigen::Index num_parts) const {
    return Matrix::Identity(num_parts, num_parts) - Vector::Ones(num_parts) * weights(num_parts).transpose();
}

Vector CoefficientMatrix::vec() const {
    Vector v(B.size());
    for (Eigen::Index k = 0; k < B.rows(); ++k) {
        v.segment(k * B.cols(), B.cols()) = B.row(k).transpose();
    }
    return v;
}

Matrix CoefficientMatrix::unvec(const Vector& v, Eigen::Index num_parts) {
    if (num_parts < 1 || v.size() % num_parts != 0) {
        throw Error(ErrorKind::invalid_dimension, "coefficient vector length is not a multiple of D");
    }
    const Eigen::Index width = v.size() / num_parts;
    Matrix B(num_parts, width);
    for (Eigen::Index k = 0; k < num_parts; ++k) {
        B.row(k) = v.segment(k * width, width).transpose();
    }
    return B;
}

Vector with_intercept(const Vector& covariates) {
    Vector x(covariates.size() + 1);
    x[0] = 1.0;
    x.tail(covariates.size()) = covariates;
    return x;
}

Vector softmax(const Vector& eta) {
    if (!eta.allFinite()) {
        throw Error(ErrorKind::numeric_overflow, "non-finite linear predictor");
    }
    const Vector e = (eta.array() - eta.maxCoeff()).exp().matrix();
    const double total = e.sum();
    if (!std::isfinite(total) || !(total > 0.0)) {
        throw Error(ErrorKind::numeric_overflow, "softmax normalizer is not finite");
    }
    return e / total;
}

Composition logit_probabilities(const Matrix& B, const Vector& covariates) {
    if (B.cols() != covariates.size() + 1) {
        throw Error(ErrorKind::invalid_dimension, "covariate length does not match coefficient matrix");
    }
    Vector pi = softmax(B * with_intercept(covariates));
    // Guard against rounding drift in the final normalization.
    pi /= pi.sum();
    return Composition::from_parts(std::move(pi));
}

CoefficientMatrix apply_constraint(const Matrix& B_raw, const IdentificationConstraint& constraint) {
    const Vector c = constraint.weights(B_raw.rows());
    const Eigen::RowVectorXd shift = c.transpose() * B_raw;
    Matrix B = B_raw.rowwise() - shift;
    if (constraint.kind == IdentificationConstraint::Kind::reference_part) {
        B.row(constraint.reference).setZero();
    }
    return CoefficientMatrix{std::move(B), constraint};
}

Matrix multinomial_cov(const Vector& pi) {
    Matrix m = -pi * pi.transpose();
    m.diagonal() += pi;
    return m;
}

Matrix model_jacobian(const Composition& pi, const Vector& covariates) {
    if (!pi.strictly_positive()) {
        throw Error(ErrorKind::degenerate_probability, "model_jacobian requires strictly positive probabilities");
    }
    const Vector x = with_intercept(covariates);
    return kron(multinomial_cov(pi.parts()), x.transpose());
}

} // namespace compos
