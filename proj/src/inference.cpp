#include "compos/inference.hpp"

#include "compos/error.hpp"

#include <cmath>
#include <limits>

namespace compos {

double CoefficientCovariance::standard_error(Eigen::Index part, Eigen::Index covariate) const {
    const Eigen::Index idx = part * width + covariate;
    return std::sqrt(std::max(0.0, matrix(idx, idx)));
}

Vector CoefficientCovariance::standard_errors() const {
    return matrix.diagonal().cwiseMax(0.0).cwiseSqrt();
}

Matrix standardized_residuals(const FitResult& fit, const CompositionalDataset& data) {
    const Matrix Pi = fitted_probabilities(fit.coefficients.B, data.design_matrix());
    const Matrix W = (data.composition_matrix().array() / Pi.array() - 1.0).matrix();
    return W.colwise() - W.rowwise().mean();
}

CenteredDispersion estimate_centered_dispersion(const Matrix& residuals, Eigen::Index q) {
    const Eigen::Index n = residuals.rows();
    if (q < 0 || n <= q) {
        throw Error(ErrorKind::insufficient_data,
                    "dispersion estimate needs more objects than mean parameters per part");
    }
    const double df = static_cast<double>(n - q);
    Matrix s = residuals.transpose() * residuals / df;
    s = 0.5 * (s + s.transpose());
    return CenteredDispersion{std::move(s), CenteredDispersion::Provenance::estimated, df};
}

namespace {

Matrix project(const Matrix& v, const IdentificationConstraint& constraint, Eigen::Index parts, Eigen::Index width) {
    const Matrix proj = kron(constraint.projector(parts), Matrix::Identity(width, width));
    Matrix out = proj * v * proj.transpose();
    return 0.5 * (out + out.transpose());
}

} // namespace

CoefficientCovariance model_vcov(const CenteredDispersion& dispersion, const Matrix& design,
                                 const IdentificationConstraint& constraint) {
    const Eigen::Index D = dispersion.matrix.rows();
    const Eigen::Index width = design.cols();
    CoefficientCovariance out;
    out.flavor = CoefficientCovariance::Flavor::model_based;
    out.num_parts = D;
    out.width = width;
    out.constraint = constraint;

    const Matrix xtx = design.transpose() * design;
    if (sym_rank(xtx) < width) {
        out.warnings.push_back("design matrix is rank deficient; using a generalized inverse of X'X");
    }
    const Matrix proj = constraint.projector(D);
    const Matrix centered = proj * dispersion.matrix * proj.transpose();
    out.matrix = kron(0.5 * (centered + centered.transpose()), sym_pseudo_inverse(xtx));
    return out;
}

CoefficientCovariance sandwich_vcov(const FitResult& fit, const CompositionalDataset& data) {
    const Eigen::Index D = data.num_parts();
    const Eigen::Index width = data.num_covariates() + 1;
    const Matrix X = data.design_matrix();
    // Quasi-information for the Phi-free equations is C kron X'X; its pseudo-inverse
    // factorizes because C is idempotent.
    const Matrix bread = kron(centering_matrix(D), sym_pseudo_inverse(X.transpose() * X));
    const Matrix s = quasi_score_contributions(fit.coefficients.B, data);
    const Matrix meat = s.transpose() * s;

    CoefficientCovariance out;
    out.flavor = CoefficientCovariance::Flavor::sandwich;
    out.num_parts = D;
    out.width = width;
    out.constraint = fit.coefficients.constraint;
    out.matrix = project(bread * meat * bread, out.constraint, D, width);
    if (data.size() <= width) {
        out.warnings.push_back("sandwich covariance from very few objects; meat matrix is rank deficient");
    }
    return out;
}

WaldTest wald(const Vector& contrast, const Vector& estimate, const CoefficientCovariance& vcov) {
    if (contrast.size() != vcov.matrix.rows() || estimate.size() != vcov.matrix.rows()) {
        throw Error(ErrorKind::invalid_dimension, "wald: contrast, estimate and covariance sizes differ");
    }
    const Matrix proj = kron(vcov.constraint.projector(vcov.num_parts), Matrix::Identity(vcov.width, vcov.width));
    const Vector effective = proj.transpose() * contrast;
    if (effective.norm() <= 1e-8 * std::max(contrast.norm(), 1e-300)) {
        throw Error(ErrorKind::identifiability, "wald: contrast is not identifiable under the constraint");
    }
    WaldTest out;
    out.contrast = contrast;
    out.estimate = contrast.dot(estimate);
    out.std_error = std::sqrt(std::max(0.0, contrast.dot(vcov.matrix * contrast)));
    out.z_value = out.std_error > 0.0 ? out.estimate / out.std_error : std::numeric_limits<double>::quiet_NaN();
    return out;
}

} // namespace compos
