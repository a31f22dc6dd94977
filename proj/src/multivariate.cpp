#include "compos/multivariate.hpp"

#include "compos/error.hpp"

#include <cmath>
#include <random>

namespace compos {

Matrix compositional_residuals(const CompositionalDataset& data) {
    const Matrix P = data.composition_matrix();
    const Vector mean = P.colwise().mean().transpose();
    if (!(mean.array() > 0.0).all()) {
        throw Error(ErrorKind::degenerate_probability, "compositional_residuals: a part has zero mean");
    }
    const Matrix W = (P.array().rowwise() / mean.transpose().array() - 1.0).matrix();
    return W.colwise() - W.rowwise().mean();
}

namespace {

struct StructureFit {
    Matrix normal_pinv; ///< pseudo-inverse of the Gram matrix of the C e_k e_k' C basis
    Matrix C;

    explicit StructureFit(Eigen::Index D) : C(centering_matrix(D)) {
        // <C e_k e_k' C, C e_l e_l' C>_F = (C_kl)^2
        normal_pinv = sym_pseudo_inverse(C.array().square().matrix());
    }

    Vector variances(const Matrix& S) const {
        Vector rhs(C.rows());
        for (Eigen::Index k = 0; k < C.rows(); ++k) {
            rhs[k] = C.col(k).dot(S * C.col(k));
        }
        return normal_pinv * rhs;
    }

    double residual(const Matrix& S) const {
        const Vector phi = variances(S);
        return (S - C * phi.asDiagonal() * C).norm();
    }
};

} // namespace

NullCorrelationDiagnostic null_correlation_diagnostic(const CenteredDispersion& dispersion, int bootstrap_reps,
                                                      const Matrix* residuals, std::uint64_t seed) {
    if (bootstrap_reps < 0) {
        throw Error(ErrorKind::config, "bootstrap_reps must be nonnegative");
    }
    const Matrix& S = dispersion.matrix;
    require_symmetric(S, "null_correlation_diagnostic");
    const StructureFit fit(S.rows());

    NullCorrelationDiagnostic out;
    out.fitted_variances = fit.variances(S);
    out.structure_residual = fit.residual(S);

    if (residuals == nullptr || bootstrap_reps == 0) {
        return out;
    }
    const Matrix& R = *residuals;
    if (R.cols() != S.rows() || R.rows() < 2) {
        throw Error(ErrorKind::invalid_dimension, "bootstrap residuals do not match the dispersion");
    }
    const Eigen::Index n = R.rows();
    const double df = dispersion.df > 0.0 ? dispersion.df : static_cast<double>(n - 1);

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
    int exceed = 0;
    Matrix star(S.rows(), S.cols());
    for (int b = 0; b < bootstrap_reps; ++b) {
        star.setZero();
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto row = R.row(pick(rng));
            star.noalias() += row.transpose() * row;
        }
        star /= df;
        // The structure residual is a linear projection, so under the null it has the
        // sampling distribution of the projected fluctuation S - Sigma.
        if (fit.residual(star - S) >= out.structure_residual) {
            ++exceed;
        }
    }
    out.bootstrap_p = (1.0 + exceed) / (1.0 + bootstrap_reps);
    return out;
}

namespace {

DistanceMatrix pairwise(const Matrix& rows, const Matrix* metric, MetricKind kind, bool squared) {
    const Eigen::Index n = rows.rows();
    DistanceMatrix out;
    out.kind = kind;
    out.squared = squared;
    out.entries = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const Vector diff = (rows.row(i) - rows.row(j)).transpose();
            double d2 = metric ? diff.dot(*metric * diff) : diff.squaredNorm();
            d2 = std::max(d2, 0.0);
            const double d = squared ? d2 : std::sqrt(d2);
            out.entries(i, j) = d;
            out.entries(j, i) = d;
        }
    }
    return out;
}

} // namespace

DistanceMatrix distance_matrix(const Matrix& residuals, MetricKind kind, const CenteredDispersion* dispersion,
                               bool squared) {
    switch (kind) {
    case MetricKind::identity:
        return pairwise(residuals, nullptr, kind, squared);
    case MetricKind::mahalanobis_phi: {
        if (dispersion == nullptr) {
            throw Error(ErrorKind::config, "mahalanobis distance requires a dispersion estimate");
        }
        if (dispersion->matrix.rows() != residuals.cols()) {
            throw Error(ErrorKind::invalid_dimension, "dispersion does not match residual dimension");
        }
        const Matrix metric = sym_pseudo_inverse(dispersion->matrix);
        return pairwise(residuals, &metric, kind, squared);
    }
    case MetricKind::aitchison:
        break;
    }
    throw Error(ErrorKind::config, "aitchison distance is computed from a dataset, not residuals");
}

DistanceMatrix aitchison_distance_matrix(const CompositionalDataset& data, bool squared) {
    const Matrix P = data.composition_matrix();
    if (!(P.array() > 0.0).all()) {
        throw Error(ErrorKind::zeros_unsupported, "aitchison distance is undefined for zero parts");
    }
    const Matrix L = P.array().log().matrix();
    // log of the normalized geometric-mean composition
    Vector log_g = L.colwise().mean().transpose();
    log_g.array() -= std::log(log_g.array().exp().sum());
    const Matrix rel = L.rowwise() - log_g.transpose();
    const Matrix centered = rel.colwise() - rel.rowwise().mean();
    return pairwise(centered, nullptr, MetricKind::aitchison, squared);
}

} // namespace compos
