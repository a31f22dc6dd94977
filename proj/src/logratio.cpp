#include "compos/logratio.hpp"

#include "compos/error.hpp"

#include <cmath>

namespace compos {

namespace {

void check_ref(Eigen::Index ref, Eigen::Index D) {
    if (ref < 0 || ref >= D) {
        throw Error(ErrorKind::invalid_dimension, "reference part index out of range");
    }
}

} // namespace

Vector alr_transform(const Composition& p, Eigen::Index ref) {
    check_ref(ref, p.size());
    if (!p.strictly_positive()) {
        throw Error(ErrorKind::zeros_unsupported, "log-ratio of a zero part is undefined");
    }
    Vector out(p.size() - 1);
    const double log_ref = std::log(p[ref]);
    for (Eigen::Index k = 0, j = 0; k < p.size(); ++k) {
        if (k != ref) {
            out[j++] = std::log(p[k]) - log_ref;
        }
    }
    return out;
}

Composition alr_inverse(const Vector& alr, Eigen::Index ref) {
    const Eigen::Index D = alr.size() + 1;
    check_ref(ref, D);
    Vector eta(D);
    for (Eigen::Index k = 0, j = 0; k < D; ++k) {
        eta[k] = (k == ref) ? 0.0 : alr[j++];
    }
    Vector pi = softmax(eta);
    pi /= pi.sum();
    return Composition::from_parts(std::move(pi));
}

CompositionalDataset zero_adjust(const CompositionalDataset& data, double epsilon) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
        throw Error(ErrorKind::config, "zero adjustment must be a positive finite constant");
    }
    std::vector<MeasurementRecord> records;
    records.reserve(data.records().size());
    for (const auto& rec : data.records()) {
        records.push_back(MeasurementRecord::from_raw((rec.raw.array() + epsilon).matrix(), rec.covariates));
    }
    return CompositionalDataset(std::move(records), data.part_names(), data.covariate_names());
}

LogRatioFit fit_logratio_lm(const CompositionalDataset& data, Eigen::Index ref,
                            std::optional<double> zero_adjust_epsilon) {
    if (zero_adjust_epsilon) {
        return fit_logratio_lm(zero_adjust(data, *zero_adjust_epsilon), ref, std::nullopt);
    }
    const Eigen::Index D = data.num_parts();
    check_ref(ref, D);
    const Eigen::Index n = data.size();
    const Matrix X = data.design_matrix();
    const Eigen::Index q = X.cols();
    if (n <= q) {
        throw Error(ErrorKind::insufficient_data, "log-ratio model needs more objects than coefficients per ratio");
    }
    Matrix Y(n, D - 1);
    for (Eigen::Index i = 0; i < n; ++i) {
        Y.row(i) = alr_transform(data[static_cast<std::size_t>(i)].composition, ref).transpose();
    }
    const Matrix xtx = X.transpose() * X;
    if (sym_rank(xtx) < q) {
        throw Error(ErrorKind::rank_deficiency, "log-ratio model: design matrix is rank deficient");
    }
    const Eigen::LDLT<Matrix> solver(xtx);
    const Matrix coef = solver.solve(X.transpose() * Y); // q x (D-1)
    const Matrix resid = Y - X * coef;

    LogRatioFit out;
    out.reference_part = ref;
    out.coefficients = coef.transpose();
    out.residual_covariance = resid.transpose() * resid / static_cast<double>(n - q);
    out.residual_covariance = 0.5 * (out.residual_covariance + out.residual_covariance.transpose());
    return out;
}

Composition predict_logratio(const LogRatioFit& fit, const Vector& covariates) {
    if (fit.coefficients.cols() != covariates.size() + 1) {
        throw Error(ErrorKind::invalid_dimension, "covariate length does not match log-ratio fit");
    }
    return alr_inverse(fit.coefficients * with_intercept(covariates), fit.reference_part);
}

Matrix logratio_coefficient_matrix(const LogRatioFit& fit) {
    const Eigen::Index D = fit.num_parts();
    Matrix B = Matrix::Zero(D, fit.coefficients.cols());
    for (Eigen::Index k = 0, j = 0; k < D; ++k) {
        if (k != fit.reference_part) {
            B.row(k) = fit.coefficients.row(j++);
        }
    }
    return B;
}

} // namespace compos
