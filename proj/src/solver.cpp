#include "compos/solver.hpp"

#include "compos/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

namespace compos {

const char* to_string(SolverMethod m) {
    switch (m) {
    case SolverMethod::gamma_trick:
        return "gamma";
    case SolverMethod::fisher_scoring:
        return "scoring";
    case SolverMethod::both_crosscheck:
        return "both";
    }
    return "unknown";
}

namespace {

Vector flatten_part_major(const Matrix& s) {
    return CoefficientMatrix{s, {}}.vec();
}

/// Row-wise p_i / pi_i - 1.
Matrix relative_residuals(const Matrix& P, const Matrix& Pi) {
    return (P.array() / Pi.array() - 1.0).matrix();
}

Matrix center_rows(const Matrix& W) {
    return W.colwise() - W.rowwise().mean();
}

} // namespace

Matrix fitted_probabilities(const Matrix& B, const Matrix& design) {
    if (design.cols() != B.cols()) {
        throw Error(ErrorKind::invalid_dimension, "design width does not match coefficient matrix");
    }
    const Matrix eta = design * B.transpose();
    Matrix pi(eta.rows(), eta.cols());
    for (Eigen::Index i = 0; i < eta.rows(); ++i) {
        pi.row(i) = softmax(eta.row(i).transpose()).transpose();
    }
    return pi;
}

Vector quasi_score(const Matrix& B, const CompositionalDataset& data) {
    const Matrix X = data.design_matrix();
    const Matrix W = relative_residuals(data.composition_matrix(), fitted_probabilities(B, X));
    return flatten_part_major(center_rows(W).transpose() * X);
}

Matrix quasi_score_contributions(const Matrix& B, const CompositionalDataset& data) {
    const Matrix X = data.design_matrix();
    const Matrix Wc = center_rows(relative_residuals(data.composition_matrix(), fitted_probabilities(B, X)));
    const Eigen::Index q = X.cols();
    Matrix out(X.rows(), Wc.cols() * q);
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        for (Eigen::Index k = 0; k < Wc.cols(); ++k) {
            out.row(i).segment(k * q, q) = Wc(i, k) * X.row(i);
        }
    }
    return out;
}

Vector quasi_score_general(const Matrix& B, const CompositionalDataset& data, const ErrorDispersion& phi) {
    if (phi.dim() != data.num_parts()) {
        throw Error(ErrorKind::invalid_dimension, "quasi_score_general: dispersion dimension mismatch");
    }
    const Matrix C = centering_matrix(data.num_parts());
    const Matrix weight = C * sym_pseudo_inverse(C * phi.matrix() * C) * C;
    const Matrix X = data.design_matrix();
    const Matrix W = relative_residuals(data.composition_matrix(), fitted_probabilities(B, X));
    return flatten_part_major((W * weight).transpose() * X);
}

Vector gamma_loglinear_score(const Matrix& B, const CompositionalDataset& data) {
    const Matrix X = data.design_matrix();
    const Matrix W = relative_residuals(data.composition_matrix(), fitted_probabilities(B, X));
    return flatten_part_major(W.transpose() * X);
}

Matrix quasi_information(const Matrix& B, const CompositionalDataset& data) {
    const Eigen::Index D = data.num_parts();
    const Matrix C = centering_matrix(D);
    const Eigen::Index dim = D * (data.num_covariates() + 1);
    Matrix info = Matrix::Zero(dim, dim);
    for (const auto& rec : data.records()) {
        const auto pi = logit_probabilities(B, rec.covariates);
        const Matrix jac = model_jacobian(pi, rec.covariates);
        const Matrix g = multinomial_pinv(pi.parts());
        // V(pi; I)^+ = (C Pi^-1 C) C^+ (C Pi^-1 C), and C^+ = C.
        info.noalias() += jac.transpose() * (g * C * g) * jac;
    }
    return 0.5 * (info + info.transpose());
}

void require_full_rank_design(const CompositionalDataset& data) {
    const Matrix X = data.design_matrix();
    const Matrix xtx = X.transpose() * X;
    const auto eig = symmetric_eigen(xtx);
    const double cutoff = default_rank_tol * eig.values.cwiseAbs().maxCoeff();
    std::vector<bool> involved(static_cast<std::size_t>(X.cols()), false);
    bool deficient = false;
    for (Eigen::Index j = 0; j < eig.values.size(); ++j) {
        if (std::abs(eig.values[j]) > cutoff) {
            continue;
        }
        deficient = true;
        for (Eigen::Index r = 0; r < X.cols(); ++r) {
            if (std::abs(eig.vectors(r, j)) > 1e-6) {
                involved[static_cast<std::size_t>(r)] = true;
            }
        }
    }
    if (!deficient) {
        return;
    }
    std::ostringstream msg;
    msg << "design matrix is rank deficient; collinear columns:";
    for (std::size_t r = 0; r < involved.size(); ++r) {
        if (involved[r]) {
            msg << ' ' << (r == 0 ? std::string("(intercept)") : data.covariate_names()[r - 1]);
        }
    }
    throw Error(ErrorKind::rank_deficiency, msg.str());
}

namespace {

struct Evaluation {
    Vector score;     ///< convergence criterion, part-major
    Matrix direction; ///< proposed full step, D x (p+1)
    bool finite = false;
};

using Evaluator = std::function<Evaluation(const Matrix&)>;

FitResult iterate(const Matrix& B_init, const SolverConfig& config, SolverMethod method,
                  const Evaluator& evaluate) {
    if (config.max_iterations < 1 || !(config.score_tolerance > 0.0) || !(config.step_tolerance > 0.0)) {
        throw Error(ErrorKind::config, "solver tolerances and iteration limit must be positive");
    }
    const auto& constraint = config.constraint;
    Matrix B = apply_constraint(B_init, constraint).B;
    Evaluation ev = evaluate(B);
    if (!ev.finite) {
        throw Error(ErrorKind::numeric_overflow, "quasi-score is not finite at the starting values");
    }

    FitResult out;
    out.method_used = method;
    double last_step = std::numeric_limits<double>::quiet_NaN();
    for (int it = 0;; ++it) {
        const double norm = ev.score.cwiseAbs().maxCoeff();
        out.trace.push_back(norm);
        const bool step_ok = std::isnan(last_step) || last_step <= config.step_tolerance;
        if (norm <= config.score_tolerance && step_ok) {
            out.converged = true;
            out.iterations = it;
            out.final_score_norm = norm;
            break;
        }
        if (it == config.max_iterations) {
            out.iterations = it;
            out.final_score_norm = norm;
            break;
        }

        const double merit = ev.score.norm();
        double t = 1.0;
        Matrix best_B;
        Evaluation best_ev;
        double best_merit = std::numeric_limits<double>::infinity();
        for (int h = 0; h <= config.step_halving_max; ++h, t *= 0.5) {
            Matrix trial = apply_constraint(B + t * ev.direction, constraint).B;
            Evaluation trial_ev = evaluate(trial);
            if (!trial_ev.finite) {
                continue;
            }
            const double trial_merit = trial_ev.score.norm();
            if (trial_merit < best_merit) {
                best_merit = trial_merit;
                best_B = std::move(trial);
                best_ev = std::move(trial_ev);
            }
            if (best_merit <= merit) {
                break;
            }
        }
        if (best_B.size() == 0) {
            throw NonConvergenceError("quasi-score became non-finite along the search direction", out.trace);
        }
        last_step = (best_B - B).cwiseAbs().maxCoeff();
        B = std::move(best_B);
        ev = std::move(best_ev);
    }

    if (!out.converged) {
        std::ostringstream msg;
        msg << "no convergence after " << config.max_iterations << " iterations (" << to_string(method)
            << "); last score max-norm " << out.final_score_norm;
        throw NonConvergenceError(msg.str(), out.trace);
    }
    out.coefficients = CoefficientMatrix{B, constraint};
    return out;
}

Evaluator gamma_trick_evaluator(const CompositionalDataset& data) {
    const Matrix X = data.design_matrix();
    const Matrix P = data.composition_matrix();
    const Matrix xtx_inv_xt = sym_pseudo_inverse(X.transpose() * X) * X.transpose();
    return [X, P, xtx_inv_xt](const Matrix& B) {
        Evaluation ev;
        // Offsets alpha_i = -log sum_k exp(x_i'beta_k) make the fitted totals one,
        // so exp(eta_ik) is exactly the logit probability.
        Matrix mu;
        try {
            mu = fitted_probabilities(B, X);
        } catch (const Error&) {
            return ev;
        }
        const Matrix W = relative_residuals(P, mu);
        if (!W.allFinite()) {
            return ev;
        }
        ev.score = flatten_part_major(center_rows(W).transpose() * X);
        // Gamma log-linear scoring with log link has unit working weights: the update
        // for part k is the least-squares regression of (p_ik/mu_ik - 1) on x_i.
        ev.direction = (xtx_inv_xt * W).transpose();
        ev.finite = true;
        return ev;
    };
}

Evaluator fisher_scoring_evaluator(const CompositionalDataset& data, const Matrix& info_pinv) {
    const Eigen::Index D = data.num_parts();
    const Matrix C = centering_matrix(D);
    return [&data, C, info_pinv, D](const Matrix& B) {
        Evaluation ev;
        Vector score = Vector::Zero(info_pinv.rows());
        try {
            for (const auto& rec : data.records()) {
                const auto pi = logit_probabilities(B, rec.covariates);
                const Matrix jac = model_jacobian(pi, rec.covariates);
                const Matrix g = multinomial_pinv(pi.parts());
                score.noalias() += jac.transpose() * (g * C * g) * (rec.composition.parts() - pi.parts());
            }
        } catch (const Error&) {
            return ev;
        }
        if (!score.allFinite()) {
            return ev;
        }
        ev.direction = CoefficientMatrix::unvec(info_pinv * score, D);
        ev.score = std::move(score);
        ev.finite = true;
        return ev;
    };
}

std::vector<Eigen::Index> all_zero_parts(const CompositionalDataset& data) {
    const Matrix P = data.composition_matrix();
    std::vector<Eigen::Index> out;
    for (Eigen::Index k = 0; k < P.cols(); ++k) {
        if ((P.col(k).array() == 0.0).all()) {
            out.push_back(k);
        }
    }
    return out;
}

CompositionalDataset drop_parts(const CompositionalDataset& data, const std::vector<Eigen::Index>& active) {
    std::vector<MeasurementRecord> records;
    records.reserve(data.records().size());
    for (const auto& rec : data.records()) {
        Vector raw(static_cast<Eigen::Index>(active.size()));
        for (std::size_t j = 0; j < active.size(); ++j) {
            raw[static_cast<Eigen::Index>(j)] = rec.raw[active[j]];
        }
        records.push_back(MeasurementRecord::from_raw(std::move(raw), rec.covariates));
    }
    std::vector<std::string> names;
    for (auto k : active) {
        names.push_back(data.part_names()[static_cast<std::size_t>(k)]);
    }
    return CompositionalDataset(std::move(records), std::move(names), data.covariate_names());
}

void finish(FitResult& out, const CompositionalDataset& data) {
    const Matrix X = data.design_matrix();
    const Matrix Pi = fitted_probabilities(out.coefficients.B, X);
    const Matrix P = data.composition_matrix();
    out.fitted.clear();
    out.fitted.reserve(static_cast<std::size_t>(Pi.rows()));
    for (Eigen::Index i = 0; i < Pi.rows(); ++i) {
        Vector row = Pi.row(i).transpose();
        row /= row.sum();
        out.fitted.push_back(Composition::from_parts(std::move(row)));
    }
    out.residuals = center_rows(relative_residuals(P, Pi));
    if (data.size() <= data.num_covariates() + 1) {
        out.warnings.push_back("number of objects does not exceed the number of coefficients per part");
    }
}

using CoreSolver = std::function<FitResult(const CompositionalDataset&, const SolverConfig&, const Matrix&)>;

/// Fits with all-zero parts removed (the logit model for the remaining parts is unaffected
/// by their presence), then places each removed part `separation_cap` below the mean.
FitResult fit_with_separation(const CompositionalDataset& data, const SolverConfig& config,
                              const Matrix& B_init, const CoreSolver& core) {
    const Eigen::Index D = data.num_parts();
    if (B_init.rows() != D || B_init.cols() != data.num_covariates() + 1) {
        throw Error(ErrorKind::invalid_dimension, "initial coefficient matrix has the wrong shape");
    }
    require_full_rank_design(data);
    const auto separated = all_zero_parts(data);
    if (separated.empty()) {
        FitResult out = core(data, config, B_init);
        finish(out, data);
        return out;
    }

    std::vector<Eigen::Index> active;
    for (Eigen::Index k = 0; k < D; ++k) {
        if (std::find(separated.begin(), separated.end(), k) == separated.end()) {
            active.push_back(k);
        }
    }
    if (active.size() < 2) {
        throw Error(ErrorKind::data, "fewer than two parts have any nonzero observation");
    }
    const auto sub = drop_parts(data, active);
    Matrix sub_init(static_cast<Eigen::Index>(active.size()), B_init.cols());
    for (std::size_t j = 0; j < active.size(); ++j) {
        sub_init.row(static_cast<Eigen::Index>(j)) = B_init.row(active[j]);
    }
    SolverConfig sub_config = config;
    sub_config.constraint = IdentificationConstraint::sum_to_zero();
    FitResult sub_fit = core(sub, sub_config, sub_init);

    Matrix B(D, B_init.cols());
    const Eigen::RowVectorXd mean_row = sub_fit.coefficients.B.colwise().mean();
    for (std::size_t j = 0; j < active.size(); ++j) {
        B.row(active[j]) = sub_fit.coefficients.B.row(static_cast<Eigen::Index>(j));
    }
    for (auto k : separated) {
        B.row(k) = mean_row;
        B(k, 0) -= separation_cap;
    }

    FitResult out = std::move(sub_fit);
    out.coefficients = apply_constraint(B, config.constraint);
    out.separated_parts = separated;
    std::ostringstream msg;
    msg << "separation: part(s)";
    for (auto k : separated) {
        msg << ' ' << data.part_names()[static_cast<std::size_t>(k)];
    }
    msg << " are zero in every object; intercept fixed " << separation_cap << " below the mean";
    out.warnings.push_back(msg.str());
    finish(out, data);
    return out;
}

FitResult gamma_core(const CompositionalDataset& data, const SolverConfig& config, const Matrix& B_init) {
    return iterate(B_init, config, SolverMethod::gamma_trick, gamma_trick_evaluator(data));
}

FitResult scoring_core(const CompositionalDataset& data, const SolverConfig& config, const Matrix& B_init) {
    // The quasi-information does not depend on B, so it is assembled once.
    const Matrix info = quasi_information(Matrix::Zero(B_init.rows(), B_init.cols()), data);
    const Matrix info_pinv = sym_pseudo_inverse(info);
    return iterate(B_init, config, SolverMethod::fisher_scoring, fisher_scoring_evaluator(data, info_pinv));
}

Matrix zero_init(const CompositionalDataset& data) {
    return Matrix::Zero(data.num_parts(), data.num_covariates() + 1);
}

} // namespace

FitResult fit_gamma_trick(const CompositionalDataset& data, const SolverConfig& config, const Matrix& B_init) {
    return fit_with_separation(data, config, B_init, gamma_core);
}

FitResult fit_gamma_trick(const CompositionalDataset& data, const SolverConfig& config) {
    return fit_gamma_trick(data, config, zero_init(data));
}

FitResult fit_fisher_scoring(const CompositionalDataset& data, const SolverConfig& config, const Matrix& B_init) {
    return fit_with_separation(data, config, B_init, scoring_core);
}

FitResult fit_fisher_scoring(const CompositionalDataset& data, const SolverConfig& config) {
    return fit_fisher_scoring(data, config, zero_init(data));
}

FitResult fit(const CompositionalDataset& data, const SolverConfig& config) {
    switch (config.method) {
    case SolverMethod::gamma_trick:
        return fit_gamma_trick(data, config);
    case SolverMethod::fisher_scoring:
        return fit_fisher_scoring(data, config);
    case SolverMethod::both_crosscheck:
        break;
    }
    FitResult gamma = fit_gamma_trick(data, config);
    const FitResult scoring = fit_fisher_scoring(data, config);
    const double diff = (gamma.coefficients.B - scoring.coefficients.B).cwiseAbs().maxCoeff();
    if (!(diff <= config.crosscheck_tolerance)) {
        std::ostringstream msg;
        msg << "gamma-trick and Fisher-scoring estimates differ by " << diff;
        throw Error(ErrorKind::crosscheck_mismatch, msg.str());
    }
    gamma.method_used = SolverMethod::both_crosscheck;
    gamma.crosscheck_difference = diff;
    return gamma;
}

} // namespace compos
