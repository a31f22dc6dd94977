#ifndef COMPOS_SOLVER_HPP
#define COMPOS_SOLVER_HPP

#include "compos/model.hpp"
#include "compos/variance.hpp"

#include <string>
#include <vector>

/**
 * @file solver.hpp
 * @brief Quasi-likelihood estimation for the compositional logit model.
 *
 * The estimating equations are
 *
 *     sum_i X_i' C Pi_i^{-1} (p_i - pi_i) = 0,    X_i = I kron x_i',
 *
 * which do not involve the error dispersion Phi: the general form with weight
 * C (C Phi C)^+ C has the same root. Two independent solvers are provided.
 *
 * - `fit_gamma_trick` alternates a normalization of per-object offsets (fitted totals
 *   equal one) with a gamma log-linear scoring step, one ordinary least-squares
 *   regression per part.
 * - `fit_fisher_scoring` assembles per-object Jacobians and generalized-Wedderburn
 *   pseudo-inverses into the full quasi-score and quasi-information, and takes
 *   pseudo-inverse scoring steps with step halving.
 *
 * Objects are weighted equally; observed totals never enter the fit, so rescaling
 * the raw measurements of any object leaves the estimate bit-identical.
 */

namespace compos {

enum class SolverMethod { gamma_trick, fisher_scoring, both_crosscheck };

const char* to_string(SolverMethod m);

struct SolverConfig {
    int max_iterations = 100;
    double score_tolerance = 1e-8; ///< on the max-norm of the quasi-score
    double step_tolerance = 1e-8;  ///< on the max-norm of the last coefficient update
    SolverMethod method = SolverMethod::gamma_trick;
    int step_halving_max = 20;
    IdentificationConstraint constraint = IdentificationConstraint::sum_to_zero();
    /// Maximum abs difference in B allowed between the two solvers under both_crosscheck.
    double crosscheck_tolerance = 1e-8;
};

/// A part observed as zero in every object drives its intercept to minus infinity.
/// Such parts are fitted at this fixed depth below the mean linear predictor.
inline constexpr double separation_cap = 30.0;

struct FitResult {
    CoefficientMatrix coefficients;
    std::vector<Composition> fitted;
    Matrix residuals; ///< N x D standardized residuals C Pi_i^{-1} (p_i - pi_i)
    int iterations = 0;
    double final_score_norm = 0.0;
    bool converged = false;
    SolverMethod method_used = SolverMethod::gamma_trick;
    std::vector<double> trace;                  ///< score max-norm per iteration
    std::vector<Eigen::Index> separated_parts;  ///< all-zero parts, 0-based
    std::vector<std::string> warnings;
    double crosscheck_difference = 0.0;         ///< set under both_crosscheck
};

/// N x D matrix of pi_i(B).
Matrix fitted_probabilities(const Matrix& B, const Matrix& design);

/// sum_i X_i' C Pi_i^{-1} (p_i - pi_i), part-major, length D(p+1).
Vector quasi_score(const Matrix& B, const CompositionalDataset& data);

/// Rows are the per-object contributions to `quasi_score`.
Matrix quasi_score_contributions(const Matrix& B, const CompositionalDataset& data);

/// sum_i X_i' C (C Phi C)^+ C Pi_i^{-1} (p_i - pi_i).
Vector quasi_score_general(const Matrix& B, const CompositionalDataset& data, const ErrorDispersion& phi);

/// Uncentered gamma log-linear score sum_i (p_ik / pi_ik - 1) x_ir at unit fitted totals.
Vector gamma_loglinear_score(const Matrix& B, const CompositionalDataset& data);

/**
 * Quasi-information sum_i D_i' V_i^+ D_i with V_i = V(pi_i; I), assembled object by
 * object from `model_jacobian` and `multinomial_pinv`. Algebraically this equals
 * C kron X'X for every B.
 */
Matrix quasi_information(const Matrix& B, const CompositionalDataset& data);

/// Throws `rank_deficiency` naming the collinear design columns when X'X is singular.
void require_full_rank_design(const CompositionalDataset& data);

FitResult fit_gamma_trick(const CompositionalDataset& data, const SolverConfig& config,
                          const Matrix& B_init);
FitResult fit_gamma_trick(const CompositionalDataset& data, const SolverConfig& config = {});

FitResult fit_fisher_scoring(const CompositionalDataset& data, const SolverConfig& config,
                             const Matrix& B_init);
FitResult fit_fisher_scoring(const CompositionalDataset& data, const SolverConfig& config = {});

/// Dispatches on `config.method`. Under both_crosscheck the gamma-trick result is
/// returned after checking agreement; disagreement throws `crosscheck_mismatch`.
FitResult fit(const CompositionalDataset& data, const SolverConfig& config = {});

} // namespace compos

#endif
