#ifndef COMPOS_SIMULATE_HPP
#define COMPOS_SIMULATE_HPP

#include "compos/solver.hpp"
#include "compos/variance.hpp"

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

/**
 * @file simulate.hpp
 * @brief Multiplicative-error data generation, Y_i = tau_i Pi_i U_i, and Monte Carlo studies.
 *
 * Every error law is scaled so that E(U_k) = 1.
 *
 * Random streams: a single 64-bit master seed; the stream for (replicate, purpose) is
 * seeded with splitmix64 applied to the master seed, replicate index and purpose tag.
 * Covariates, errors and totals use separate purposes, so changing the law of the totals
 * leaves covariates and relative errors untouched.
 */

namespace compos {

/// log U ~ N(-diag(sigma)/2, sigma).
struct LognormalLaw {
    Matrix sigma;
};

/// Independent U_k ~ Gamma(shape_k, scale 1/shape_k).
struct GammaLaw {
    Vector shapes;
};

/// U_k = B_k V_k / (1 - zero_prob), with independent B_k ~ Bernoulli(1 - zero_prob).
struct ZeroInflatedLaw {
    std::variant<LognormalLaw, GammaLaw> base;
    double zero_prob = 0.0;
};

using ErrorLaw = std::variant<LognormalLaw, GammaLaw, ZeroInflatedLaw>;

/// Throws `config` on invalid parameters (non-PSD sigma, nonpositive shapes, zero_prob outside [0,1)).
void validate_law(const ErrorLaw& law, Eigen::Index num_parts);

/// Analytic cov(U).
ErrorDispersion phi_of_law(const ErrorLaw& law);

/// `count` i.i.d. rows of U.
Matrix draw_errors(const ErrorLaw& law, Eigen::Index num_parts, Eigen::Index count, std::uint64_t seed);

struct CovariateLaw {
    enum class Kind { normal, uniform };
    Kind kind = Kind::normal;
    double a = 0.0; ///< mean, or lower bound
    double b = 1.0; ///< standard deviation, or upper bound
};

struct TauLaw {
    enum class Kind { constant, lognormal, uniform };
    Kind kind = Kind::constant;
    double a = 1.0; ///< value; log-mean; lower bound
    double b = 0.0; ///< log-sd; upper bound
};

struct SimulationScenario {
    Eigen::Index N = 100;
    Eigen::Index D = 3;
    Eigen::Index p = 1;
    Matrix true_B; ///< D x (p+1)
    CovariateLaw covariates;
    ErrorLaw errors = LognormalLaw{};
    TauLaw tau;
    std::uint64_t seed = 1;
    int replicates = 1;
};

enum class StreamPurpose : std::uint64_t { covariates = 1, errors = 2, totals = 3, bootstrap = 4 };

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t replicate, StreamPurpose purpose);

/// Throws `config` when dimensions, laws or counts are inconsistent.
void validate_scenario(const SimulationScenario& scenario);

struct SimulatedDataset {
    CompositionalDataset data;
    int resampled_rows = 0; ///< all-zero error rows that were redrawn
};

SimulatedDataset simulate_dataset(const SimulationScenario& scenario, int replicate = 0);

struct ReplicateResult {
    int replicate = 0;
    bool converged = false;
    std::string error;  ///< non-empty when the fit failed
    Vector estimate;    ///< part-major, sum-to-zero constraint
    Vector se_model;
    Vector se_sandwich;
    std::vector<bool> covered; ///< true coefficient inside estimate +/- z_975 * se_model
    int iterations = 0;
    int resampled_rows = 0;
};

struct StudySummary {
    Vector truth;     ///< sum-to-zero constrained true coefficients
    Vector mean;      ///< Monte Carlo mean of estimates
    Vector mc_se;     ///< Monte Carlo standard error of that mean
    Vector bias;
    Vector coverage;  ///< per coefficient
    int failures = 0;
};

/// Runs `scenario.replicates` replicates, in parallel when `threads != 1`
/// (0 = hardware concurrency). Results are stored by replicate index.
std::vector<ReplicateResult> run_study(const SimulationScenario& scenario, const SolverConfig& config = {},
                                       unsigned threads = 0);

StudySummary summarize_study(const SimulationScenario& scenario, const std::vector<ReplicateResult>& results);

} // namespace compos

#endif
