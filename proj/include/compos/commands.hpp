#ifndef COMPOS_COMMANDS_HPP
#define COMPOS_COMMANDS_HPP

#include "compos/error.hpp"
#include "compos/io.hpp"
#include "compos/logratio.hpp"
#include "compos/ternary.hpp"

#include <iosfwd>
#include <optional>
#include <string>

/**
 * @file commands.hpp
 * @brief Implementations behind the `compos` command-line subcommands.
 *
 * Each command writes its artifacts into `RunConfig::out_dir` (created if missing), logs
 * progress to `log`, and returns a process exit code:
 * 0 success, 1 usage or configuration, 2 data, 3 numerical failure.
 */

namespace compos {

enum ExitCode : int { exit_ok = 0, exit_usage = 1, exit_data = 2, exit_numerical = 3 };

int exit_code_for(ErrorKind kind);

/// Number of covariate values at which fitted curves are evaluated.
inline constexpr int curve_samples = 201;

/// Fitted QL and log-ratio curves over the observed range of a single covariate.
struct CurveComparison {
    std::vector<Composition> ql_curve;
    std::vector<Composition> logratio_curve; ///< empty when the log-ratio model is unavailable
    double ql_min_part = 0.0;
    std::optional<double> logratio_min_part;
    std::string logratio_note;
};

/// Requires exactly one covariate. The log-ratio model is fitted with reference part 0 and
/// the optional zero adjustment; failure on zeros leaves its curve empty with a note.
CurveComparison compare_fitted_curves(const CompositionalDataset& data, const FitResult& fit,
                                      std::optional<double> zero_adjust = std::nullopt);

/// Points coloured by the first covariate; curves added when `fit` is given and p = 1.
TernaryPlot build_ternary_plot(const CompositionalDataset& data, const FitResult* fit,
                               std::optional<double> zero_adjust = std::nullopt);

/// Writes coefficients.csv, dispersion.csv, residuals.csv, convergence.log and, with
/// `plot`, ternary.svg. On non-convergence writes trace.csv and returns 3.
int command_fit(const RunConfig& config, std::ostream& log);

/// ternary.svg; `with_models` adds the fitted curves.
int command_plot(const RunConfig& config, bool with_models, std::ostream& log);

/// distances.csv for kind "identity", "mahalanobis" or "aitchison", computed from the
/// arithmetic-mean standardized residuals; mahalanobis also writes dispersion.csv.
int command_distances(const RunConfig& config, const std::string& kind, std::ostream& log);

/// logratio_coefficients.csv and logratio_covariance.csv; reference part from `config.constraint`
/// when it names one, otherwise the first part.
int command_baseline(const RunConfig& config, std::ostream& log);

/// replicates.csv and summary.csv. `seed` overrides the scenario seed.
int command_simulate(const std::string& scenario_path, const std::string& out_dir, std::optional<std::uint64_t> seed,
                     unsigned threads, std::ostream& log);

/// One simulated dataset (replicate 0) written as CSV to `out_path`.
int command_generate(const std::string& scenario_path, const std::string& out_path,
                     std::optional<std::uint64_t> seed, std::ostream& log);

} // namespace compos

#endif
