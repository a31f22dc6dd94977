#ifndef COMPOS_IO_HPP
#define COMPOS_IO_HPP

#include "compos/inference.hpp"
#include "compos/simulate.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

/**
 * @file io.hpp
 * @brief CSV ingestion, scenario files and the CSV/text writers used by the CLI.
 *
 * Input CSV: a header row, comma separated, decimal point, UTF-8. Fields may be wrapped in
 * double quotes. Blank lines are skipped. Line numbers in errors are 1-based and count the
 * header.
 *
 * Scenario files: `key = value` lines, `#` starts a comment. See `parse_scenario`.
 */

namespace compos {

enum class Transform { identity, log };

struct CovariateSpec {
    std::string column;
    Transform transform = Transform::identity;

    /// "depth" or "log(depth)".
    std::string display_name() const;
};

struct RunConfig {
    std::string input;
    std::vector<std::string> parts; ///< empty: every column not used as a covariate
    std::vector<CovariateSpec> covariates;
    std::string constraint = "sum"; ///< "sum" or "ref:<part name or 1-based index>"
    SolverMethod method = SolverMethod::gamma_trick;
    std::string out_dir = ".";
    bool plot = false;
    std::optional<double> zero_adjust;
    std::uint64_t seed = 20240101;
};

CompositionalDataset parse_csv(std::istream& in, const RunConfig& config);
CompositionalDataset parse_csv(const std::string& path, const RunConfig& config);

/// Resolves `config.constraint` against the dataset part names.
IdentificationConstraint resolve_constraint(const std::string& spec, const std::vector<std::string>& part_names);

/// Shortest round-trip decimal representation.
std::string format_double(double v);

/// Raw part values followed by covariates (as stored, i.e. after transforms).
void write_dataset_csv(std::ostream& out, const CompositionalDataset& data);

/// Columns: part, covariate, estimate, se_model, se_sandwich, z_model.
void write_coefficient_table(std::ostream& out, const CompositionalDataset& data, const FitResult& fit,
                             const CoefficientCovariance& model, const CoefficientCovariance& sandwich);

/// Square matrix with a leading label column; `labels` names rows and columns.
void write_labeled_matrix(std::ostream& out, const Matrix& m, const std::vector<std::string>& labels,
                          const std::string& corner = "");

/// One row per object, one column per part.
void write_rows(std::ostream& out, const Matrix& rows, const std::vector<std::string>& columns,
                const std::string& index_name = "object");

/**
 * Keys (case-sensitive):
 *   N, D, p, seed, replicates
 *   true_B       rows separated by ';', entries by ','  (D rows of p+1 values)
 *   covariates   normal(mean,sd) | uniform(lo,hi)
 *   errors       lognormal | gamma | zero_inflated
 *   sigma        lognormal covariance, rows separated by ';'
 *   sigma_diag   diagonal lognormal covariance, comma list
 *   shapes       gamma shapes, comma list
 *   base         lognormal | gamma (base law of zero_inflated)
 *   zero_prob    zero-inflation probability
 *   tau          constant(v) | lognormal(mu,sd) | uniform(lo,hi)
 * Malformed or unknown keys throw `config` naming the key.
 */
SimulationScenario parse_scenario(std::istream& in);
SimulationScenario parse_scenario_file(const std::string& path);

/// Per-replicate estimates, model and sandwich SEs and coverage indicators.
void write_study_csv(std::ostream& out, const SimulationScenario& scenario,
                     const std::vector<ReplicateResult>& results);

/// Columns: coefficient, truth, mc_mean, mc_se, bias, coverage.
void write_study_summary(std::ostream& out, const SimulationScenario& scenario, const StudySummary& summary);

} // namespace compos

#endif
