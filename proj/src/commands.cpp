#include "compos/commands.hpp"

#include "compos/inference.hpp"
#include "compos/multivariate.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>

namespace compos {

namespace fs = std::filesystem;

int exit_code_for(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::config:
        return exit_usage;
    case ErrorKind::data:
    case ErrorKind::zeros_unsupported:
    case ErrorKind::insufficient_data:
    case ErrorKind::invalid_dimension:
    case ErrorKind::degenerate_probability:
    case ErrorKind::contract_violation:
        return exit_data;
    case ErrorKind::numeric_overflow:
    case ErrorKind::non_convergence:
    case ErrorKind::rank_deficiency:
    case ErrorKind::identifiability:
    case ErrorKind::crosscheck_mismatch:
        return exit_numerical;
    }
    return exit_numerical;
}

namespace {

std::ofstream open_out(const std::string& dir, const std::string& name) {
    fs::create_directories(dir);
    const auto path = fs::path(dir) / name;
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorKind::config, "cannot write '" + path.string() + "'");
    }
    return out;
}

template <class Body>
int guarded(std::ostream& log, Body&& body) {
    try {
        return body();
    } catch (const Error& e) {
        log << "error: " << e.what() << '\n';
        return exit_code_for(e.kind());
    } catch (const fs::filesystem_error& e) {
        log << "error: " << e.what() << '\n';
        return exit_usage;
    }
}

std::pair<double, double> covariate_range(const CompositionalDataset& data) {
    double lo = data[0].covariates[0];
    double hi = lo;
    for (const auto& rec : data.records()) {
        lo = std::min(lo, rec.covariates[0]);
        hi = std::max(hi, rec.covariates[0]);
    }
    return {lo, hi};
}

} // namespace

CurveComparison compare_fitted_curves(const CompositionalDataset& data, const FitResult& fit,
                                      std::optional<double> zero_adjust) {
    if (data.num_covariates() != 1) {
        throw Error(ErrorKind::invalid_dimension, "fitted curves need exactly one covariate");
    }
    const auto [lo, hi] = covariate_range(data);
    const Matrix B = fit.coefficients.B;
    CurveComparison out;
    out.ql_curve = covariate_curve([&](double x) { return logit_probabilities(B, Vector::Constant(1, x)); }, lo, hi,
                                   curve_samples);
    out.ql_min_part = curve_min_part(out.ql_curve);
    try {
        const auto lr = fit_logratio_lm(data, 0, zero_adjust);
        out.logratio_curve =
            covariate_curve([&](double x) { return predict_logratio(lr, Vector::Constant(1, x)); }, lo, hi,
                            curve_samples);
        out.logratio_min_part = curve_min_part(out.logratio_curve);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::zeros_unsupported) {
            throw;
        }
        out.logratio_note = "log-ratio model omitted: data contain zero parts";
    }
    return out;
}

TernaryPlot build_ternary_plot(const CompositionalDataset& data, const FitResult* fit,
                               std::optional<double> zero_adjust) {
    if (data.num_parts() != 3) {
        throw Error(ErrorKind::invalid_dimension, "ternary plot needs exactly three parts");
    }
    TernaryPlot plot;
    plot.part_names = data.part_names();
    for (const auto& rec : data.records()) {
        plot.points.push_back(rec.composition);
        if (data.num_covariates() > 0) {
            plot.point_covariate.push_back(rec.covariates[0]);
        }
    }
    if (data.num_covariates() > 0) {
        plot.covariate_label = data.covariate_names()[0];
    }
    if (fit != nullptr && data.num_covariates() == 1) {
        auto curves = compare_fitted_curves(data, *fit, zero_adjust);
        plot.ql_curve = std::move(curves.ql_curve);
        plot.logratio_curve = std::move(curves.logratio_curve);
        plot.note = curves.logratio_note;
    }
    return plot;
}

int command_fit(const RunConfig& config, std::ostream& log) {
    return guarded(log, [&]() {
        const auto data = parse_csv(config.input, config);
        SolverConfig solver;
        solver.method = config.method;
        solver.constraint = resolve_constraint(config.constraint, data.part_names());
        log << "fitting " << data.size() << " objects, " << data.num_parts() << " parts, "
            << data.num_covariates() << " covariate(s), method " << to_string(config.method) << '\n';

        FitResult result;
        try {
            result = fit(data, solver);
        } catch (const NonConvergenceError& e) {
            auto trace = open_out(config.out_dir, "trace.csv");
            trace << "iteration,score_max_norm\n";
            for (std::size_t i = 0; i < e.trace().size(); ++i) {
                trace << i << ',' << format_double(e.trace()[i]) << '\n';
            }
            throw;
        }
        for (const auto& w : result.warnings) {
            log << "warning: " << w << '\n';
        }

        const Eigen::Index q = data.num_covariates() + 1;
        const auto dispersion = estimate_centered_dispersion(result.residuals, q);
        const auto model = model_vcov(dispersion, data.design_matrix(), solver.constraint);
        const auto sandwich = sandwich_vcov(result, data);
        for (const auto* v : {&model, &sandwich}) {
            for (const auto& w : v->warnings) {
                log << "warning: " << w << '\n';
            }
        }

        {
            auto out = open_out(config.out_dir, "coefficients.csv");
            write_coefficient_table(out, data, result, model, sandwich);
        }
        {
            auto out = open_out(config.out_dir, "dispersion.csv");
            write_labeled_matrix(out, dispersion.matrix, data.part_names(), "part");
        }
        {
            auto out = open_out(config.out_dir, "residuals.csv");
            write_rows(out, result.residuals, data.part_names());
        }
        {
            auto out = open_out(config.out_dir, "convergence.log");
            out << "method " << to_string(result.method_used) << '\n';
            out << "converged " << (result.converged ? "true" : "false") << '\n';
            out << "iterations " << result.iterations << '\n';
            out << "final_score_max_norm " << format_double(result.final_score_norm) << '\n';
            if (result.method_used == SolverMethod::both_crosscheck) {
                out << "crosscheck_max_abs_difference " << format_double(result.crosscheck_difference) << '\n';
            }
            for (std::size_t i = 0; i < result.trace.size(); ++i) {
                out << "trace " << i << ' ' << format_double(result.trace[i]) << '\n';
            }
            for (const auto& w : result.warnings) {
                out << "warning " << w << '\n';
            }
        }
        if (config.plot) {
            const auto plot = build_ternary_plot(data, &result, config.zero_adjust);
            auto out = open_out(config.out_dir, "ternary.svg");
            out << render_ternary_svg(plot);
        }
        log << "converged in " << result.iterations << " iterations; results in " << config.out_dir << '\n';
        return static_cast<int>(exit_ok);
    });
}

int command_plot(const RunConfig& config, bool with_models, std::ostream& log) {
    return guarded(log, [&]() {
        const auto data = parse_csv(config.input, config);
        std::optional<FitResult> result;
        if (with_models && data.num_covariates() == 1) {
            SolverConfig solver;
            solver.method = config.method;
            solver.constraint = resolve_constraint(config.constraint, data.part_names());
            result = fit(data, solver);
        }
        const auto plot = build_ternary_plot(data, result ? &*result : nullptr, config.zero_adjust);
        auto out = open_out(config.out_dir, "ternary.svg");
        out << render_ternary_svg(plot);
        if (!plot.note.empty()) {
            log << "note: " << plot.note << '\n';
        }
        log << "wrote " << (fs::path(config.out_dir) / "ternary.svg").string() << '\n';
        return static_cast<int>(exit_ok);
    });
}

int command_distances(const RunConfig& config, const std::string& kind, std::ostream& log) {
    return guarded(log, [&]() {
        const auto data = parse_csv(config.input, config);
        std::vector<std::string> labels;
        for (Eigen::Index i = 0; i < data.size(); ++i) {
            labels.push_back(std::to_string(i + 1));
        }
        DistanceMatrix dist;
        if (kind == "aitchison") {
            dist = aitchison_distance_matrix(data);
        } else {
            const Matrix r = compositional_residuals(data);
            if (kind == "identity") {
                dist = distance_matrix(r, MetricKind::identity);
            } else if (kind == "mahalanobis") {
                const auto disp = estimate_centered_dispersion(r, 1);
                dist = distance_matrix(r, MetricKind::mahalanobis_phi, &disp);
                auto out = open_out(config.out_dir, "dispersion.csv");
                write_labeled_matrix(out, disp.matrix, data.part_names(), "part");
            } else {
                throw Error(ErrorKind::config, "distance kind must be identity, mahalanobis or aitchison");
            }
        }
        auto out = open_out(config.out_dir, "distances.csv");
        write_labeled_matrix(out, dist.entries, labels, "object");
        log << "wrote " << kind << " distances for " << data.size() << " objects\n";
        return static_cast<int>(exit_ok);
    });
}

int command_baseline(const RunConfig& config, std::ostream& log) {
    return guarded(log, [&]() {
        const auto data = parse_csv(config.input, config);
        Eigen::Index ref = 0;
        const auto constraint = resolve_constraint(config.constraint, data.part_names());
        if (constraint.kind == IdentificationConstraint::Kind::reference_part) {
            ref = constraint.reference;
        }
        const auto lr = fit_logratio_lm(data, ref, config.zero_adjust);
        std::vector<std::string> ratio_names;
        for (Eigen::Index k = 0; k < data.num_parts(); ++k) {
            if (k != ref) {
                ratio_names.push_back("log(" + data.part_names()[static_cast<std::size_t>(k)] + "/" +
                                      data.part_names()[static_cast<std::size_t>(ref)] + ")");
            }
        }
        {
            auto out = open_out(config.out_dir, "logratio_coefficients.csv");
            out << "ratio,covariate,estimate\n";
            for (Eigen::Index j = 0; j < lr.coefficients.rows(); ++j) {
                for (Eigen::Index r = 0; r < lr.coefficients.cols(); ++r) {
                    out << ratio_names[static_cast<std::size_t>(j)] << ','
                        << (r == 0 ? std::string("(intercept)") : data.covariate_names()[static_cast<std::size_t>(r - 1)])
                        << ',' << format_double(lr.coefficients(j, r)) << '\n';
                }
            }
        }
        {
            auto out = open_out(config.out_dir, "logratio_covariance.csv");
            write_labeled_matrix(out, lr.residual_covariance, ratio_names, "ratio");
        }
        log << "log-ratio model fitted with reference part " << data.part_names()[static_cast<std::size_t>(ref)];
        if (config.zero_adjust) {
            log << " (zero adjustment " << format_double(*config.zero_adjust) << ")";
        }
        log << '\n';
        return static_cast<int>(exit_ok);
    });
}

int command_simulate(const std::string& scenario_path, const std::string& out_dir, std::optional<std::uint64_t> seed,
                     unsigned threads, std::ostream& log) {
    return guarded(log, [&]() {
        auto sc = parse_scenario_file(scenario_path);
        if (seed) {
            sc.seed = *seed;
        }
        SolverConfig solver;
        const auto results = run_study(sc, solver, threads);
        const auto summary = summarize_study(sc, results);
        {
            auto out = open_out(out_dir, "replicates.csv");
            write_study_csv(out, sc, results);
        }
        {
            auto out = open_out(out_dir, "summary.csv");
            write_study_summary(out, sc, summary);
        }
        log << sc.replicates << " replicates, " << summary.failures << " failed; results in " << out_dir << '\n';
        return static_cast<int>(exit_ok);
    });
}

int command_generate(const std::string& scenario_path, const std::string& out_path,
                     std::optional<std::uint64_t> seed, std::ostream& log) {
    return guarded(log, [&]() {
        auto sc = parse_scenario_file(scenario_path);
        if (seed) {
            sc.seed = *seed;
        }
        const auto sim = simulate_dataset(sc, 0);
        const auto parent = fs::path(out_path).parent_path();
        if (!parent.empty()) {
            fs::create_directories(parent);
        }
        std::ofstream out(out_path);
        if (!out) {
            throw Error(ErrorKind::config, "cannot write '" + out_path + "'");
        }
        write_dataset_csv(out, sim.data);
        log << "wrote " << sim.data.size() << " objects";
        if (sim.resampled_rows > 0) {
            log << " (" << sim.resampled_rows << " all-zero rows redrawn)";
        }
        log << '\n';
        return static_cast<int>(exit_ok);
    });
}

} // namespace compos
