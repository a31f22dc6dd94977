#include "compos/commands.hpp"
#include "compos/inference.hpp"
#include "compos/io.hpp"
#include "compos/logratio.hpp"
#include "compos/multivariate.hpp"
#include "compos/simulate.hpp"
#include "compos/solver.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <sstream>

namespace py = pybind11;
using namespace compos;

namespace {

const char* kind_name(ErrorKind k) {
    switch (k) {
    case ErrorKind::invalid_dimension: return "invalid_dimension";
    case ErrorKind::contract_violation: return "contract_violation";
    case ErrorKind::numeric_overflow: return "numeric_overflow";
    case ErrorKind::degenerate_probability: return "degenerate_probability";
    case ErrorKind::non_convergence: return "non_convergence";
    case ErrorKind::rank_deficiency: return "rank_deficiency";
    case ErrorKind::insufficient_data: return "insufficient_data";
    case ErrorKind::identifiability: return "identifiability";
    case ErrorKind::zeros_unsupported: return "zeros_unsupported";
    case ErrorKind::crosscheck_mismatch: return "crosscheck_mismatch";
    case ErrorKind::config: return "config";
    case ErrorKind::data: return "data";
    }
    return "unknown";
}

SolverMethod parse_method(const std::string& m) {
    if (m == "gamma") return SolverMethod::gamma_trick;
    if (m == "scoring") return SolverMethod::fisher_scoring;
    if (m == "both") return SolverMethod::both_crosscheck;
    throw Error(ErrorKind::config, "method must be gamma, scoring or both");
}

CompositionalDataset make_dataset(const Matrix& raw, const std::optional<Matrix>& covariates) {
    return CompositionalDataset::from_raw(raw, covariates ? *covariates : Matrix(raw.rows(), 0));
}

IdentificationConstraint make_constraint(std::optional<Eigen::Index> reference) {
    return reference ? IdentificationConstraint::reference_part(*reference) : IdentificationConstraint::sum_to_zero();
}

py::dict fit_dict(const CompositionalDataset& data, const FitResult& f) {
    const auto disp = estimate_centered_dispersion(standardized_residuals(f, data), data.num_covariates() + 1);
    const auto model = model_vcov(disp, data.design_matrix(), f.coefficients.constraint);
    const auto sand = sandwich_vcov(f, data);
    Matrix fitted(data.size(), data.num_parts());
    for (Eigen::Index i = 0; i < data.size(); ++i) {
        fitted.row(i) = f.fitted[static_cast<std::size_t>(i)].parts().transpose();
    }
    py::dict out;
    out["coefficients"] = f.coefficients.B;
    out["se_model"] = CoefficientMatrix::unvec(model.standard_errors(), data.num_parts()).eval();
    out["se_sandwich"] = CoefficientMatrix::unvec(sand.standard_errors(), data.num_parts()).eval();
    out["vcov_model"] = model.matrix;
    out["vcov_sandwich"] = sand.matrix;
    out["dispersion"] = disp.matrix;
    out["fitted"] = fitted;
    out["residuals"] = f.residuals;
    out["iterations"] = f.iterations;
    out["converged"] = f.converged;
    out["score_norm"] = f.final_score_norm;
    out["method"] = std::string(to_string(f.method_used));
    out["separated_parts"] = f.separated_parts;
    out["warnings"] = f.warnings;
    out["crosscheck_difference"] = f.crosscheck_difference;
    return out;
}

} // namespace

PYBIND11_MODULE(_compos, m) {
    m.doc() = "Quasi-likelihood logit regression and multivariate tools for compositional data";

    static py::exception<Error> exc(m, "CompositionError", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) {
                std::rethrow_exception(p);
            }
        } catch (const Error& e) {
            py::set_error(exc, (std::string(kind_name(e.kind())) + ": " + e.what()).c_str());
        }
    });

    m.def("centering_matrix", &centering_matrix, py::arg("dim"));
    m.def(
        "wedderburn_cov", [](const Vector& pi, const Matrix& phi) { return wedderburn_cov(pi, ErrorDispersion(phi)); },
        py::arg("pi"), py::arg("phi"));
    m.def("multinomial_pinv", &multinomial_pinv, py::arg("pi"));
    m.def("stabilize", &stabilize, py::arg("pi"), py::arg("V"));
    m.def("logit_probabilities", [](const Matrix& B, const Vector& x) { return logit_probabilities(B, x).parts(); },
          py::arg("B"), py::arg("covariates"));

    m.def(
        "fit",
        [](const Matrix& raw, const std::optional<Matrix>& covariates, const std::string& method,
           std::optional<Eigen::Index> reference, int max_iterations, double score_tolerance) {
            const auto data = make_dataset(raw, covariates);
            SolverConfig cfg;
            cfg.method = parse_method(method);
            cfg.constraint = make_constraint(reference);
            cfg.max_iterations = max_iterations;
            cfg.score_tolerance = score_tolerance;
            return fit_dict(data, fit(data, cfg));
        },
        py::arg("raw"), py::arg("covariates") = py::none(), py::arg("method") = "gamma",
        py::arg("reference") = py::none(), py::arg("max_iterations") = 100, py::arg("score_tolerance") = 1e-8,
        "Fit the compositional logit model. `raw` is N x D nonnegative, `covariates` N x p.\n"
        "Returns a dict with coefficients (D x (p+1)), standard errors, covariances and diagnostics.");

    m.def(
        "quasi_score",
        [](const Matrix& B, const Matrix& raw, const std::optional<Matrix>& covariates,
           const std::optional<Matrix>& phi) {
            const auto data = make_dataset(raw, covariates);
            return phi ? quasi_score_general(B, data, ErrorDispersion(*phi)) : quasi_score(B, data);
        },
        py::arg("B"), py::arg("raw"), py::arg("covariates") = py::none(), py::arg("phi") = py::none());

    m.def(
        "fit_logratio",
        [](const Matrix& raw, const std::optional<Matrix>& covariates, Eigen::Index reference,
           std::optional<double> zero_adjust) {
            const auto f = fit_logratio_lm(make_dataset(raw, covariates), reference, zero_adjust);
            py::dict out;
            out["coefficients"] = f.coefficients;
            out["residual_covariance"] = f.residual_covariance;
            out["logit_coefficients"] = logratio_coefficient_matrix(f);
            return out;
        },
        py::arg("raw"), py::arg("covariates") = py::none(), py::arg("reference") = 0,
        py::arg("zero_adjust") = py::none());

    m.def(
        "distances",
        [](const Matrix& raw, const std::string& kind, bool squared) {
            const auto data = make_dataset(raw, std::nullopt);
            if (kind == "aitchison") {
                return aitchison_distance_matrix(data, squared).entries;
            }
            const Matrix r = compositional_residuals(data);
            if (kind == "identity") {
                return distance_matrix(r, MetricKind::identity, nullptr, squared).entries;
            }
            if (kind == "mahalanobis") {
                const auto disp = estimate_centered_dispersion(r, 1);
                return distance_matrix(r, MetricKind::mahalanobis_phi, &disp, squared).entries;
            }
            throw Error(ErrorKind::config, "kind must be identity, mahalanobis or aitchison");
        },
        py::arg("raw"), py::arg("kind") = "identity", py::arg("squared") = false,
        "Pairwise distances between objects, from mean-standardized residuals or clr coordinates.");

    m.def(
        "null_correlation",
        [](const Matrix& dispersion, int bootstrap_reps, const std::optional<Matrix>& residuals, std::uint64_t seed) {
            auto disp = CenteredDispersion::assumed(dispersion);
            if (residuals) {
                disp.df = static_cast<double>(residuals->rows());
            }
            const auto d =
                null_correlation_diagnostic(disp, bootstrap_reps, residuals ? &*residuals : nullptr, seed);
            py::dict out;
            out["variances"] = d.fitted_variances;
            out["structure_residual"] = d.structure_residual;
            out["bootstrap_p"] = d.bootstrap_p;
            return out;
        },
        py::arg("dispersion"), py::arg("bootstrap_reps") = 0, py::arg("residuals") = py::none(),
        py::arg("seed") = 0);

    m.def(
        "simulate",
        [](const std::string& scenario, int replicate, std::optional<std::uint64_t> seed) {
            std::istringstream in(scenario);
            auto sc = parse_scenario(in);
            if (seed) {
                sc.seed = *seed;
            }
            const auto sim = simulate_dataset(sc, replicate);
            const Matrix X = sim.data.design_matrix();
            return py::make_tuple(sim.data.raw_matrix(), X.rightCols(X.cols() - 1).eval(), sc.true_B);
        },
        py::arg("scenario"), py::arg("replicate") = 0, py::arg("seed") = py::none(),
        "Simulate one dataset from scenario text (key = value lines). Returns (raw, covariates, true_B).");

    m.def(
        "read_csv",
        [](const std::string& path, const std::vector<std::string>& parts, const std::vector<std::string>& covariates,
           const std::vector<std::string>& log) {
            RunConfig cfg;
            cfg.parts = parts;
            for (const auto& c : covariates) {
                CovariateSpec spec{c};
                if (std::find(log.begin(), log.end(), c) != log.end()) {
                    spec.transform = Transform::log;
                }
                cfg.covariates.push_back(spec);
            }
            const auto data = parse_csv(path, cfg);
            const Matrix X = data.design_matrix();
            py::dict out;
            out["raw"] = data.raw_matrix();
            out["covariates"] = X.rightCols(X.cols() - 1).eval();
            out["parts"] = data.part_names();
            out["covariate_names"] = data.covariate_names();
            return out;
        },
        py::arg("path"), py::arg("parts") = std::vector<std::string>{},
        py::arg("covariates") = std::vector<std::string>{}, py::arg("log") = std::vector<std::string>{});
}
