#include "compos/simulate.hpp"

#include "compos/error.hpp"
#include "compos/inference.hpp"

#include <atomic>
#include <cmath>
#include <random>
#include <thread>

namespace compos {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

Eigen::Index law_dim(const ErrorLaw& law) {
    return std::visit(overloaded{
                          [](const LognormalLaw& l) { return l.sigma.rows(); },
                          [](const GammaLaw& g) { return g.shapes.size(); },
                          [](const ZeroInflatedLaw& z) {
                              return std::visit(overloaded{[](const LognormalLaw& l) { return l.sigma.rows(); },
                                                           [](const GammaLaw& g) { return g.shapes.size(); }},
                                                z.base);
                          },
                      },
                      law);
}

void validate_base(const std::variant<LognormalLaw, GammaLaw>& base) {
    std::visit(overloaded{
                   [](const LognormalLaw& l) {
                       try {
                           require_psd(l.sigma, "lognormal sigma");
                       } catch (const Error& e) {
                           throw Error(ErrorKind::config, e.what());
                       }
                   },
                   [](const GammaLaw& g) {
                       if (!(g.shapes.array() > 0.0).all() || !g.shapes.allFinite()) {
                           throw Error(ErrorKind::config, "gamma shapes must be positive and finite");
                       }
                   },
               },
               base);
}

Matrix lognormal_factor(const Matrix& sigma) {
    const auto eig = symmetric_eigen(sigma);
    return eig.vectors * eig.values.cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

Matrix phi_of_base(const std::variant<LognormalLaw, GammaLaw>& base) {
    return std::visit(overloaded{
                          [](const LognormalLaw& l) -> Matrix { return (l.sigma.array().exp() - 1.0).matrix(); },
                          [](const GammaLaw& g) -> Matrix { return g.shapes.cwiseInverse().asDiagonal(); },
                      },
                      base);
}

void draw_base(const std::variant<LognormalLaw, GammaLaw>& base, Matrix& out, std::mt19937_64& rng) {
    std::visit(overloaded{
                   [&](const LognormalLaw& l) {
                       const Matrix factor = lognormal_factor(l.sigma);
                       const Vector mean = -0.5 * l.sigma.diagonal();
                       std::normal_distribution<double> normal(0.0, 1.0);
                       Vector z(l.sigma.rows());
                       for (Eigen::Index i = 0; i < out.rows(); ++i) {
                           for (Eigen::Index k = 0; k < z.size(); ++k) {
                               z[k] = normal(rng);
                           }
                           out.row(i) = (mean + factor * z).array().exp().matrix().transpose();
                       }
                   },
                   [&](const GammaLaw& g) {
                       std::vector<std::gamma_distribution<double>> dists;
                       for (Eigen::Index k = 0; k < g.shapes.size(); ++k) {
                           dists.emplace_back(g.shapes[k], 1.0 / g.shapes[k]);
                       }
                       for (Eigen::Index i = 0; i < out.rows(); ++i) {
                           for (Eigen::Index k = 0; k < out.cols(); ++k) {
                               out(i, k) = dists[static_cast<std::size_t>(k)](rng);
                           }
                       }
                   },
               },
               base);
}

void draw_into(const ErrorLaw& law, Matrix& out, std::mt19937_64& rng) {
    if (const auto* z = std::get_if<ZeroInflatedLaw>(&law)) {
        draw_base(z->base, out, rng);
        std::bernoulli_distribution keep(1.0 - z->zero_prob);
        const double inflate = 1.0 / (1.0 - z->zero_prob);
        for (Eigen::Index i = 0; i < out.rows(); ++i) {
            for (Eigen::Index k = 0; k < out.cols(); ++k) {
                out(i, k) = keep(rng) ? out(i, k) * inflate : 0.0;
            }
        }
        return;
    }
    if (const auto* l = std::get_if<LognormalLaw>(&law)) {
        draw_base(*l, out, rng);
    } else {
        draw_base(std::get<GammaLaw>(law), out, rng);
    }
}

} // namespace

void validate_law(const ErrorLaw& law, Eigen::Index num_parts) {
    if (law_dim(law) != num_parts) {
        throw Error(ErrorKind::config, "error law dimension does not match the number of parts");
    }
    std::visit(overloaded{
                   [](const LognormalLaw& l) { validate_base(l); },
                   [](const GammaLaw& g) { validate_base(g); },
                   [](const ZeroInflatedLaw& z) {
                       if (!(z.zero_prob >= 0.0 && z.zero_prob < 1.0)) {
                           throw Error(ErrorKind::config, "zero_prob must lie in [0, 1)");
                       }
                       validate_base(z.base);
                   },
               },
               law);
}

ErrorDispersion phi_of_law(const ErrorLaw& law) {
    validate_law(law, law_dim(law));
    if (const auto* z = std::get_if<ZeroInflatedLaw>(&law)) {
        Matrix phi = phi_of_base(z->base);
        // E[U_k^2] = (1 + phi_kk) / (1 - q); off-diagonal moments are unchanged because
        // the zero indicators are independent with mean (1 - q).
        phi.diagonal() = ((phi.diagonal().array() + 1.0) / (1.0 - z->zero_prob) - 1.0).matrix();
        return ErrorDispersion(phi);
    }
    if (const auto* l = std::get_if<LognormalLaw>(&law)) {
        return ErrorDispersion(phi_of_base(*l));
    }
    return ErrorDispersion(phi_of_base(std::get<GammaLaw>(law)));
}

Matrix draw_errors(const ErrorLaw& law, Eigen::Index num_parts, Eigen::Index count, std::uint64_t seed) {
    validate_law(law, num_parts);
    if (count < 0) {
        throw Error(ErrorKind::config, "count must be nonnegative");
    }
    std::mt19937_64 rng(seed);
    Matrix out(count, num_parts);
    draw_into(law, out, rng);
    return out;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t replicate, StreamPurpose purpose) {
    std::uint64_t s = splitmix64(master);
    s = splitmix64(s ^ replicate);
    return splitmix64(s ^ static_cast<std::uint64_t>(purpose));
}

void validate_scenario(const SimulationScenario& sc) {
    if (sc.N < 1 || sc.D < 2 || sc.p < 0 || sc.replicates < 1) {
        throw Error(ErrorKind::config, "scenario needs N >= 1, D >= 2, p >= 0, replicates >= 1");
    }
    if (sc.true_B.rows() != sc.D || sc.true_B.cols() != sc.p + 1) {
        throw Error(ErrorKind::config, "true_B must be D x (p+1)");
    }
    if (!sc.true_B.allFinite()) {
        throw Error(ErrorKind::config, "true_B must be finite");
    }
    validate_law(sc.errors, sc.D);
    if (sc.covariates.kind == CovariateLaw::Kind::normal ? !(sc.covariates.b >= 0.0)
                                                         : !(sc.covariates.b > sc.covariates.a)) {
        throw Error(ErrorKind::config, "invalid covariate law parameters");
    }
    switch (sc.tau.kind) {
    case TauLaw::Kind::constant:
        if (!(sc.tau.a > 0.0)) {
            throw Error(ErrorKind::config, "constant total must be positive");
        }
        break;
    case TauLaw::Kind::lognormal:
        if (!(sc.tau.b >= 0.0)) {
            throw Error(ErrorKind::config, "lognormal total log-sd must be nonnegative");
        }
        break;
    case TauLaw::Kind::uniform:
        if (!(sc.tau.a > 0.0 && sc.tau.b > sc.tau.a)) {
            throw Error(ErrorKind::config, "uniform totals need 0 < lower < upper");
        }
        break;
    }
}

SimulatedDataset simulate_dataset(const SimulationScenario& sc, int replicate) {
    validate_scenario(sc);
    const auto rep = static_cast<std::uint64_t>(replicate);

    std::mt19937_64 cov_rng(derive_seed(sc.seed, rep, StreamPurpose::covariates));
    Matrix covs(sc.N, sc.p);
    if (sc.covariates.kind == CovariateLaw::Kind::normal) {
        std::normal_distribution<double> dist(sc.covariates.a, sc.covariates.b);
        for (Eigen::Index i = 0; i < sc.N; ++i) {
            for (Eigen::Index r = 0; r < sc.p; ++r) {
                covs(i, r) = dist(cov_rng);
            }
        }
    } else {
        std::uniform_real_distribution<double> dist(sc.covariates.a, sc.covariates.b);
        for (Eigen::Index i = 0; i < sc.N; ++i) {
            for (Eigen::Index r = 0; r < sc.p; ++r) {
                covs(i, r) = dist(cov_rng);
            }
        }
    }

    std::mt19937_64 tau_rng(derive_seed(sc.seed, rep, StreamPurpose::totals));
    Vector tau(sc.N);
    for (Eigen::Index i = 0; i < sc.N; ++i) {
        switch (sc.tau.kind) {
        case TauLaw::Kind::constant:
            tau[i] = sc.tau.a;
            break;
        case TauLaw::Kind::lognormal:
            tau[i] = std::exp(sc.tau.a + sc.tau.b * std::normal_distribution<double>(0.0, 1.0)(tau_rng));
            break;
        case TauLaw::Kind::uniform:
            tau[i] = std::uniform_real_distribution<double>(sc.tau.a, sc.tau.b)(tau_rng);
            break;
        }
    }

    std::mt19937_64 err_rng(derive_seed(sc.seed, rep, StreamPurpose::errors));
    Matrix U(sc.N, sc.D);
    draw_into(sc.errors, U, err_rng);
    int resampled = 0;
    Matrix row(1, sc.D);
    for (Eigen::Index i = 0; i < sc.N; ++i) {
        while ((U.row(i).array() == 0.0).all()) {
            draw_into(sc.errors, row, err_rng);
            U.row(i) = row.row(0);
            ++resampled;
        }
    }

    // The composition is normalized from the unscaled shares, so the totals law
    // changes raw values and totals only, never a bit of the composition.
    std::vector<MeasurementRecord> records;
    records.reserve(static_cast<std::size_t>(sc.N));
    for (Eigen::Index i = 0; i < sc.N; ++i) {
        Vector x = covs.row(i).transpose();
        const Vector shares = logit_probabilities(sc.true_B, x).parts().cwiseProduct(U.row(i).transpose());
        Vector raw = tau[i] * shares;
        const double total = raw.sum();
        records.push_back(MeasurementRecord{std::move(raw), total, Composition::normalize(shares), std::move(x)});
    }
    return SimulatedDataset{CompositionalDataset(std::move(records)), resampled};
}

namespace {

ReplicateResult run_replicate(const SimulationScenario& sc, const SolverConfig& config, const Vector& truth,
                              int replicate) {
    ReplicateResult out;
    out.replicate = replicate;
    try {
        const auto sim = simulate_dataset(sc, replicate);
        out.resampled_rows = sim.resampled_rows;
        SolverConfig cfg = config;
        cfg.constraint = IdentificationConstraint::sum_to_zero();
        const FitResult fitted = fit(sim.data, cfg);
        out.converged = fitted.converged;
        out.iterations = fitted.iterations;
        out.estimate = fitted.coefficients.vec();
        const auto disp = estimate_centered_dispersion(fitted.residuals, sc.p + 1);
        const auto vcov = model_vcov(disp, sim.data.design_matrix());
        out.se_model = vcov.standard_errors();
        out.se_sandwich = sandwich_vcov(fitted, sim.data).standard_errors();
        out.covered.resize(static_cast<std::size_t>(truth.size()));
        for (Eigen::Index j = 0; j < truth.size(); ++j) {
            out.covered[static_cast<std::size_t>(j)] =
                std::abs(out.estimate[j] - truth[j]) <= z_975 * out.se_model[j];
        }
    } catch (const Error& e) {
        out.converged = false;
        out.error = e.what();
    }
    return out;
}

} // namespace

std::vector<ReplicateResult> run_study(const SimulationScenario& sc, const SolverConfig& config, unsigned threads) {
    validate_scenario(sc);
    const Vector truth = apply_constraint(sc.true_B, IdentificationConstraint::sum_to_zero()).vec();
    std::vector<ReplicateResult> results(static_cast<std::size_t>(sc.replicates));
    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = std::min<unsigned>(threads, static_cast<unsigned>(sc.replicates));
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (int r = next++; r < sc.replicates; r = next++) {
            results[static_cast<std::size_t>(r)] = run_replicate(sc, config, truth, r);
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back(worker);
        }
        for (auto& th : pool) {
            th.join();
        }
    }
    return results;
}

StudySummary summarize_study(const SimulationScenario& sc, const std::vector<ReplicateResult>& results) {
    StudySummary out;
    out.truth = apply_constraint(sc.true_B, IdentificationConstraint::sum_to_zero()).vec();
    const Eigen::Index m = out.truth.size();
    Vector sum = Vector::Zero(m);
    Vector sumsq = Vector::Zero(m);
    Vector cover = Vector::Zero(m);
    int ok = 0;
    for (const auto& r : results) {
        if (!r.error.empty() || !r.converged) {
            ++out.failures;
            continue;
        }
        ++ok;
        sum += r.estimate;
        sumsq += r.estimate.cwiseProduct(r.estimate);
        for (Eigen::Index j = 0; j < m; ++j) {
            cover[j] += r.covered[static_cast<std::size_t>(j)] ? 1.0 : 0.0;
        }
    }
    const double n = static_cast<double>(ok);
    out.mean = ok > 0 ? Vector(sum / n) : Vector::Constant(m, std::nan(""));
    if (ok > 1) {
        const Vector var = ((sumsq - n * out.mean.cwiseProduct(out.mean)) / (n - 1.0)).cwiseMax(0.0);
        out.mc_se = (var / n).cwiseSqrt();
    } else {
        out.mc_se = Vector::Constant(m, std::nan(""));
    }
    out.bias = out.mean - out.truth;
    out.coverage = ok > 0 ? Vector(cover / n) : Vector::Constant(m, std::nan(""));
    return out;
}

} // namespace compos
