#ifndef COMPOS_TESTS_SUPPORT_HPP
#define COMPOS_TESTS_SUPPORT_HPP

// Seeded generators shared by the unit and acceptance tests.

#include "compos/simulate.hpp"

#include <random>

namespace compos::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Eigen::Index uniform_int(Rng& rng, Eigen::Index lo, Eigen::Index hi) {
    return std::uniform_int_distribution<Eigen::Index>(lo, hi)(rng);
}

/// Strictly positive composition; parts spread over roughly two orders of magnitude.
inline Vector random_pi(Rng& rng, Eigen::Index D) {
    Vector v(D);
    for (Eigen::Index k = 0; k < D; ++k) {
        v[k] = std::exp(uniform(rng, -2.5, 2.5));
    }
    return v / v.sum();
}

inline Matrix random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols, double scale = 1.0) {
    std::normal_distribution<double> n(0.0, scale);
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            m(i, j) = n(rng);
        }
    }
    return m;
}

/// PSD with random rank between 1 and D.
inline Matrix random_psd(Rng& rng, Eigen::Index D, double scale = 0.3) {
    const Eigen::Index r = uniform_int(rng, 1, D);
    const Matrix a = random_matrix(rng, D, r, scale);
    return a * a.transpose();
}

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

/// Lognormal-error scenario with a random sum-to-zero truth.
inline SimulationScenario lognormal_scenario(Eigen::Index N, Eigen::Index D, Eigen::Index p, std::uint64_t seed,
                                             double sigma_scale = 0.3) {
    Rng rng(seed);
    SimulationScenario sc;
    sc.N = N;
    sc.D = D;
    sc.p = p;
    sc.true_B = random_matrix(rng, D, p + 1, 0.6);
    sc.true_B.rowwise() -= sc.true_B.colwise().mean();
    Matrix sigma = random_psd(rng, D, sigma_scale);
    sigma.diagonal().array() += 0.02;
    sc.errors = LognormalLaw{sigma};
    sc.tau = TauLaw{TauLaw::Kind::lognormal, 3.0, 0.5};
    sc.seed = seed;
    return sc;
}

} // namespace compos::testing

#endif
