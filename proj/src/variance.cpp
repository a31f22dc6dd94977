#include "compos/variance.hpp"

#include "compos/error.hpp"
#include "compos/model.hpp"

#include <algorithm>
#include <string>

namespace compos {

void require_psd(const Matrix& m, const char* what) {
    require_symmetric(m, what);
    if (m.size() == 0) {
        return;
    }
    const auto eig = symmetric_eigen(m);
    const double top = std::max(eig.values.cwiseAbs().maxCoeff(), 0.0);
    if (eig.values.minCoeff() < -psd_tol * top) {
        throw Error(ErrorKind::contract_violation, std::string(what) + ": matrix is not positive semidefinite");
    }
}

ErrorDispersion::ErrorDispersion(Matrix phi) : phi_(std::move(phi)) {
    require_psd(phi_, "ErrorDispersion");
}

CenteredDispersion CenteredDispersion::assumed(Matrix m) {
    require_symmetric(m, "CenteredDispersion");
    const double scale = std::max(m.cwiseAbs().maxCoeff(), 1.0);
    if (m.rowwise().sum().cwiseAbs().maxCoeff() > 1e-9 * scale) {
        throw Error(ErrorKind::contract_violation, "CenteredDispersion: row sums must be zero");
    }
    return CenteredDispersion{std::move(m), Provenance::assumed, 0.0};
}

CenteredDispersion CenteredDispersion::from_phi(const ErrorDispersion& phi) {
    const Matrix c = centering_matrix(phi.dim());
    Matrix m = c * phi.matrix() * c;
    return CenteredDispersion{0.5 * (m + m.transpose()), Provenance::assumed, 0.0};
}

Matrix wedderburn_cov(const Vector& pi, const ErrorDispersion& phi) {
    if (pi.size() != phi.dim()) {
        throw Error(ErrorKind::invalid_dimension, "wedderburn_cov: dimension mismatch");
    }
    const Matrix m = multinomial_cov(pi);
    Matrix v = m * phi.matrix() * m;
    return 0.5 * (v + v.transpose());
}

Matrix multinomial_pinv(const Vector& pi) {
    if (!(pi.array() > 0.0).all()) {
        throw Error(ErrorKind::degenerate_probability, "multinomial_pinv: zero part probability");
    }
    const Matrix c = centering_matrix(pi.size());
    return c * pi.cwiseInverse().asDiagonal() * c;
}

Matrix stabilize(const Vector& pi, const Matrix& V) {
    if (V.rows() != pi.size() || V.cols() != pi.size()) {
        throw Error(ErrorKind::invalid_dimension, "stabilize: dimension mismatch");
    }
    const Matrix g = multinomial_pinv(pi);
    return g * V * g;
}

} // namespace compos
