#include "compos/linalg.hpp"

#include "compos/error.hpp"

#include <cmath>
#include <string>

namespace compos {

Matrix centering_matrix(Eigen::Index dim) {
    if (dim < 1) {
        throw Error(ErrorKind::invalid_dimension, "centering_matrix: dimension must be at least 1");
    }
    Matrix c = Matrix::Constant(dim, dim, -1.0 / static_cast<double>(dim));
    c.diagonal().array() += 1.0;
    return c;
}

bool is_symmetric(const Matrix& m, double tol) {
    if (m.rows() != m.cols()) {
        return false;
    }
    if (m.size() == 0) {
        return true;
    }
    const double scale = m.cwiseAbs().maxCoeff();
    const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    return asym <= tol * scale;
}

void require_symmetric(const Matrix& m, const char* what) {
    if (m.rows() != m.cols()) {
        throw Error(ErrorKind::contract_violation, std::string(what) + ": matrix is not square");
    }
    if (!m.allFinite()) {
        throw Error(ErrorKind::contract_violation, std::string(what) + ": non-finite entries");
    }
    if (!is_symmetric(m)) {
        throw Error(ErrorKind::contract_violation, std::string(what) + ": matrix is not symmetric");
    }
}

EigenDecomposition symmetric_eigen(const Matrix& m) {
    require_symmetric(m, "symmetric_eigen");
    const Matrix sym = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorKind::numeric_overflow, "symmetric_eigen: decomposition failed");
    }
    // Eigen returns ascending order.
    EigenDecomposition out;
    out.values = solver.eigenvalues().reverse();
    out.vectors = solver.eigenvectors().rowwise().reverse();
    return out;
}

namespace {

double rank_cutoff(const Vector& values, double rank_tol) {
    if (values.size() == 0) {
        return 0.0;
    }
    return rank_tol * values.cwiseAbs().maxCoeff();
}

} // namespace

Matrix sym_pseudo_inverse(const Matrix& m, double rank_tol) {
    const auto eig = symmetric_eigen(m);
    const double cutoff = rank_cutoff(eig.values, rank_tol);
    Vector inv = Vector::Zero(eig.values.size());
    for (Eigen::Index j = 0; j < eig.values.size(); ++j) {
        if (std::abs(eig.values[j]) > cutoff) {
            inv[j] = 1.0 / eig.values[j];
        }
    }
    Matrix out = eig.vectors * inv.asDiagonal() * eig.vectors.transpose();
    return 0.5 * (out + out.transpose());
}

Eigen::Index sym_rank(const Matrix& m, double rank_tol) {
    const auto eig = symmetric_eigen(m);
    const double cutoff = rank_cutoff(eig.values, rank_tol);
    Eigen::Index rank = 0;
    for (Eigen::Index j = 0; j < eig.values.size(); ++j) {
        if (std::abs(eig.values[j]) > cutoff) {
            ++rank;
        }
    }
    return rank;
}

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index k = 0; k < a.cols(); ++k) {
            out.block(i * b.rows(), k * b.cols(), b.rows(), b.cols()) = a(i, k) * b;
        }
    }
    return out;
}

} // namespace compos
