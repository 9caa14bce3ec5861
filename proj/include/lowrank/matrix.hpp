#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "lowrank/errors.hpp"
#include "lowrank/rng.hpp"

namespace lowrank {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using index_t = Eigen::Index;

inline bool all_finite(const Matrix& M) { return M.allFinite(); }

inline void require_finite(const Matrix& M, const char* where) {
    if (!M.allFinite())
        throw parameter_error(std::string(where) + ": matrix has non-finite entries");
}

enum class Norm { frobenius, spectral, nuclear, l1, linf, linf2 };

// Spectral norm by power iteration on MᵀM: 200-iteration cap, 1e-9 relative
// Rayleigh tolerance, deterministic seeded start. Returns 0 for the zero
// matrix; never throws beyond the finiteness check in norm().
inline double spectral_norm(const Matrix& M) {
    if (M.size() == 0) return 0.0;
    if (M.cwiseAbs().maxCoeff() == 0.0) return 0.0;
    Rng rng(0x5eccaa1dULL); // fixed stream: the norm is a pure function
    Vector v(M.cols());
    for (index_t i = 0; i < v.size(); ++i) v[i] = rng.normal();
    const double vn = v.norm();
    if (vn == 0.0) v.setOnes(); // unreachable with a normal draw; belt and braces
    v.normalize();
    double sigma2 = 0.0;
    for (int it = 0; it < 200; ++it) {
        Vector w = M.transpose() * (M * v);
        const double ray = v.dot(w); // Rayleigh quotient of MᵀM = σ²
        const double wn = w.norm();
        if (wn == 0.0) return 0.0;   // start vector sits in the null space
        v = w / wn;
        if (it > 0 && std::abs(ray - sigma2) <= 1e-9 * std::max(ray, 1e-300)) {
            sigma2 = ray;
            break;
        }
        sigma2 = ray;
    }
    return std::sqrt(std::max(sigma2, 0.0));
}

// Sum of singular values. Takes the symmetric eigenvalue route when the input
// is (numerically) symmetric, matching the factorization in svd().
inline double nuclear_norm(const Matrix& M) {
    if (M.size() == 0) return 0.0;
    if (M.rows() == M.cols() &&
        (M - M.transpose()).norm() <= 1e-13 * std::max(1.0, M.norm())) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(M, Eigen::EigenvaluesOnly);
        if (es.info() == Eigen::Success) return es.eigenvalues().cwiseAbs().sum();
    }
    Eigen::BDCSVD<Matrix> dec(M);
    return dec.singularValues().sum();
}

inline double norm(const Matrix& M, Norm kind) {
    require_finite(M, "norm");
    switch (kind) {
    case Norm::frobenius: return M.norm();
    case Norm::spectral: return spectral_norm(M);
    case Norm::nuclear: return nuclear_norm(M);
    case Norm::l1: return M.cwiseAbs().sum();
    case Norm::linf: return M.size() == 0 ? 0.0 : M.cwiseAbs().maxCoeff();
    case Norm::linf2: {
        // max over all row l2 norms and all column l2 norms
        if (M.size() == 0) return 0.0;
        const double row = M.rowwise().norm().maxCoeff();
        const double col = M.colwise().norm().maxCoeff();
        return std::max(row, col);
    }
    }
    throw parameter_error("norm: unknown kind");
}

// Standard normal fill in documented row-major order; the order is part of
// the determinism contract for seeded instance generation.
inline Matrix gaussian_matrix(index_t rows, index_t cols, Rng& rng) {
    Matrix G(rows, cols);
    for (index_t i = 0; i < rows; ++i)
        for (index_t j = 0; j < cols; ++j)
            G(i, j) = rng.normal();
    return G;
}

} // namespace lowrank
