#pragma once

#include <numeric>
#include <vector>

#include "lowrank/matrix.hpp"

namespace lowrank {

struct SvdFactors {
    Matrix U;               // n1 × k, orthonormal columns
    Vector singular_values; // length k, nonincreasing, ≥ 0
    Matrix V;               // n2 × k, orthonormal columns
};

// Deterministic sign convention shared by every factorization here: the
// largest-magnitude entry of each left singular vector is positive (first
// index wins ties); the right vector flips with it so the product is fixed.
inline void fix_signs(Matrix& U, Matrix& V) {
    for (index_t c = 0; c < U.cols(); ++c) {
        index_t im = 0;
        U.col(c).cwiseAbs().maxCoeff(&im);
        if (U(im, c) < 0.0) {
            U.col(c) = -U.col(c);
            V.col(c) = -V.col(c);
        }
    }
}

// Thin SVD, optionally truncated to the top max_rank triplets (max_rank < 0
// keeps all min(n1,n2) of them).
//
// Symmetric inputs take the self-adjoint eigensolver route: eigenpairs sorted
// by |eigenvalue|, σ = |λ|, U the eigenvectors and V their sign-adjusted
// copies. For a PSD input this yields U = V exactly, which downstream
// incoherence checks rely on; a generic SVD would only match up to column
// sign/rotation noise.
inline SvdFactors svd(const Matrix& M, index_t max_rank = -1) {
    require_finite(M, "svd");
    const index_t n1 = M.rows(), n2 = M.cols();
    const index_t kfull = std::min(n1, n2);
    const index_t k = (max_rank < 0) ? kfull : std::min<index_t>(max_rank, kfull);
    SvdFactors f;
    if (k <= 0 || M.size() == 0) {
        f.U = Matrix::Zero(n1, std::max<index_t>(k, 0));
        f.singular_values = Vector::Zero(std::max<index_t>(k, 0));
        f.V = Matrix::Zero(n2, std::max<index_t>(k, 0));
        return f;
    }

    const bool symmetric =
        n1 == n2 && (M - M.transpose()).norm() <= 1e-13 * std::max(1.0, M.norm());
    if (symmetric) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(M);
        if (es.info() != Eigen::Success)
            throw numerical_error(
                "svd: symmetric eigensolver failed to converge within its "
                "internal sweep cap (about 30 iterations per off-diagonal)");
        std::vector<index_t> order(n1);
        std::iota(order.begin(), order.end(), index_t{0});
        const Vector& ev = es.eigenvalues();
        std::stable_sort(order.begin(), order.end(), [&](index_t a, index_t b) {
            return std::abs(ev[a]) > std::abs(ev[b]);
        });
        f.U.resize(n1, k);
        f.V.resize(n1, k);
        f.singular_values.resize(k);
        for (index_t c = 0; c < k; ++c) {
            const index_t i = order[static_cast<std::size_t>(c)];
            const double lam = ev[i];
            f.U.col(c) = es.eigenvectors().col(i);
            f.V.col(c) = (lam < 0.0 ? -1.0 : 1.0) * es.eigenvectors().col(i);
            f.singular_values[c] = std::abs(lam);
        }
    } else {
        Eigen::BDCSVD<Matrix> dec(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
        if (dec.info() != Eigen::Success)
            throw numerical_error("svd: BDCSVD failed to converge at its internal iteration cap");
        f.U = dec.matrixU().leftCols(k);
        f.V = dec.matrixV().leftCols(k);
        f.singular_values = dec.singularValues().head(k);
    }
    fix_signs(f.U, f.V);
    return f;
}

} // namespace lowrank
