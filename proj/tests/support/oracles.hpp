// Self-contained numerical oracles used to cross-check the library against
// independent implementations. Nothing in here uses Eigen or the library's
// own linear algebra, so agreement between the two is meaningful evidence
// rather than the same code talking to itself. Accuracy over speed; these
// only ever see small matrices.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace oracle {

// Minimal column-major dense matrix.
struct Dense {
    std::size_t rows = 0, cols = 0;
    std::vector<double> a;

    Dense() = default;
    Dense(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return a[i + j * rows]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i + j * rows]; }
};

inline Dense matmul(const Dense& A, const Dense& B) {
    if (A.cols != B.rows) throw std::invalid_argument("oracle::matmul shape");
    Dense C(A.rows, B.cols);
    for (std::size_t j = 0; j < B.cols; ++j)
        for (std::size_t k = 0; k < A.cols; ++k) {
            const double bkj = B(k, j);
            if (bkj == 0.0) continue;
            for (std::size_t i = 0; i < A.rows; ++i) C(i, j) += A(i, k) * bkj;
        }
    return C;
}

inline Dense transpose(const Dense& A) {
    Dense T(A.cols, A.rows);
    for (std::size_t j = 0; j < A.cols; ++j)
        for (std::size_t i = 0; i < A.rows; ++i) T(j, i) = A(i, j);
    return T;
}

inline double frobenius(const Dense& A) {
    double s = 0.0;
    for (const double v : A.a) s += v * v;
    return std::sqrt(s);
}

// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, returned in
// descending order. Destroys its copy of the input.
inline std::vector<double> eigenvalues_sym(Dense A, double tol = 1e-13,
                                           int max_sweeps = 100) {
    if (A.rows != A.cols) throw std::invalid_argument("oracle::eigenvalues_sym shape");
    const std::size_t n = A.rows;
    const double frob = frobenius(A);
    if (frob > 0.0) {
        for (int sweep = 0; sweep < max_sweeps; ++sweep) {
            double off = 0.0;
            for (std::size_t p = 0; p < n; ++p)
                for (std::size_t q = p + 1; q < n; ++q) off += A(p, q) * A(p, q);
            if (std::sqrt(2.0 * off) <= tol * frob) break;
            for (std::size_t p = 0; p + 1 < n; ++p) {
                for (std::size_t q = p + 1; q < n; ++q) {
                    const double apq = A(p, q);
                    if (std::abs(apq) <= 1e-300) continue;
                    const double theta = (A(q, q) - A(p, p)) / (2.0 * apq);
                    const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                     (std::abs(theta) + std::sqrt(1.0 + theta * theta));
                    const double c = 1.0 / std::sqrt(1.0 + t * t);
                    const double s = t * c;
                    for (std::size_t k = 0; k < n; ++k) {
                        const double akp = A(k, p), akq = A(k, q);
                        A(k, p) = c * akp - s * akq;
                        A(k, q) = s * akp + c * akq;
                    }
                    for (std::size_t k = 0; k < n; ++k) {
                        const double apk = A(p, k), aqk = A(q, k);
                        A(p, k) = c * apk - s * aqk;
                        A(q, k) = s * apk + c * aqk;
                    }
                }
            }
        }
    }
    std::vector<double> ev(n);
    for (std::size_t i = 0; i < n; ++i) ev[i] = A(i, i);
    std::sort(ev.begin(), ev.end(), std::greater<double>());
    return ev;
}

// Singular values via the Gram matrix of the thinner side, descending.
inline std::vector<double> singular_values(const Dense& M) {
    const bool gram_right = M.cols <= M.rows;
    const Dense Mt = transpose(M);
    const Dense G = gram_right ? matmul(Mt, M) : matmul(M, Mt);
    std::vector<double> ev = eigenvalues_sym(G);
    for (double& v : ev) v = std::sqrt(std::max(v, 0.0));
    return ev;
}

inline Dense apply_pt(const Dense& U, const Dense& V, const Dense& Z) {
    const Dense Ut = transpose(U), Vt = transpose(V);
    const Dense UUtZ = matmul(U, matmul(Ut, Z));
    const Dense ZVVt = matmul(matmul(Z, V), Vt);
    Dense out(Z.rows, Z.cols);
    const Dense mid = matmul(matmul(UUtZ, V), Vt);
    for (std::size_t k = 0; k < out.a.size(); ++k)
        out.a[k] = UUtZ.a[k] + ZVVt.a[k] - mid.a[k];
    return out;
}

// Spectral norm of the tangent-restricted sampling deviation
// Z -> P_T((1/p) P_Omega(P_T Z)) - P_T(Z), computed by materializing the full
// (n1 n2) x (n1 n2) matrix in the entry basis and running Jacobi on its
// symmetrization. Only sane for tiny instances; that is the point.
inline double materialized_tangent_norm(
    const Dense& U, const Dense& V,
    const std::vector<std::pair<std::size_t, std::size_t>>& omega, double p) {
    const std::size_t n1 = U.rows, n2 = V.rows, N = n1 * n2;
    Dense Op(N, N);
    for (std::size_t b = 0; b < n2; ++b) {
        for (std::size_t a = 0; a < n1; ++a) {
            Dense E(n1, n2);
            E(a, b) = 1.0;
            const Dense PZ = apply_pt(U, V, E);
            Dense RZ(n1, n2);
            for (const auto& e : omega) RZ(e.first, e.second) = PZ(e.first, e.second) / p;
            const Dense W = apply_pt(U, V, RZ);
            const std::size_t col = a + b * n1;
            for (std::size_t j = 0; j < n2; ++j)
                for (std::size_t i = 0; i < n1; ++i)
                    Op(i + j * n1, col) = W(i, j) - PZ(i, j);
        }
    }
    Dense S(N, N);
    for (std::size_t j = 0; j < N; ++j)
        for (std::size_t i = 0; i < N; ++i) S(i, j) = 0.5 * (Op(i, j) + Op(j, i));
    const std::vector<double> ev = eigenvalues_sym(std::move(S));
    return std::max(std::abs(ev.front()), std::abs(ev.back()));
}

// True when an observed binomial count sits within z standard errors of its
// mean. Draws and prob fix the distribution exactly; no normal-approximation
// subtleties matter at the sample sizes the tests use.
inline bool binomial_within(double hits, double draws, double prob, double z = 3.0) {
    const double mean = draws * prob;
    const double se = std::sqrt(std::max(draws * prob * (1.0 - prob), 1e-300));
    return std::abs(hits - mean) <= z * se;
}

} // namespace oracle
