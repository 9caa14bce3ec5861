#pragma once

#include <cmath>

#include "lowrank/sampling.hpp"
#include "lowrank/svd.hpp"

namespace lowrank {

// Rank-r spectral estimate from Bernoulli(p) observations: trim overexposed
// rows/columns, take the top-r SVD of the trimmed observation, rescale by
// 1/p. No iterative recovery; this is the one-shot projection estimator.
inline Matrix svd_project(const Matrix& M_obs, const ObservationMask& mask, double p,
                          index_t r) {
    if (r < 0 || r > std::min(mask.rows(), mask.cols()))
        throw parameter_error("svd_project: rank out of range");
    Matrix trimmed = trim(masked(M_obs, mask, false), mask, p);
    if (r == 0) return Matrix::Zero(M_obs.rows(), M_obs.cols());
    SvdFactors f = svd(trimmed, r);
    const index_t k = f.singular_values.size();
    return (f.U.leftCols(k) * f.singular_values.head(k).asDiagonal() *
            f.V.leftCols(k).transpose()) /
           p;
}

struct SvdBounds {
    double old_bound = 0.0;
    double new_bound = 0.0;
};

// Error bounds for the projection estimator on a square matrix.
//   old: c_old * sqrt(r n / p) * ||M||_inf
//   new: c_new * (sqrt(r) (ln n / p) ||M||_inf + sqrt(r ln n / p) ||M||_inf,2)
// The new bound wins exactly when the row/column norms are spread out, i.e.
// ||M||_inf,2 well below sqrt(n) ||M||_inf.
inline SvdBounds evaluate_svd_bounds(const Matrix& M, double p, index_t r,
                                     double c_old, double c_new) {
    if (M.rows() != M.cols())
        throw parameter_error("evaluate_svd_bounds: only square matrices are supported");
    if (!(p > 0.0 && p <= 1.0))
        throw parameter_error("evaluate_svd_bounds: p must lie in (0, 1]");
    if (r <= 0 || r > M.rows())
        throw parameter_error("evaluate_svd_bounds: rank out of range");
    const double n = static_cast<double>(M.rows());
    const double rr = static_cast<double>(r);
    const double linf = norm(M, Norm::linf);
    const double linf2 = norm(M, Norm::linf2);
    SvdBounds b;
    b.old_bound = c_old * std::sqrt(rr * n / p) * linf;
    b.new_bound = c_new * (std::sqrt(rr) * (std::log(n) / p) * linf +
                           std::sqrt(rr * std::log(n) / p) * linf2);
    return b;
}

} // namespace lowrank
