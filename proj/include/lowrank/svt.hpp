#pragma once

#include <algorithm>
#include <cmath>

#include "lowrank/svd.hpp"

namespace lowrank {

// Scalar soft-threshold on a singular value.
inline double shrink(double sigma, double t) { return std::max(sigma - t, 0.0); }

struct SvtResult {
    Matrix X;
    double nuclear = 0.0;  // nuclear norm of X, i.e. the shrunk spectrum's sum
    index_t rank = 0;
};

// Singular value thresholding: prox of t * nuclear norm.
inline SvtResult sv_threshold(const Matrix& M, double t) {
    if (t < 0.0) throw parameter_error("sv_threshold: threshold must be nonnegative");
    SvdFactors f = svd(M);
    SvtResult out;
    index_t k = 0;
    double nuc = 0.0;
    for (index_t i = 0; i < f.singular_values.size(); ++i) {
        const double s = shrink(f.singular_values(i), t);
        if (s > 0.0) {
            f.singular_values(i) = s;
            nuc += s;
            ++k;
        } else {
            break;  // spectrum is sorted descending
        }
    }
    out.rank = k;
    out.nuclear = nuc;
    if (k == 0)
        out.X = Matrix::Zero(M.rows(), M.cols());
    else
        out.X = f.U.leftCols(k) * f.singular_values.head(k).asDiagonal() *
                f.V.leftCols(k).transpose();
    return out;
}

// Entrywise soft-threshold: prox of t * l1 norm.
inline Matrix soft_threshold(const Matrix& M, double t) {
    if (t < 0.0) throw parameter_error("soft_threshold: threshold must be nonnegative");
    return M.unaryExpr([t](double x) {
        const double m = std::abs(x) - t;
        return m > 0.0 ? (x > 0.0 ? m : -m) : 0.0;
    });
}

} // namespace lowrank
