#pragma once

#include <cmath>

#include "lowrank/completion.hpp"
#include "lowrank/subspace.hpp"

namespace lowrank {

// min ||X||_* subject to P_Omega(U_bar X V_bar^T) = P_Omega(M), where U_bar
// and V_bar are known orthonormal side bases. The unknown X lives in the
// small r_bar x s_bar coordinate space; at full observation the solution is
// U_bar^T M V_bar.
//
// Solved by proximal gradient with quadratic-penalty continuation: for a
// penalty rho, iterate X <- SVT_{1/rho}(X - U_bar^T P_Omega(U_bar X V_bar^T
// - M) V_bar), then double rho. Step length 1/rho is safe because the
// gradient map is 1-Lipschitz: U_bar, V_bar are partial isometries and P_Omega
// is a contraction. For this solver max_iters caps the number of
// continuation rounds; iterations reports total inner steps.
inline SolverResult complete_structured(const Matrix& M_obs, const ObservationMask& mask,
                                        const Matrix& U_bar, const Matrix& V_bar,
                                        const SolverOptions& opts = {}) {
    validate(opts);
    SubspacePair::require_orthonormal(U_bar, "complete_structured: U_bar");
    SubspacePair::require_orthonormal(V_bar, "complete_structured: V_bar");
    if (M_obs.rows() != mask.rows() || M_obs.cols() != mask.cols())
        throw dimension_error("complete_structured: matrix and mask shapes differ");
    if (U_bar.rows() != M_obs.rows() || V_bar.rows() != M_obs.cols())
        throw dimension_error("complete_structured: side bases do not match the matrix");
    if (mask.empty())
        throw parameter_error("complete_structured: mask has no observed entries");
    require_finite(M_obs, "complete_structured");

    const Matrix D = masked(M_obs, mask, false);
    const double normD = D.norm();
    SolverResult res;
    if (normD == 0.0) {
        res.estimate = Matrix::Zero(U_bar.cols(), V_bar.cols());
        res.converged = true;
        res.objective_trace.push_back(0.0);
        return res;
    }

    // A full mask forces U_bar X V_bar^T = M entrywise, and since the side
    // bases are partial isometries that pins X = U_bar^T M V_bar uniquely.
    // If M leaves the side span the constraint is infeasible; the residual
    // then reports the gap and converged stays false.
    if (mask.count() == static_cast<std::size_t>(M_obs.rows()) *
                            static_cast<std::size_t>(M_obs.cols())) {
        res.estimate = U_bar.transpose() * M_obs * V_bar;
        res.final_residual =
            (U_bar * res.estimate * V_bar.transpose() - M_obs).norm() / normD;
        res.converged = res.final_residual <= opts.rel_tol;
        res.objective_trace.push_back(norm(res.estimate, Norm::nuclear));
        return res;
    }

    constexpr int kInnerCap = 200;
    Matrix X = Matrix::Zero(U_bar.cols(), V_bar.cols());
    double rho = 1.0;
    double resid = 1.0;

    for (int round = 1; round <= opts.max_iters && !res.converged; ++round) {
        for (int inner = 0; inner < kInnerCap; ++inner) {
            Matrix full = U_bar * X * V_bar.transpose();
            double on_mask_sq = 0.0;
            Matrix R = Matrix::Zero(full.rows(), full.cols());
            for (const auto& [i, j] : mask.entries()) {
                const double d = full(i, j) - M_obs(i, j);
                R(i, j) = d;
                on_mask_sq += d * d;
            }
            resid = std::sqrt(on_mask_sq) / normD;
            if (resid <= opts.rel_tol) {
                res.converged = true;
                break;
            }
            SvtResult sv =
                sv_threshold(X - U_bar.transpose() * R * V_bar, 1.0 / rho);
            const double dX = (sv.X - X).norm();
            X = std::move(sv.X);
            res.objective_trace.push_back(sv.nuclear);
            ++res.iterations;
            if (dX <= opts.inner_tol * std::max(1.0, X.norm())) break;
        }
        rho *= 2.0;
    }

    res.estimate = std::move(X);
    res.final_residual = resid;
    return res;
}

} // namespace lowrank
