#pragma once

#include <cmath>
#include <vector>

#include "lowrank/mask.hpp"
#include "lowrank/svt.hpp"

namespace lowrank {

struct SolverOptions {
    int max_iters = 500;
    double rel_tol = 1e-7;
    // <= 0 means auto: the augmented-Lagrangian penalty starts at
    // 1 / ||P_Omega(M)||_2.
    double penalty_init = 0.0;
    double penalty_growth = 1.5;
    double inner_tol = 1e-9;
};

inline void validate(const SolverOptions& opts) {
    if (opts.max_iters <= 0)
        throw parameter_error("SolverOptions: max_iters must be positive");
    if (!(opts.rel_tol > 0.0))
        throw parameter_error("SolverOptions: rel_tol must be positive");
    if (!(opts.penalty_growth > 1.0))
        throw parameter_error("SolverOptions: penalty_growth must exceed 1");
    if (!(opts.inner_tol > 0.0))
        throw parameter_error("SolverOptions: inner_tol must be positive");
}

struct SolverResult {
    Matrix estimate;
    int iterations = 0;
    // ||P_Omega(estimate - M)||_F / ||P_Omega(M)||_F
    double final_residual = 0.0;
    bool converged = false;
    std::vector<double> objective_trace;  // nuclear norm of the iterate
};

// The penalty grows only while the slack iterate has stalled. Growing it
// unconditionally keeps sum(1/mu_k) finite, and the SVT steps then stop
// short of the nuclear-norm minimizer: the iterate goes feasible on Omega
// while its nuclear norm stays measurably above the optimum. Gating growth
// on the relative slack movement removes that failure without slowing the
// feasibility phase.
inline constexpr double kPenaltyGate = 1e-6;

// min ||X||_* subject to X_ij = M_ij on Omega, by inexact augmented
// Lagrangian splitting: X low-rank iterate, E the off-support slack
// (E is zero on Omega by construction), Y the multiplier.
inline SolverResult complete_nuclear(const Matrix& M_obs, const ObservationMask& mask,
                                     const SolverOptions& opts = {}) {
    validate(opts);
    if (M_obs.rows() != mask.rows() || M_obs.cols() != mask.cols())
        throw dimension_error("complete_nuclear: matrix and mask shapes differ");
    if (mask.empty())
        throw parameter_error("complete_nuclear: mask has no observed entries");
    require_finite(M_obs, "complete_nuclear");

    // A full mask pins every entry, so the only feasible point (hence the
    // minimizer) is the observation itself.
    if (mask.count() == static_cast<std::size_t>(M_obs.rows()) *
                            static_cast<std::size_t>(M_obs.cols())) {
        SolverResult res;
        res.estimate = M_obs;
        res.converged = true;
        res.objective_trace.push_back(nuclear_norm(M_obs));
        return res;
    }

    const Matrix D = masked(M_obs, mask, false);
    const double normD = D.norm();
    SolverResult res;
    if (normD == 0.0) {
        res.estimate = Matrix::Zero(M_obs.rows(), M_obs.cols());
        res.converged = true;
        res.objective_trace.push_back(0.0);
        return res;
    }

    double mu = opts.penalty_init > 0.0 ? opts.penalty_init : 1.0 / spectral_norm(D);
    Matrix E = Matrix::Zero(D.rows(), D.cols());
    Matrix Y = Matrix::Zero(D.rows(), D.cols());
    Matrix X;
    double resid = 1.0;

    for (int it = 1; it <= opts.max_iters; ++it) {
        res.iterations = it;
        SvtResult sv = sv_threshold(D - E + Y / mu, 1.0 / mu);
        X = std::move(sv.X);
        res.objective_trace.push_back(sv.nuclear);

        Matrix E_new = D - X + Y / mu;
        for (const auto& [i, j] : mask.entries()) E_new(i, j) = 0.0;
        const double dE = (E_new - E).norm();
        E = std::move(E_new);

        Y += mu * (D - X - E);  // supported on Omega: off-support D - X - E is 0

        double on_mask_sq = 0.0;
        for (const auto& [i, j] : mask.entries()) {
            const double d = X(i, j) - M_obs(i, j);
            on_mask_sq += d * d;
        }
        resid = std::sqrt(on_mask_sq) / normD;
        if (resid <= opts.rel_tol) {
            res.converged = true;
            break;
        }
        if (mu * dE / normD < kPenaltyGate) mu *= opts.penalty_growth;
    }

    res.estimate = std::move(X);
    res.final_residual = resid;
    return res;
}

} // namespace lowrank
