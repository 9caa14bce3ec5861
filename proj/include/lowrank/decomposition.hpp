#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "lowrank/completion.hpp"

namespace lowrank {

struct DecompositionResult {
    Matrix low_rank;
    Matrix sparse;
    double lambda_used = 0.0;
    int iterations = 0;
    double final_residual = 0.0;  // ||A - L - S||_F / ||A||_F
    bool converged = false;
};

// min ||L||_* + lambda ||S||_1 subject to L + S = A, by inexact augmented
// Lagrangian. Default lambda is 1/sqrt(max dimension). The penalty growth
// reuses the stall gate from the completion solver: unconditional growth
// freezes the iterates short of the optimum.
inline DecompositionResult decompose(const Matrix& A,
                                     std::optional<double> lambda = {},
                                     const SolverOptions& opts = {}) {
    validate(opts);
    require_finite(A, "decompose");
    DecompositionResult res;
    res.lambda_used =
        lambda.value_or(1.0 / std::sqrt(static_cast<double>(std::max(A.rows(), A.cols()))));
    if (!(res.lambda_used > 0.0))
        throw parameter_error("decompose: lambda must be positive");

    const double normA = A.norm();
    if (normA == 0.0) {
        res.low_rank = Matrix::Zero(A.rows(), A.cols());
        res.sparse = Matrix::Zero(A.rows(), A.cols());
        res.converged = true;
        return res;
    }

    const double spec = spectral_norm(A);
    const double linf = A.cwiseAbs().maxCoeff();
    Matrix Y = A / std::max(spec, linf / res.lambda_used);
    double mu = 1.25 / spec;
    Matrix L = Matrix::Zero(A.rows(), A.cols());
    Matrix S = Matrix::Zero(A.rows(), A.cols());
    double resid = 1.0;

    for (int it = 1; it <= opts.max_iters; ++it) {
        res.iterations = it;
        L = sv_threshold(A - S + Y / mu, 1.0 / mu).X;
        Matrix S_new = soft_threshold(A - L + Y / mu, res.lambda_used / mu);
        const double dS = (S_new - S).norm();
        S = std::move(S_new);
        Y += mu * (A - L - S);
        resid = (A - L - S).norm() / normA;
        if (resid <= opts.rel_tol) {
            res.converged = true;
            break;
        }
        if (mu * dS / normA < kPenaltyGate) mu *= opts.penalty_growth;
    }

    res.low_rank = std::move(L);
    res.sparse = std::move(S);
    res.final_residual = resid;
    return res;
}

// Rows of L carrying any entry above the threshold; for a recovered clique
// indicator block these are exactly the clique vertices.
inline std::vector<index_t> clique_nodes(const Matrix& L, double threshold = 0.5) {
    std::vector<index_t> nodes;
    for (index_t i = 0; i < L.rows(); ++i)
        if (L.row(i).cwiseAbs().maxCoeff() > threshold) nodes.push_back(i);
    return nodes;
}

} // namespace lowrank
