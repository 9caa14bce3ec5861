#pragma once

#include <cmath>
#include <string>

#include "lowrank/matrix.hpp"
#include "lowrank/rng.hpp"

namespace lowrank {

struct OperatorNormOptions {
    int max_iters = 300;
    double rel_tol = 1e-6;   // Rayleigh-quotient settling threshold
    double accuracy = 1e-4;  // guaranteed relative accuracy of the estimate
    int starts = 3;
};

// Operator norm of a self-adjoint matrix operator given only its apply.
// Power iteration runs on apply∘apply (so indefinite spectra still converge
// to the largest magnitude), restarted `starts` times from independent
// Gaussian matrices; the best estimate across starts is returned.
//
// Convergence is decided on the Rayleigh sequence est_k, which is
// nondecreasing for the squared operator: either the per-step change stays
// within rel_tol three times in a row, or the changes decay geometrically
// and the projected tail sum d_k * rho/(1-rho) drops below accuracy/4, in
// which case the extrapolated limit is returned. Near-degenerate top
// eigenvalues make the plain criterion creep for hundreds of iterations
// while the value error is already tiny; the tail projection recognizes
// that situation instead of misreporting it as stagnation. Hitting the cap
// with a non-geometric tail raises numerical_error with the recent trace.
template <class Apply>
double operator_norm(index_t rows, index_t cols, Apply&& apply, RngSeed seed,
                     const OperatorNormOptions& opts = {}) {
    if (opts.max_iters <= 0 || opts.starts <= 0 || !(opts.rel_tol > 0.0) ||
        !(opts.accuracy > 0.0))
        throw parameter_error("operator_norm: options must be positive");
    double best = 0.0;
    for (int s = 0; s < opts.starts; ++s) {
        Rng rng(derive_seed(seed, 0x09e7, s));
        Matrix Z = gaussian_matrix(rows, cols, rng);
        Z /= Z.norm();
        double lam = -1.0;
        double prev_d = -1.0;
        int settled = 0, tail_hits = 0, tiny_run = 0;
        bool converged = false;
        double recent[3] = {0.0, 0.0, 0.0};
        // Rayleigh values this small on a unit probe mean the operator is
        // zero up to roundoff; the jittering residual would otherwise never
        // satisfy the relative settling test.
        constexpr double kZeroFloor = 1e-9;
        for (int it = 0; it < opts.max_iters; ++it) {
            Matrix W = apply(apply(Z));
            // Z is unit norm, so <Z, A(A(Z))> = ||A(Z)||^2.
            const double ray = (Z.array() * W.array()).sum();
            const double est = std::sqrt(std::max(ray, 0.0));
            recent[it % 3] = est;
            const double wn = W.norm();
            if (wn <= 1e-300) {
                lam = 0.0;  // exactly zero image
                converged = true;
                break;
            }
            if (est <= kZeroFloor) {
                if (++tiny_run >= 3) {
                    lam = est;
                    converged = true;
                    break;
                }
            } else {
                tiny_run = 0;
            }
            const double scale = std::max(est, 1e-12);
            const double d = lam < 0.0 ? est : est - lam;
            if (lam >= 0.0 && std::abs(d) <= opts.rel_tol * scale) {
                if (++settled >= 3) {
                    lam = est;
                    converged = true;
                    break;
                }
            } else {
                settled = 0;
            }
            if (lam >= 0.0 && prev_d > 0.0 && d > 0.0 && d < prev_d) {
                const double rho = std::min(d / prev_d, 0.9999);
                const double tail = d * rho / (1.0 - rho);
                if (tail <= 0.25 * opts.accuracy * scale) {
                    if (++tail_hits >= 2) {
                        lam = est + tail;
                        converged = true;
                        break;
                    }
                } else {
                    tail_hits = 0;
                }
            } else {
                tail_hits = 0;
            }
            if (lam >= 0.0) prev_d = d;
            lam = est;
            Z = W / wn;
        }
        if (!converged)
            throw numerical_error(
                "operator_norm: power iteration stagnated after " +
                std::to_string(opts.max_iters) + " iterations (recent estimates " +
                std::to_string(recent[0]) + ", " + std::to_string(recent[1]) + ", " +
                std::to_string(recent[2]) + ")");
        best = std::max(best, lam);
    }
    return best;
}

} // namespace lowrank
