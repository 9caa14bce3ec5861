#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/QR>

#include "lowrank/incoherence.hpp"
#include "lowrank/rng.hpp"
#include "lowrank/subspace.hpp"

namespace lowrank {

// Rank-r 0/1 block-diagonal matrix: r contiguous blocks of ones, each
// (n/r) x (n/r). Maximally coherent within blocks yet mu0 = 1 since every
// row carries the same singular-vector mass.
inline Matrix gen_block_diagonal(index_t n, index_t r) {
    if (n <= 0 || r <= 0 || n % r != 0)
        throw parameter_error("gen_block_diagonal: rank must divide n");
    const index_t b = n / r;
    Matrix M = Matrix::Zero(n, n);
    for (index_t k = 0; k < r; ++k)
        M.block(k * b, k * b, b, b).setOnes();
    return M;
}

struct LowRankInstance {
    Matrix M;
    SubspacePair S;
    Vector sigma;
};

namespace detail {

// Thin Q of a Gaussian draw, columns sign-fixed so the generator is a pure
// function of the seed across BLAS variants.
inline Matrix random_orthonormal(index_t n, index_t r, Rng& rng) {
    Matrix G = gaussian_matrix(n, r, rng);
    Eigen::HouseholderQR<Matrix> qr(G);
    Matrix Q = qr.householderQ() * Matrix::Identity(n, r);
    for (index_t j = 0; j < r; ++j) {
        index_t imax = 0;
        Q.col(j).cwiseAbs().maxCoeff(&imax);
        if (Q(imax, j) < 0.0) Q.col(j) = -Q.col(j);
    }
    return Q;
}

} // namespace detail

// Random rank-r instance with Haar-ish factors and spectrum uniform in
// [1, 2], sorted descending. Draw order (U factor, V factor, spectrum) is a
// determinism contract: tests replay it.
inline LowRankInstance gen_random_low_rank(index_t n1, index_t n2, index_t r,
                                           RngSeed seed) {
    if (n1 <= 0 || n2 <= 0 || r <= 0 || r > std::min(n1, n2))
        throw parameter_error("gen_random_low_rank: need 0 < r <= min(n1, n2)");
    Rng rng(seed);
    Matrix U = detail::random_orthonormal(n1, r, rng);
    Matrix V = detail::random_orthonormal(n2, r, rng);
    Vector sigma(r);
    for (index_t i = 0; i < r; ++i) sigma(i) = 1.0 + rng.uniform();
    std::sort(sigma.data(), sigma.data() + r, std::greater<double>());
    LowRankInstance inst{U * sigma.asDiagonal() * V.transpose(),
                         SubspacePair(U, V), sigma};
    return inst;
}

// Cluster affinity instance: n points in clusters, affinity(i, j) = 1 iff i
// and j share a cluster (diagonal included). The true column space is
// spanned by normalized cluster indicators; side_basis widens it with
// ambient_noise_dims extra orthonormal directions so recovery code can be
// exercised with an inexact-but-containing side subspace.
struct ClusteringInstance {
    Matrix affinity;
    std::vector<index_t> cluster_assignment;
    index_t n_min = 0;
    Matrix side_basis;
    double mu0_side = 0.0;
    index_t num_clusters = 0;
};

inline ClusteringInstance gen_clustering(index_t n,
                                         const std::vector<index_t>& cluster_sizes,
                                         index_t ambient_noise_dims, RngSeed seed) {
    if (n <= 0 || cluster_sizes.empty())
        throw parameter_error("gen_clustering: need a positive n and clusters");
    index_t total = 0;
    for (index_t s : cluster_sizes) {
        if (s <= 0) throw parameter_error("gen_clustering: cluster sizes must be positive");
        total += s;
    }
    if (total != n)
        throw parameter_error("gen_clustering: cluster sizes must sum to n");
    const index_t K = static_cast<index_t>(cluster_sizes.size());
    if (ambient_noise_dims < 0 || K + ambient_noise_dims > n)
        throw parameter_error("gen_clustering: side basis would exceed dimension n");

    Rng rng(seed);
    std::vector<index_t> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), index_t{0});
    for (index_t i = n - 1; i > 0; --i) {
        const index_t j = static_cast<index_t>(rng.next() % static_cast<std::uint64_t>(i + 1));
        std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
    }

    ClusteringInstance inst;
    inst.num_clusters = K;
    inst.cluster_assignment.assign(static_cast<std::size_t>(n), 0);
    inst.n_min = *std::min_element(cluster_sizes.begin(), cluster_sizes.end());
    index_t pos = 0;
    for (index_t k = 0; k < K; ++k)
        for (index_t c = 0; c < cluster_sizes[static_cast<std::size_t>(k)]; ++c)
            inst.cluster_assignment[static_cast<std::size_t>(perm[static_cast<std::size_t>(pos++)])] = k;

    inst.affinity = Matrix::Zero(n, n);
    for (index_t i = 0; i < n; ++i)
        for (index_t j = 0; j < n; ++j)
            if (inst.cluster_assignment[static_cast<std::size_t>(i)] ==
                inst.cluster_assignment[static_cast<std::size_t>(j)])
                inst.affinity(i, j) = 1.0;

    Matrix U = Matrix::Zero(n, K);
    for (index_t i = 0; i < n; ++i) {
        const index_t k = inst.cluster_assignment[static_cast<std::size_t>(i)];
        U(i, k) = 1.0 / std::sqrt(static_cast<double>(
                            cluster_sizes[static_cast<std::size_t>(k)]));
    }
    if (ambient_noise_dims == 0) {
        inst.side_basis = U;
    } else {
        Matrix G = gaussian_matrix(n, ambient_noise_dims, rng);
        G -= U * (U.transpose() * G);
        Eigen::HouseholderQR<Matrix> qr(G);
        Matrix Qd = qr.householderQ() * Matrix::Identity(n, ambient_noise_dims);
        Qd -= U * (U.transpose() * Qd);  // re-orthogonalize against U once more
        for (index_t j = 0; j < ambient_noise_dims; ++j) Qd.col(j).normalize();
        inst.side_basis.resize(n, K + ambient_noise_dims);
        inst.side_basis << U, Qd;
    }
    inst.mu0_side =
        standard_incoherence(SubspacePair(inst.side_basis, inst.side_basis)).first;
    return inst;
}

// Planted clique: a clique of size n_min is forced into a Bernoulli(1/2)
// graph, then the adjacency is thinned by zeroing each unordered pair with
// probability 1/3. Under that thinning both clique and background entries
// survive as nonzero with probability exactly 1/3 off the support overlap,
// which is what the sparse term of the decomposition has to absorb.
struct PlantedCliqueInstance {
    Matrix adjacency;
    Matrix reduced;
    Matrix L_true;
    Matrix S_true;
    std::vector<index_t> clique;
    double tau = 1.0 / 3.0;
};

inline PlantedCliqueInstance gen_planted_clique(index_t n, index_t n_min, RngSeed seed) {
    if (n <= 0 || n_min <= 0 || n_min > n)
        throw parameter_error("gen_planted_clique: need 0 < n_min <= n");
    Rng rng(seed);
    std::vector<index_t> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), index_t{0});
    for (index_t i = n - 1; i > 0; --i) {
        const index_t j = static_cast<index_t>(rng.next() % static_cast<std::uint64_t>(i + 1));
        std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
    }
    PlantedCliqueInstance inst;
    inst.clique.assign(perm.begin(), perm.begin() + n_min);
    std::sort(inst.clique.begin(), inst.clique.end());
    std::vector<bool> in_clique(static_cast<std::size_t>(n), false);
    for (index_t v : inst.clique) in_clique[static_cast<std::size_t>(v)] = true;

    inst.adjacency = Matrix::Zero(n, n);
    for (index_t i = 0; i < n; ++i)
        for (index_t j = i + 1; j < n; ++j) {
            const double a =
                (in_clique[static_cast<std::size_t>(i)] && in_clique[static_cast<std::size_t>(j)])
                    ? 1.0
                    : (rng.bernoulli(0.5) ? 1.0 : 0.0);
            inst.adjacency(i, j) = a;
            inst.adjacency(j, i) = a;
        }
    for (index_t i = 0; i < n; ++i)
        inst.adjacency(i, i) = in_clique[static_cast<std::size_t>(i)] ? 1.0 : 0.0;

    inst.reduced = inst.adjacency;
    for (index_t i = 0; i < n; ++i)
        for (index_t j = i; j < n; ++j)
            if (rng.bernoulli(inst.tau)) {
                inst.reduced(i, j) = 0.0;
                inst.reduced(j, i) = 0.0;
            }

    inst.L_true = Matrix::Zero(n, n);
    for (index_t v : inst.clique)
        for (index_t w : inst.clique) inst.L_true(v, w) = 1.0;
    inst.S_true = inst.reduced - inst.L_true;
    return inst;
}

} // namespace lowrank
