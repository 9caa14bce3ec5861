#include <catch2/catch_amalgamated.hpp>
#include <lowrank/lowrank.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "support/oracles.hpp"

using namespace lowrank;

namespace {

// Leverage-score recomputation of the standard incoherence, straight from its
// definition: mu0_row = (n1/r) max_i ||Uᵀ e_i||², same on the other side.
double mu0_by_row_scan(const SubspacePair& S) {
    double worst = 0.0;
    for (index_t i = 0; i < S.U.rows(); ++i)
        worst = std::max(worst, S.U.row(i).squaredNorm());
    double mu_row = worst * static_cast<double>(S.U.rows()) / static_cast<double>(S.rank);
    worst = 0.0;
    for (index_t j = 0; j < S.V.rows(); ++j)
        worst = std::max(worst, S.V.row(j).squaredNorm());
    double mu_col = worst * static_cast<double>(S.V.rows()) / static_cast<double>(S.rank);
    return std::max(mu_row, mu_col);
}

} // namespace

TEST_CASE("block-diagonal instances are perfectly incoherent") {
    for (const auto& [n, r] : std::vector<std::pair<index_t, index_t>>{{12, 3}, {20, 4}}) {
        const Matrix M = gen_block_diagonal(n, r);
        // r blocks of ones of size n/r each, PSD, rank r
        CHECK(M.rows() == n);
        CHECK((M - M.transpose()).norm() == 0.0);
        const SvdFactors f = svd(M, r);
        CHECK(f.singular_values[r - 1] > 0.5 * static_cast<double>(n) / static_cast<double>(r));
        const SubspacePair S(f.U, f.V);
        const IncoherenceReport rep = incoherence_report(S);
        CHECK(std::abs(rep.mu0 - 1.0) <= 1e-10);
        CHECK(std::abs(rep.mu1 - static_cast<double>(r)) <= 1e-10);
        CHECK(rep.rank == r);
    }
    CHECK_THROWS_AS(gen_block_diagonal(10, 3), parameter_error); // r must divide n
    CHECK_THROWS_AS(gen_block_diagonal(8, 0), parameter_error);
}

TEST_CASE("incoherence analyzer matches a direct leverage scan") {
    for (int t = 0; t < 8; ++t) {
        const LowRankInstance inst =
            gen_random_low_rank(40 + 7 * t, 30 + 5 * t, 1 + t % 4, derive_seed(0xc001, t));
        const IncoherenceReport rep = incoherence_report(inst.S);
        CHECK(rep.mu0 == Catch::Approx(mu0_by_row_scan(inst.S)).epsilon(1e-12));
        CHECK(rep.mu0 == std::max(rep.mu0_row, rep.mu0_col));
    }
}

TEST_CASE("incoherence parameters satisfy their structural inequalities") {
    for (int t = 0; t < 40; ++t) {
        const index_t n1 = 20 + (t % 5) * 17, n2 = 15 + (t % 7) * 13;
        const index_t r = 1 + t % 6;
        const LowRankInstance inst = gen_random_low_rank(n1, n2, r, derive_seed(0xc002, t));
        const IncoherenceReport rep = incoherence_report(inst.S);
        const double rd = static_cast<double>(r);
        CHECK(rep.mu0 >= 1.0 - 1e-12);
        CHECK(rep.mu0 <= static_cast<double>(std::min(n1, n2)) / rd + 1e-9);
        CHECK(rep.mu1 >= rep.mu0 - 1e-12);
        CHECK(rep.mu1 * rd <= rep.mu0 * rep.mu0 * rd * rd + 1e-12);
    }
}

TEST_CASE("joint incoherence is exactly 1 for the flat rank-1 instance") {
    const index_t n1 = 18, n2 = 12;
    const Matrix U = Matrix::Constant(n1, 1, 1.0 / std::sqrt(static_cast<double>(n1)));
    const Matrix V = Matrix::Constant(n2, 1, 1.0 / std::sqrt(static_cast<double>(n2)));
    const SubspacePair S(U, V);
    CHECK(joint_incoherence(S) == Catch::Approx(1.0).epsilon(1e-12));
    const IncoherenceReport rep = incoherence_report(S);
    CHECK(rep.mu0 == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("random low-rank instances are seeded and well-formed") {
    const LowRankInstance a = gen_random_low_rank(25, 19, 3, 99);
    const LowRankInstance b = gen_random_low_rank(25, 19, 3, 99);
    CHECK((a.M - b.M).norm() == 0.0);
    CHECK((a.S.U - b.S.U).norm() == 0.0);
    const LowRankInstance c = gen_random_low_rank(25, 19, 3, 100);
    CHECK((a.M - c.M).norm() != 0.0);

    REQUIRE(a.sigma.size() == 3);
    for (index_t i = 0; i < 3; ++i) {
        CHECK(a.sigma[i] >= 1.0);
        CHECK(a.sigma[i] <= 2.0);
        if (i > 0) CHECK(a.sigma[i] <= a.sigma[i - 1]);
    }
    // M really is U diag(sigma) Vᵀ with the stored factors
    const Matrix R = a.S.U * a.sigma.asDiagonal() * a.S.V.transpose();
    CHECK((R - a.M).norm() <= 1e-12 * a.M.norm());
    CHECK_THROWS_AS(gen_random_low_rank(5, 8, 6, 1), parameter_error);
}

TEST_CASE("clustering instances expose exact block structure") {
    const std::vector<index_t> sizes = {2, 198};
    const ClusteringInstance inst = gen_clustering(200, sizes, 0, 0xc003);
    CHECK(inst.num_clusters == 2);
    CHECK(inst.n_min == 2);
    // affinity is 1 exactly on same-cluster pairs, 0 otherwise
    for (index_t i = 0; i < 200; i += 13)
        for (index_t j = 0; j < 200; j += 11) {
            const bool same = inst.cluster_assignment[static_cast<std::size_t>(i)] ==
                              inst.cluster_assignment[static_cast<std::size_t>(j)];
            CHECK(inst.affinity(i, j) == (same ? 1.0 : 0.0));
        }
    // indicator side basis: mu0 = n / (r * n_min) = 200 / (2 * 2) = 50
    CHECK(inst.mu0_side == Catch::Approx(50.0).epsilon(1e-12));
    const SubspacePair side(inst.side_basis, inst.side_basis);
    CHECK(standard_incoherence(side).first == Catch::Approx(50.0).epsilon(1e-10));

    // balanced case for comparison
    const ClusteringInstance bal = gen_clustering(60, std::vector<index_t>(6, 10), 0, 0xc004);
    CHECK(bal.mu0_side == Catch::Approx(1.0).epsilon(1e-12));
    CHECK(bal.side_basis.cols() == 6);
}

TEST_CASE("clustering side basis stays orthonormal with ambient noise dims") {
    const ClusteringInstance inst = gen_clustering(48, std::vector<index_t>(4, 12), 3, 0xc005);
    CHECK(inst.side_basis.cols() == 7); // 4 indicators + 3 noise directions
    const Matrix gram = inst.side_basis.transpose() * inst.side_basis;
    CHECK((gram - Matrix::Identity(7, 7)).norm() <= 1e-10);
    // the affinity's column space still lies inside the enlarged basis
    const Matrix P = inst.side_basis * inst.side_basis.transpose();
    CHECK((P * inst.affinity - inst.affinity).norm() <= 1e-9 * inst.affinity.norm());
    CHECK_THROWS_AS(gen_clustering(10, {3, 3}, 0, 1), parameter_error); // sizes must sum to n
}

TEST_CASE("planted clique instances decompose as advertised") {
    const index_t n = 30, n_min = 8;
    const PlantedCliqueInstance inst = gen_planted_clique(n, n_min, 0xc006);
    REQUIRE(static_cast<index_t>(inst.clique.size()) == n_min);
    CHECK(std::is_sorted(inst.clique.begin(), inst.clique.end()));
    CHECK((inst.adjacency - inst.adjacency.transpose()).norm() == 0.0);
    CHECK((inst.reduced - inst.reduced.transpose()).norm() == 0.0);
    // clique pairs are always edges in the pre-subsampling graph
    for (index_t v : inst.clique)
        for (index_t w : inst.clique) CHECK(inst.adjacency(v, w) == 1.0);
    // L_true is the clique indicator block and S_true the advertised residual
    CHECK(inst.L_true.sum() == static_cast<double>(n_min * n_min));
    CHECK((inst.S_true - (inst.reduced - inst.L_true)).norm() == 0.0);
    CHECK(inst.tau == Catch::Approx(1.0 / 3.0).epsilon(1e-15));
    // subsampling only ever zeroes entries
    for (index_t i = 0; i < n; ++i)
        for (index_t j = 0; j < n; ++j) {
            CHECK((inst.reduced(i, j) == 0.0 || inst.reduced(i, j) == inst.adjacency(i, j)));
        }
}

TEST_CASE("planted clique subsampling zeroes pairs at the advertised rate") {
    // over many instances, a fixed edge of the pre-subsampling graph survives
    // with probability 1 - tau = 2/3
    const int draws = 500;
    int edges = 0, zeroed = 0;
    for (int t = 0; t < draws; ++t) {
        const PlantedCliqueInstance inst = gen_planted_clique(16, 5, derive_seed(0xc007, t));
        // use a clique pair: always an edge before subsampling
        const index_t v = inst.clique[0], w = inst.clique[1];
        ++edges;
        zeroed += (inst.reduced(v, w) == 0.0) ? 1 : 0;
        CHECK(inst.reduced(v, w) == inst.reduced(w, v));
    }
    CHECK(oracle::binomial_within(zeroed, edges, 1.0 / 3.0));
}

TEST_CASE("generators are pure functions of their seeds") {
    const PlantedCliqueInstance a = gen_planted_clique(20, 6, 5);
    const PlantedCliqueInstance b = gen_planted_clique(20, 6, 5);
    CHECK((a.reduced - b.reduced).norm() == 0.0);
    CHECK(a.clique == b.clique);
    const ClusteringInstance c = gen_clustering(30, {10, 20}, 2, 5);
    const ClusteringInstance d = gen_clustering(30, {10, 20}, 2, 5);
    CHECK((c.side_basis - d.side_basis).norm() == 0.0);
    CHECK(c.cluster_assignment == d.cluster_assignment);
}
