#pragma once

#include <cmath>
#include <vector>

#include "lowrank/mask.hpp"
#include "lowrank/rng.hpp"

namespace lowrank {

// Bernoulli(p) mask over an rows x cols grid. In symmetric mode one coin is
// flipped per unordered pair {i, j} (diagonal included), walking the upper
// triangle row-major, and both oriented entries are emitted. That keeps
// symmetric instances symmetric under P_Ω, which the symmetric-matrix fast
// paths downstream rely on.
inline ObservationMask sample_bernoulli(index_t rows, index_t cols, double p,
                                        bool symmetric, RngSeed seed) {
    if (rows <= 0 || cols <= 0)
        throw parameter_error("sample_bernoulli: shape must be positive");
    if (!(p > 0.0 && p <= 1.0))
        throw parameter_error("sample_bernoulli: p must lie in (0, 1]");
    if (symmetric && rows != cols)
        throw parameter_error("sample_bernoulli: symmetric sampling needs a square grid");
    Rng rng(seed);
    std::vector<ObservationMask::Entry> entries;
    if (symmetric) {
        for (index_t i = 0; i < rows; ++i)
            for (index_t j = i; j < cols; ++j)
                if (rng.bernoulli(p)) {
                    entries.push_back({i, j});
                    if (j != i) entries.push_back({j, i});
                }
    } else {
        for (index_t i = 0; i < rows; ++i)
            for (index_t j = 0; j < cols; ++j)
                if (rng.bernoulli(p)) entries.push_back({i, j});
    }
    return ObservationMask(rows, cols, p, symmetric, std::move(entries));
}

// Batches of an overall Bernoulli(p) mask split for the golfing construction:
// k0 independent Bernoulli(q) masks with q = 1 - (1-p)^(1/k0), so their union
// is distributed exactly like one Bernoulli(p) draw.
struct GolfingPartition {
    std::vector<ObservationMask> batches;
    double p = 0.0;  // overall rate the union realizes
    double q = 0.0;  // per-batch rate
    int k0 = 0;

    ObservationMask union_mask() const {
        std::vector<ObservationMask::Entry> all;
        for (const auto& b : batches)
            all.insert(all.end(), b.entries().begin(), b.entries().end());
        std::sort(all.begin(), all.end());
        all.erase(std::unique(all.begin(), all.end()), all.end());
        const bool sym = !batches.empty() && batches.front().symmetric();
        return ObservationMask(batches.front().rows(), batches.front().cols(), p, sym,
                               std::move(all));
    }
};

inline GolfingPartition golfing_partition(index_t rows, index_t cols, double p, int k0,
                                          RngSeed seed, bool symmetric = false) {
    if (!(p > 0.0 && p <= 1.0))
        throw parameter_error("golfing_partition: p must lie in (0, 1]");
    if (k0 < 1)
        throw parameter_error("golfing_partition: k0 must be at least 1");
    GolfingPartition part;
    part.p = p;
    part.k0 = k0;
    // k0 == 1 and p == 1 are kept exact rather than run through pow().
    part.q = (k0 == 1) ? p : (p == 1.0 ? 1.0 : 1.0 - std::pow(1.0 - p, 1.0 / k0));
    part.batches.reserve(static_cast<std::size_t>(k0));
    for (int k = 0; k < k0; ++k)
        part.batches.push_back(sample_bernoulli(rows, cols, part.q, symmetric,
                                                derive_seed(seed, 0x601f, k)));
    return part;
}

// Zeroes out rows and columns whose observed degree exceeds 2*p*n, the
// overexposed lines that dominate the spectral error of the rescaled
// observation. Degrees are counted from the mask, and the cut is strict.
inline Matrix trim(const Matrix& M_obs, const ObservationMask& mask, double p) {
    if (mask.rows() != mask.cols())
        throw parameter_error("trim: only square observation grids are supported");
    if (M_obs.rows() != mask.rows() || M_obs.cols() != mask.cols())
        throw dimension_error("trim: matrix and mask shapes differ");
    if (!(p > 0.0 && p <= 1.0))
        throw parameter_error("trim: p must lie in (0, 1]");
    const index_t n = mask.rows();
    std::vector<index_t> row_deg(static_cast<std::size_t>(n), 0);
    std::vector<index_t> col_deg(static_cast<std::size_t>(n), 0);
    for (const auto& [i, j] : mask.entries()) {
        ++row_deg[static_cast<std::size_t>(i)];
        ++col_deg[static_cast<std::size_t>(j)];
    }
    const double cutoff = 2.0 * p * static_cast<double>(n);
    Matrix out = M_obs;
    for (index_t i = 0; i < n; ++i)
        if (static_cast<double>(row_deg[static_cast<std::size_t>(i)]) > cutoff)
            out.row(i).setZero();
    for (index_t j = 0; j < n; ++j)
        if (static_cast<double>(col_deg[static_cast<std::size_t>(j)]) > cutoff)
            out.col(j).setZero();
    return out;
}

} // namespace lowrank
