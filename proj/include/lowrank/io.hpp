#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "lowrank/errors.hpp"
#include "lowrank/generators.hpp"
#include "lowrank/sampling.hpp"

namespace lowrank {

// Shortest round-trip decimal form of a double.
inline std::string format_g17(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace detail {

inline std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path);
    if (!out) throw io_error("cannot open " + path.string() + " for writing");
    return out;
}

inline std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open " + path.string() + " for reading");
    return in;
}

} // namespace detail

// Matrix text format: "rows cols" header, then one whitespace-separated row
// per line.
inline void write_matrix(const std::filesystem::path& path, const Matrix& M) {
    auto out = detail::open_out(path);
    out << M.rows() << ' ' << M.cols() << '\n';
    for (index_t i = 0; i < M.rows(); ++i) {
        for (index_t j = 0; j < M.cols(); ++j) {
            if (j) out << ' ';
            out << format_g17(M(i, j));
        }
        out << '\n';
    }
    if (!out) throw io_error("write failed on " + path.string());
}

inline Matrix read_matrix(const std::filesystem::path& path) {
    auto in = detail::open_in(path);
    index_t rows = 0, cols = 0;
    if (!(in >> rows >> cols) || rows < 0 || cols < 0)
        throw io_error("malformed matrix header in " + path.string());
    Matrix M(rows, cols);
    for (index_t i = 0; i < rows; ++i)
        for (index_t j = 0; j < cols; ++j)
            if (!(in >> M(i, j)))
                throw io_error("truncated matrix data in " + path.string());
    return M;
}

// Mask text format: "rows cols p" header, then one "i j" pair per line. The
// symmetric flag is not stored; it is re-derived on load by checking pair
// closure on a square mask, which is the property the flag semantically
// encodes.
inline void write_mask(const std::filesystem::path& path, const ObservationMask& mask) {
    auto out = detail::open_out(path);
    out << mask.rows() << ' ' << mask.cols() << ' ' << format_g17(mask.p()) << '\n';
    for (const auto& [i, j] : mask.entries()) out << i << ' ' << j << '\n';
    if (!out) throw io_error("write failed on " + path.string());
}

inline ObservationMask read_mask(const std::filesystem::path& path) {
    auto in = detail::open_in(path);
    index_t rows = 0, cols = 0;
    double p = 0.0;
    if (!(in >> rows >> cols >> p))
        throw io_error("malformed mask header in " + path.string());
    std::vector<ObservationMask::Entry> entries;
    index_t i = 0, j = 0;
    while (in >> i >> j) entries.push_back({i, j});
    if (!in.eof()) throw io_error("malformed mask entry in " + path.string());
    bool symmetric = rows == cols && !entries.empty();
    if (symmetric) {
        auto sorted = entries;
        std::sort(sorted.begin(), sorted.end());
        for (const auto& [a, b] : sorted)
            if (!std::binary_search(sorted.begin(), sorted.end(),
                                    ObservationMask::Entry{b, a})) {
                symmetric = false;
                break;
            }
    }
    return ObservationMask(rows, cols, p, symmetric, std::move(entries));
}

// Partition directory: manifest.txt holds "k0 q p", batches are
// batch_000.txt, batch_001.txt, ...
inline void write_partition(const std::filesystem::path& dir,
                            const GolfingPartition& part) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    {
        auto out = detail::open_out(dir / "manifest.txt");
        out << part.k0 << ' ' << format_g17(part.q) << ' ' << format_g17(part.p) << '\n';
        if (!out) throw io_error("write failed on " + (dir / "manifest.txt").string());
    }
    for (std::size_t k = 0; k < part.batches.size(); ++k) {
        char name[32];
        std::snprintf(name, sizeof name, "batch_%03zu.txt", k);
        write_mask(dir / name, part.batches[k]);
    }
}

inline GolfingPartition read_partition(const std::filesystem::path& dir) {
    GolfingPartition part;
    {
        auto in = detail::open_in(dir / "manifest.txt");
        if (!(in >> part.k0 >> part.q >> part.p) || part.k0 < 1)
            throw io_error("malformed partition manifest in " + dir.string());
    }
    for (int k = 0; k < part.k0; ++k) {
        char name[32];
        std::snprintf(name, sizeof name, "batch_%03d.txt", k);
        part.batches.push_back(read_mask(dir / name));
    }
    return part;
}

// Instance bundles: a manifest describing how the instance was generated
// plus the concrete matrices, so downstream stages can re-load without the
// generator. manifest.txt first line is "kind n r seed".
inline void write_block_diagonal_bundle(const std::filesystem::path& dir, index_t n,
                                        index_t r, const Matrix& M) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    auto out = detail::open_out(dir / "manifest.txt");
    out << "block_diagonal " << n << ' ' << r << " 0\n";
    if (!out) throw io_error("write failed on " + (dir / "manifest.txt").string());
    write_matrix(dir / "M.txt", M);
}

inline void write_low_rank_bundle(const std::filesystem::path& dir, index_t n1,
                                  index_t n2, index_t r, RngSeed seed,
                                  const LowRankInstance& inst) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    {
        auto out = detail::open_out(dir / "manifest.txt");
        out << "low_rank " << n1 << ' ' << r << ' ' << seed << '\n';
        out << n2 << '\n';
        if (!out) throw io_error("write failed on " + (dir / "manifest.txt").string());
    }
    write_matrix(dir / "M.txt", inst.M);
    write_matrix(dir / "U.txt", inst.S.U);
    write_matrix(dir / "V.txt", inst.S.V);
    write_matrix(dir / "sigma.txt", inst.sigma);
}

inline void write_clustering_bundle(const std::filesystem::path& dir, index_t n,
                                    RngSeed seed, const ClusteringInstance& inst) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    {
        auto out = detail::open_out(dir / "manifest.txt");
        out << "clustering " << n << ' ' << inst.num_clusters << ' ' << seed << '\n';
        out << inst.n_min << ' ' << format_g17(inst.mu0_side) << '\n';
        for (std::size_t i = 0; i < inst.cluster_assignment.size(); ++i) {
            if (i) out << ' ';
            out << inst.cluster_assignment[i];
        }
        out << '\n';
        if (!out) throw io_error("write failed on " + (dir / "manifest.txt").string());
    }
    write_matrix(dir / "affinity.txt", inst.affinity);
    write_matrix(dir / "side_basis.txt", inst.side_basis);
}

inline void write_clique_bundle(const std::filesystem::path& dir, index_t n,
                                index_t n_min, RngSeed seed,
                                const PlantedCliqueInstance& inst) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    {
        auto out = detail::open_out(dir / "manifest.txt");
        out << "clique " << n << ' ' << n_min << ' ' << seed << '\n';
        for (std::size_t i = 0; i < inst.clique.size(); ++i) {
            if (i) out << ' ';
            out << inst.clique[i];
        }
        out << '\n';
        if (!out) throw io_error("write failed on " + (dir / "manifest.txt").string());
    }
    write_matrix(dir / "adjacency.txt", inst.adjacency);
    write_matrix(dir / "reduced.txt", inst.reduced);
    write_matrix(dir / "L_true.txt", inst.L_true);
    write_matrix(dir / "S_true.txt", inst.S_true);
}

// Solver sidecar: one line, "<iterations> <residual> <converged 0/1>
// <lambda>"; lambda is 0 when the solver has no sparsity weight.
inline void write_solver_sidecar(const std::filesystem::path& path, int iterations,
                                 double residual, bool converged, double lambda) {
    auto out = detail::open_out(path);
    out << iterations << ' ' << format_g17(residual) << ' ' << (converged ? 1 : 0) << ' '
        << format_g17(lambda) << '\n';
    if (!out) throw io_error("write failed on " + path.string());
}

} // namespace lowrank
