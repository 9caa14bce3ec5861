#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lowrank/matrix.hpp"

namespace lowrank {

// Set of observed (i, j) index pairs together with the Bernoulli rate p it
// was drawn with. Entries are kept sorted row-major; a dense bit array is
// added once density exceeds 5% so contains() is O(1) on the masks the
// solvers actually see.
class ObservationMask {
public:
    using Entry = std::pair<index_t, index_t>;

    ObservationMask(index_t rows, index_t cols, double p, bool symmetric,
                    std::vector<Entry> entries)
        : rows_(rows), cols_(cols), p_(p), symmetric_(symmetric),
          entries_(std::move(entries)) {
        if (rows_ <= 0 || cols_ <= 0)
            throw parameter_error("ObservationMask: shape must be positive");
        if (!(p_ > 0.0 && p_ <= 1.0))
            throw parameter_error("ObservationMask: p must lie in (0, 1]");
        if (symmetric_ && rows_ != cols_)
            throw parameter_error("ObservationMask: symmetric masks must be square");
        std::sort(entries_.begin(), entries_.end());
        validate();
        if (static_cast<double>(entries_.size()) >
            0.05 * static_cast<double>(rows_) * static_cast<double>(cols_))
            build_bitmap();
    }

    index_t rows() const { return rows_; }
    index_t cols() const { return cols_; }
    double p() const { return p_; }
    bool symmetric() const { return symmetric_; }
    const std::vector<Entry>& entries() const { return entries_; }
    std::size_t count() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    bool contains(index_t i, index_t j) const {
        if (i < 0 || j < 0 || i >= rows_ || j >= cols_) return false;
        if (!bitmap_.empty())
            return bitmap_[static_cast<std::size_t>(i) * static_cast<std::size_t>(cols_) +
                           static_cast<std::size_t>(j)] != 0;
        return std::binary_search(entries_.begin(), entries_.end(), Entry{i, j});
    }

private:
    void validate() const {
        for (std::size_t k = 0; k < entries_.size(); ++k) {
            const auto& [i, j] = entries_[k];
            if (i < 0 || j < 0 || i >= rows_ || j >= cols_)
                throw parameter_error("ObservationMask: index (" + std::to_string(i) +
                                      ", " + std::to_string(j) + ") out of range");
            if (k > 0 && entries_[k] == entries_[k - 1])
                throw parameter_error("ObservationMask: duplicate index pair");
        }
        if (symmetric_) {
            for (const auto& [i, j] : entries_)
                if (!std::binary_search(entries_.begin(), entries_.end(), Entry{j, i}))
                    throw parameter_error(
                        "ObservationMask: symmetric flag set but pair closure fails");
        }
    }

    void build_bitmap() {
        bitmap_.assign(static_cast<std::size_t>(rows_) * static_cast<std::size_t>(cols_), 0);
        for (const auto& [i, j] : entries_)
            bitmap_[static_cast<std::size_t>(i) * static_cast<std::size_t>(cols_) +
                    static_cast<std::size_t>(j)] = 1;
    }

    index_t rows_ = 0, cols_ = 0;
    double p_ = 0.0;
    bool symmetric_ = false;
    std::vector<Entry> entries_;
    std::vector<std::uint8_t> bitmap_;
};

// P_Ω (rescale off) or R_Ω = (1/p) P_Ω (rescale on).
inline Matrix masked(const Matrix& M, const ObservationMask& mask, bool rescale) {
    if (M.rows() != mask.rows() || M.cols() != mask.cols())
        throw dimension_error("masked: matrix and mask shapes differ");
    if (rescale && !(mask.p() > 0.0))
        throw parameter_error("masked: rescaling divides by p, which must be positive");
    const double s = rescale ? 1.0 / mask.p() : 1.0;
    Matrix out = Matrix::Zero(M.rows(), M.cols());
    for (const auto& [i, j] : mask.entries()) out(i, j) = s * M(i, j);
    return out;
}

} // namespace lowrank
