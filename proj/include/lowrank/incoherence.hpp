#pragma once

#include <algorithm>
#include <utility>

#include "lowrank/subspace.hpp"

namespace lowrank {

struct IncoherenceReport {
    double mu0_row = 0.0;
    double mu0_col = 0.0;
    double mu0 = 0.0;
    double mu1 = 0.0;
    index_t rank = 0;
};

// (n1/r) max_i ||U^T e_i||^2 and the column-side analogue. Both sit in
// [1, n/r]: the row norms of an orthonormal n x r frame sum to r.
inline std::pair<double, double> standard_incoherence(const SubspacePair& S) {
    const double r = static_cast<double>(S.rank);
    const double row = (static_cast<double>(S.U.rows()) / r) *
                       S.U.rowwise().squaredNorm().maxCoeff();
    const double col = (static_cast<double>(S.V.rows()) / r) *
                       S.V.rowwise().squaredNorm().maxCoeff();
    return {row, col};
}

// (n1 n2 / r) max_ij (U V^T)_ij^2.
inline double joint_incoherence(const SubspacePair& S) {
    const double r = static_cast<double>(S.rank);
    const double peak = (S.U * S.V.transpose()).cwiseAbs().maxCoeff();
    return (static_cast<double>(S.U.rows()) * static_cast<double>(S.V.rows()) / r) *
           peak * peak;
}

inline IncoherenceReport incoherence_report(const SubspacePair& S) {
    IncoherenceReport rep;
    rep.rank = S.rank;
    std::tie(rep.mu0_row, rep.mu0_col) = standard_incoherence(S);
    rep.mu0 = std::max(rep.mu0_row, rep.mu0_col);
    rep.mu1 = joint_incoherence(S);
    return rep;
}

} // namespace lowrank
