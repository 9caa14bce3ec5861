#pragma once

#include <string>
#include <utility>

#include "lowrank/matrix.hpp"

namespace lowrank {

// Orthonormal factors (U, V) spanning the column and row spaces of a rank-r
// matrix; they define the tangent space T = {UXᵀ + YVᵀ} and its projections.
struct SubspacePair {
    Matrix U, V;
    index_t rank = 0;

    SubspacePair(Matrix U_in, Matrix V_in)
        : U(std::move(U_in)), V(std::move(V_in)), rank(U.cols()) {
        if (V.cols() != rank)
            throw dimension_error("SubspacePair: U and V must have the same column count");
        if (rank < 1) throw parameter_error("SubspacePair: rank must be at least 1");
        require_orthonormal(U, "SubspacePair: U");
        require_orthonormal(V, "SubspacePair: V");
    }

    static void require_orthonormal(const Matrix& Q, const char* what) {
        const Matrix gram = Q.transpose() * Q;
        const double dev =
            (gram - Matrix::Identity(Q.cols(), Q.cols())).norm();
        if (!(dev <= 1e-10))
            throw structural_error(std::string(what) +
                                   ": columns are not orthonormal (deviation " +
                                   std::to_string(dev) + ")");
    }
};

inline void check_tangent_dims(const SubspacePair& S, const Matrix& Z, const char* where) {
    if (Z.rows() != S.U.rows() || Z.cols() != S.V.rows())
        throw dimension_error(std::string(where) + ": Z shape does not match the subspace pair");
}

// P_T(Z) = UUᵀZ + ZVVᵀ − UUᵀZVVᵀ, assembled through rank-sized intermediates.
inline Matrix project_tangent(const SubspacePair& S, const Matrix& Z) {
    check_tangent_dims(S, Z, "project_tangent");
    const Matrix UtZ = S.U.transpose() * Z; // r × n2
    const Matrix ZV = Z * S.V;              // n1 × r
    Matrix out = S.U * UtZ;
    out.noalias() += (ZV - S.U * (UtZ * S.V)) * S.V.transpose();
    return out;
}

inline Matrix project_tangent_complement(const SubspacePair& S, const Matrix& Z) {
    check_tangent_dims(S, Z, "project_tangent_complement");
    return Z - project_tangent(S, Z);
}

// Containment col(inner) ⊆ col(outer) for both factors, to 1e-8; the
// side-information projections are meaningless without it.
inline void require_nested(const SubspacePair& inner, const SubspacePair& outer) {
    if (inner.U.rows() != outer.U.rows() || inner.V.rows() != outer.V.rows())
        throw dimension_error("require_nested: inner/outer shapes do not conform");
    const double du = (outer.U * (outer.U.transpose() * inner.U) - inner.U).norm();
    const double dv = (outer.V * (outer.V.transpose() * inner.V) - inner.V).norm();
    if (!(du <= 1e-8 && dv <= 1e-8))
        throw structural_error(
            "require_nested: inner subspaces are not contained in the outer ones "
            "(deviations " + std::to_string(du) + ", " + std::to_string(dv) + ")");
}

// Side-information tangent projections. With inner (U, V) nested in outer
// (Ū, V̄):
//   P_T(Z)  = UUᵀ Z V̄V̄ᵀ + ŪŪᵀ Z VVᵀ − UUᵀ Z VVᵀ
//   P_T⊥(Z) = (ŪŪᵀ − UUᵀ) Z (V̄V̄ᵀ − VVᵀ)
// so that P_T Z + P_T⊥ Z = ŪŪᵀ Z V̄V̄ᵀ. The outer pair set to a full identity
// basis reduces both to the standard projections above.
inline Matrix project_structured_tangent(const SubspacePair& inner,
                                         const SubspacePair& outer,
                                         const Matrix& Z,
                                         bool complement = false) {
    require_nested(inner, outer);
    check_tangent_dims(inner, Z, "project_structured_tangent");
    if (!complement) {
        const Matrix UtZ = inner.U.transpose() * Z;       // r × n2
        const Matrix UbtZ = outer.U.transpose() * Z;      // r̄ × n2
        Matrix out = inner.U * ((UtZ * outer.V) * outer.V.transpose());
        out.noalias() += outer.U * ((UbtZ * inner.V) * inner.V.transpose());
        out.noalias() -= inner.U * ((UtZ * inner.V) * inner.V.transpose());
        return out;
    }
    const Matrix left =
        outer.U * (outer.U.transpose() * Z) - inner.U * (inner.U.transpose() * Z);
    Matrix out = (left * outer.V) * outer.V.transpose();
    out.noalias() -= (left * inner.V) * inner.V.transpose();
    return out;
}

} // namespace lowrank
