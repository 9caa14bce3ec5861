#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "lowrank/incoherence.hpp"
#include "lowrank/power_iteration.hpp"
#include "lowrank/sampling.hpp"
#include "lowrank/subspace.hpp"

namespace lowrank {

inline constexpr RngSeed kCertificateProbeSeed = 0x9d1cefULL;

struct GolfingCertificate {
    Matrix Y;
    // ||D_k||_F for k = 0..k0, D_0 = U V^T. Halving per step is the
    // signature of the construction operating in its concentration regime.
    std::vector<double> dk_trace;
};

// Golfing-scheme dual certificate: Y = sum_k R_{Omega_k} P_T D_{k-1} with
// D_k = D_{k-1} - P_T R_{Omega_k} D_{k-1}, D_0 = U V^T. Each batch mask in
// the partition carries its own rate q, so masked(..., true) is exactly
// (1/q) P_{Omega_k}.
inline GolfingCertificate build_golfing_certificate(const SubspacePair& S,
                                                    const GolfingPartition& part) {
    if (part.batches.empty())
        throw parameter_error("build_golfing_certificate: partition has no batches");
    if (part.batches.front().rows() != S.U.rows() ||
        part.batches.front().cols() != S.V.rows())
        throw dimension_error("build_golfing_certificate: mask and subspace shapes differ");
    GolfingCertificate cert;
    Matrix D = S.U * S.V.transpose();
    cert.Y = Matrix::Zero(D.rows(), D.cols());
    cert.dk_trace.push_back(D.norm());
    for (const auto& batch : part.batches) {
        Matrix RD = masked(D, batch, true);
        cert.Y += RD;
        D -= project_tangent(S, RD);
        cert.dk_trace.push_back(D.norm());
    }
    return cert;
}

// Structured variant: D lives in the structured tangent space of (inner,
// outer), starting from the inner pair's U V^T.
inline GolfingCertificate build_golfing_certificate(const SubspacePair& inner,
                                                    const SubspacePair& outer,
                                                    const GolfingPartition& part) {
    if (part.batches.empty())
        throw parameter_error("build_golfing_certificate: partition has no batches");
    if (part.batches.front().rows() != inner.U.rows() ||
        part.batches.front().cols() != inner.V.rows())
        throw dimension_error("build_golfing_certificate: mask and subspace shapes differ");
    GolfingCertificate cert;
    Matrix D = inner.U * inner.V.transpose();
    cert.Y = Matrix::Zero(D.rows(), D.cols());
    cert.dk_trace.push_back(D.norm());
    for (const auto& batch : part.batches) {
        Matrix RD = masked(D, batch, true);
        cert.Y += RD;
        D -= project_structured_tangent(inner, outer, RD);
        cert.dk_trace.push_back(D.norm());
    }
    return cert;
}

// ||P_T R_Omega P_T - P_T||. The apply projects its argument onto T before
// anything else: the raw map Z -> P_T(R_Omega Z) - Z acts as -I on the
// orthogonal complement of T, so the roundoff the iteration itself injects
// off T would otherwise feed a spurious eigenvalue of magnitude 1 that the
// iteration happily converges to. Sandwiching every apply in P_T kills that
// component each step and leaves exactly the operator restricted to T.
inline double operator_norm_tangent(const SubspacePair& S, const ObservationMask& mask,
                                    RngSeed seed = kCertificateProbeSeed,
                                    const OperatorNormOptions& opts = {}) {
    if (mask.rows() != S.U.rows() || mask.cols() != S.V.rows())
        throw dimension_error("operator_norm_tangent: mask and subspace shapes differ");
    auto apply = [&](const Matrix& Z) {
        Matrix T = project_tangent(S, Z);
        return Matrix(project_tangent(S, masked(T, mask, true)) - T);
    };
    return operator_norm(mask.rows(), mask.cols(), apply, seed, opts);
}

inline double operator_norm_tangent(const SubspacePair& inner, const SubspacePair& outer,
                                    const ObservationMask& mask,
                                    RngSeed seed = kCertificateProbeSeed,
                                    const OperatorNormOptions& opts = {}) {
    if (mask.rows() != inner.U.rows() || mask.cols() != inner.V.rows())
        throw dimension_error("operator_norm_tangent: mask and subspace shapes differ");
    auto apply = [&](const Matrix& Z) {
        Matrix T = project_structured_tangent(inner, outer, Z);
        return Matrix(project_structured_tangent(inner, outer, masked(T, mask, true)) - T);
    };
    return operator_norm(mask.rows(), mask.cols(), apply, seed, opts);
}

// (1/sqrt(p)) ||P_{T_perp} P_Omega P_{T_perp}||^(1/2) for the structured
// complement T_perp of (inner, outer). P_Omega here is the plain restriction
// (no rescale); the 1/sqrt(p) normalization is applied at the end.
inline double operator_norm_masked_complement(const SubspacePair& inner,
                                              const SubspacePair& outer,
                                              const ObservationMask& mask, double p,
                                              RngSeed seed = kCertificateProbeSeed,
                                              const OperatorNormOptions& opts = {}) {
    if (!(p > 0.0 && p <= 1.0))
        throw parameter_error("operator_norm_masked_complement: p must lie in (0, 1]");
    if (mask.rows() != inner.U.rows() || mask.cols() != inner.V.rows())
        throw dimension_error(
            "operator_norm_masked_complement: mask and subspace shapes differ");
    auto apply = [&](const Matrix& Z) {
        Matrix T = project_structured_tangent(inner, outer, Z, /*complement=*/true);
        return Matrix(
            project_structured_tangent(inner, outer, masked(T, mask, false), true));
    };
    const double nrm = operator_norm(mask.rows(), mask.cols(), apply, seed, opts);
    return std::sqrt(std::max(nrm, 0.0)) / std::sqrt(p);
}

struct CertificateReport {
    double op_norm_tangent = 0.0;  // ||P_T R_Omega P_T - P_T||
    double cond2a_value = 0.0;     // ||P_{T_perp} Y||
    double cond2b_value = 0.0;     // ||P_T Y - U V^T||_F
    // Acceptance thresholds for the three values above, in the same order.
    std::array<double, 3> thresholds{0.5, 0.5, 0.0};
    bool pass_op = false;
    bool pass_2a = false;
    bool pass_2b = false;
    std::vector<double> dk_frobenius_trace;

    bool all_pass() const { return pass_op && pass_2a && pass_2b; }
};

// Bit-level support check: every nonzero of Y must be an observed entry.
inline void require_support(const Matrix& Y, const ObservationMask& mask) {
    if (Y.rows() != mask.rows() || Y.cols() != mask.cols())
        throw dimension_error("require_support: matrix and mask shapes differ");
    for (index_t i = 0; i < Y.rows(); ++i)
        for (index_t j = 0; j < Y.cols(); ++j)
            if (Y(i, j) != 0.0 && !mask.contains(i, j))
                throw structural_error("require_support: certificate leaks off the mask");
}

// Evaluates the dual-certificate conditions for exact recovery:
//   op:  ||P_T R_Omega P_T - P_T||      <= 1/2
//   2a:  ||P_{T_perp} Y||               <= 1/2
//   2b:  ||P_T Y - U V^T||_F            <= 1/(4n), n = max dimension
// The pass flags are exactly these comparisons; callers that built Y by
// golfing can fill dk_frobenius_trace from the construction.
inline CertificateReport verify_conditions(const Matrix& M, const SubspacePair& S,
                                           const ObservationMask& mask, const Matrix& Y,
                                           RngSeed seed = kCertificateProbeSeed) {
    if (M.rows() != mask.rows() || M.cols() != mask.cols())
        throw dimension_error("verify_conditions: matrix and mask shapes differ");
    require_support(Y, mask);
    CertificateReport rep;
    const double n = static_cast<double>(std::max(M.rows(), M.cols()));
    rep.thresholds = {0.5, 0.5, 1.0 / (4.0 * n)};
    rep.op_norm_tangent = operator_norm_tangent(S, mask, seed);
    rep.cond2a_value = norm(project_tangent_complement(S, Y), Norm::spectral);
    rep.cond2b_value = (project_tangent(S, Y) - S.U * S.V.transpose()).norm();
    rep.pass_op = rep.op_norm_tangent <= rep.thresholds[0];
    rep.pass_2a = rep.cond2a_value <= rep.thresholds[1];
    rep.pass_2b = rep.cond2b_value <= rep.thresholds[2];
    return rep;
}

struct StructuredCertificateReport {
    double op_norm_tangent = 0.0;
    double cond2a_value = 0.0;
    double cond2b_value = 0.0;
    double masked_complement_norm = 0.0;  // (1/sqrt p)||P_Tp P_Om P_Tp||^(1/2)
    std::array<double, 4> thresholds{0.5, 0.5, 0.0, 0.0};
    bool pass_op = false;
    bool pass_2a = false;
    bool pass_2b = false;
    bool pass_complement = false;
    std::vector<double> dk_frobenius_trace;

    bool all_pass() const { return pass_op && pass_2a && pass_2b && pass_complement; }
};

// Structured analogue. With mu0 r from the inner pair and mu0_bar r_bar from
// the outer pair:
//   2b threshold:          sqrt(mu0 r / (32 mu0_bar r_bar))
//   complement threshold:  sqrt(2 mu0_bar r_bar / (mu0 r))
inline StructuredCertificateReport verify_structured_conditions(
    const Matrix& M, const SubspacePair& inner, const SubspacePair& outer,
    const ObservationMask& mask, const Matrix& Y, double p,
    RngSeed seed = kCertificateProbeSeed) {
    if (M.rows() != mask.rows() || M.cols() != mask.cols())
        throw dimension_error("verify_structured_conditions: matrix and mask shapes differ");
    require_support(Y, mask);
    StructuredCertificateReport rep;
    const IncoherenceReport inner_rep = incoherence_report(inner);
    const IncoherenceReport outer_rep = incoherence_report(outer);
    const double mu0r = inner_rep.mu0 * static_cast<double>(inner.rank);
    const double mu0r_bar = outer_rep.mu0 * static_cast<double>(outer.rank);
    rep.thresholds = {0.5, 0.5, std::sqrt(mu0r / (32.0 * mu0r_bar)),
                      std::sqrt(2.0 * mu0r_bar / mu0r)};
    rep.op_norm_tangent = operator_norm_tangent(inner, outer, mask, seed);
    rep.cond2a_value = norm(
        project_structured_tangent(inner, outer, Y, /*complement=*/true), Norm::spectral);
    rep.cond2b_value =
        (project_structured_tangent(inner, outer, Y) - inner.U * inner.V.transpose())
            .norm();
    rep.masked_complement_norm =
        operator_norm_masked_complement(inner, outer, mask, p, seed);
    rep.pass_op = rep.op_norm_tangent <= rep.thresholds[0];
    rep.pass_2a = rep.cond2a_value <= rep.thresholds[1];
    rep.pass_2b = rep.cond2b_value <= rep.thresholds[2];
    rep.pass_complement = rep.masked_complement_norm <= rep.thresholds[3];
    return rep;
}

struct LemmaCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio() const { return rhs > 0.0 ? lhs / rhs : (lhs > 0.0 ? HUGE_VAL : 0.0); }
    bool holds() const { return lhs <= rhs; }
};

// Measured concentration inequalities for a fixed matrix Z under one mask
// draw. The first two apply to any Z; the entrywise contraction needs Z in
// T and the leakage bound needs P_Omega(Z) = 0, so those slots are only
// present when the argument actually qualifies.
struct LemmaRatios {
    // ||(R_Omega - I) Z||  vs  c (ln n / p ||Z||_inf + sqrt(ln n / p) ||Z||_inf,2)
    LemmaCheck spectral_deviation;
    // ||(P_T R_Omega - P_T) Z||_inf,2  vs  (1/2) sqrt(n / mu0 r) ||Z||_inf
    //                                       + (1/2) ||Z||_inf,2
    LemmaCheck row_col_deviation;
    // Z in T: ||(P_T R_Omega P_T - P_T) Z||_inf  vs  (1/2) ||Z||_inf
    std::optional<LemmaCheck> entry_deviation;
    // P_Omega Z = 0: ||P_T Z||_F  vs  sqrt(2) n^5 ||P_{T_perp} Z||_*
    std::optional<LemmaCheck> tangent_leakage;
};

inline LemmaRatios lemma_contractions(const SubspacePair& S, const ObservationMask& mask,
                                      const Matrix& Z, double p,
                                      double c_spectral = 1.0) {
    if (Z.rows() != mask.rows() || Z.cols() != mask.cols())
        throw dimension_error("lemma_contractions: matrix and mask shapes differ");
    if (Z.rows() != S.U.rows() || Z.cols() != S.V.rows())
        throw dimension_error("lemma_contractions: matrix and subspace shapes differ");
    if (!(p > 0.0 && p <= 1.0))
        throw parameter_error("lemma_contractions: p must lie in (0, 1]");

    const double n = static_cast<double>(std::max(Z.rows(), Z.cols()));
    const double logn = std::log(n);
    const double mu0 = incoherence_report(S).mu0;
    const double r = static_cast<double>(S.rank);
    const double z_inf = norm(Z, Norm::linf);
    const double z_inf2 = norm(Z, Norm::linf2);

    const Matrix RZ = masked(Z, mask, false) / p;
    LemmaRatios out;

    out.spectral_deviation.lhs = norm(RZ - Z, Norm::spectral);
    out.spectral_deviation.rhs =
        c_spectral * ((logn / p) * z_inf + std::sqrt(logn / p) * z_inf2);

    const Matrix PTRZ = project_tangent(S, RZ);
    const Matrix PTZ = project_tangent(S, Z);
    out.row_col_deviation.lhs = norm(PTRZ - PTZ, Norm::linf2);
    out.row_col_deviation.rhs =
        0.5 * std::sqrt(n / (mu0 * r)) * z_inf + 0.5 * z_inf2;

    if ((Z - PTZ).norm() <= 1e-8 * std::max(1.0, Z.norm())) {
        LemmaCheck c;
        c.lhs = norm(PTRZ - PTZ, Norm::linf);
        c.rhs = 0.5 * z_inf;
        out.entry_deviation = c;
    }

    double on_mask_sq = 0.0;
    for (const auto& [i, j] : mask.entries()) on_mask_sq += Z(i, j) * Z(i, j);
    if (std::sqrt(on_mask_sq) <= 1e-12 * std::max(1.0, Z.norm())) {
        LemmaCheck c;
        c.lhs = PTZ.norm();
        c.rhs = std::sqrt(2.0) * std::pow(n, 5) *
                norm(project_tangent_complement(S, Z), Norm::nuclear);
        out.tangent_leakage = c;
    }
    return out;
}

// Strict form of the entrywise contraction check: the argument must already
// lie in the tangent space.
inline LemmaCheck entry_contraction(const SubspacePair& S, const ObservationMask& mask,
                                    const Matrix& Z, double p) {
    if (Z.rows() != S.U.rows() || Z.cols() != S.V.rows())
        throw dimension_error("entry_contraction: matrix and subspace shapes differ");
    const Matrix PTZ = project_tangent(S, Z);
    if ((Z - PTZ).norm() > 1e-8 * std::max(1.0, Z.norm()))
        throw structural_error("entry_contraction: argument is not in the tangent space");
    LemmaRatios all = lemma_contractions(S, mask, Z, p);
    return *all.entry_deviation;
}

} // namespace lowrank
