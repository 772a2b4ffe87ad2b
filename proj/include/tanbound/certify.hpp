#pragma once

#include <optional>
#include <utility>

#include "tanbound/linalg.hpp"

namespace tanbound {

/// Compression of A onto span(Q1) and its complement:
/// a1 = Q1ᴴAQ1 (k×k), a2 = Q2ᴴAQ2 ((n−k)×(n−k)), b = Q2ᴴAQ1 ((n−k)×k).
/// a1 and a2 are stored exactly Hermitian (symmetrized).
struct BlockForm {
    Eigen::MatrixXcd a1;
    Eigen::MatrixXcd a2;
    Eigen::MatrixXcd b;
};

/// Residual R = AQ1 − Q1(Q1ᴴAQ1) and its spectral norm rho.
struct ResidualReport {
    Eigen::MatrixXcd r;
    double rho;
};

/// Interval [lo, hi] holding one spectral cluster, plus the distance gap > 0
/// separating it from the complementary cluster.
struct GapWindow {
    double lo;
    double hi;
    double gap;
};

/// Why a certificate could not be issued. Hypothesis failures are values,
/// never exceptions, so sweeps can aggregate them.
enum class FailureReason {
    gap_nonpositive,
    rho_too_large,
    interior_count_mismatch,
};

const char* failure_reason_name(FailureReason reason);

/// Certificate computed from approximate data alone: the spectra of the
/// compressions A1 = Q1ᴴAQ1 and A2 = Q2ᴴAQ2. When valid, the largest
/// principal angle between span(Q1) and the exact spectral subspace for the
/// k exterior eigenvalues satisfies tan θ ≤ rho/gap, the n−k interior
/// eigenvalues lie in [enclosure_lo, enclosure_hi], and the other k lie at
/// distance ≥ gap from [window.lo, window.hi].
struct AprioriCertificate {
    bool valid;
    std::optional<GapWindow> window;  // absent when spec(A1) meets [lo, hi]
    double rho;
    bool admissible;  // rho < √2·gap, with margin 1e-9·(1+‖A‖_max)

    // NaN when window is absent; otherwise filled even on an invalid
    // certificate, as diagnostics.
    double tan_bound;
    double angle_bound;
    double delta_r;
    double enclosure_lo;
    double enclosure_hi;

    Eigen::Index k;  // exterior eigenvalue count claim
    std::optional<FailureReason> failure_reason;
};

/// Certificate that combines the approximate spectrum of A1 with a
/// caller-supplied interval [lo, hi] containing the exact interior
/// eigenvalues. When valid, tan θ ≤ rho/gap with gap the distance from
/// spec(A1) to [lo, hi].
struct AposterioriCertificate {
    bool valid;
    std::optional<GapWindow> window;  // the (lo, hi, gap) triple; absent when gap ≤ 0
    double rho;
    double tan_bound;   // NaN when window is absent
    double angle_bound;
    Eigen::Index k;
    std::optional<FailureReason> failure_reason;
};

/// Blocks of A in the unitary basis [Q1, complete_frame(Q1)].
/// Requires 1 ≤ k ≤ n−1 and matching ambient dimension.
BlockForm block_partition(const HermitianMatrix& a, const OrthonormalFrame& q1);

/// R = AQ1 − Q1(Q1ᴴAQ1) with rho = ‖R‖. Q1ᴴR = 0 up to roundoff, and rho
/// equals the spectral norm of the off-diagonal block b.
ResidualReport residual(const HermitianMatrix& a, const OrthonormalFrame& q1);

/// Tightest window for the a priori certificate: [lo, hi] is the hull of
/// spec(A2) and gap the distance from spec(A1) to it. Fails with
/// GAP_NONPOSITIVE when some eigenvalue of A1 lies in the hull.
GapWindow extract_window_apriori(const Spectrum& spec_a1, const Spectrum& spec_a2);

/// Enclosure radius rho·tan(½·arctan(2·rho/gap)). Monotone increasing in
/// rho, equals gap at rho = √2·gap, and stays strictly below gap before it.
double delta_r(double rho, double gap);

AprioriCertificate certify_apriori(const HermitianMatrix& a, const OrthonormalFrame& q1);

/// interior_lo ≤ interior_hi is the caller's interval for the exact interior
/// eigenvalues; an exact eigendecomposition of A verifies that it contains
/// exactly n−k of them before the certificate is issued.
AposterioriCertificate certify_aposteriori(const HermitianMatrix& a, const OrthonormalFrame& q1,
                                           double interior_lo, double interior_hi);

enum class SubspaceSelect { exterior, interior };

/// Frame of exact eigenvectors of A selected by the window: an eigenvalue
/// counts as exterior when dist(λ, [lo, hi]) > gap/2. Fails with
/// EMPTY_SELECTION when no eigenvalue lands on the requested side.
OrthonormalFrame exact_subspace(const HermitianMatrix& a, const GapWindow& window,
                                SubspaceSelect mode);

/// Same selection from a precomputed eigendecomposition (vectors required).
OrthonormalFrame exact_subspace(const Spectrum& spec_a, const GapWindow& window,
                                SubspaceSelect mode);

/// σ_min(Q1ᴴX1) for equal-rank frames. Strictly positive iff the largest
/// principal angle is below π/2, i.e. neither subspace meets the other's
/// orthogonal complement.
double lemma_intersection_check(const OrthonormalFrame& q1, const OrthonormalFrame& x1);

/// True iff exactly n−k eigenvalues lie in the certificate's enclosure and
/// the remaining k lie at distance ≥ gap from [lo, hi], with slack
/// 1e-9·(1+max|λ|) on every comparison. Requires a valid certificate.
bool enclosure_check(const Spectrum& spec_a, const AprioriCertificate& cert);

/// The 3×3 pair sitting exactly on the admissibility boundary rho = √2·gap:
/// A = [[−1,0,√2],[0,1,0],[√2,0,0]] with Q1 the first two coordinate
/// columns. spec(A1) = {−1,1}, spec(A2) = {0}, gap = 1, rho = √2, yet
/// eig(A) = {−2,1,1} has no eigenvalue in (−1,1). certify_apriori rejects it
/// with RHO_TOO_LARGE.
std::pair<HermitianMatrix, OrthonormalFrame> canonical_counterexample();

}  // namespace tanbound
