#include "tanbound/certify.hpp"

#include <cmath>
#include <limits>

namespace tanbound {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double dist_to_interval(double x, double lo, double hi) {
    if (x < lo) return lo - x;
    if (x > hi) return x - hi;
    return 0.0;
}

// Hull of spec(A2) plus its distance to spec(A1); empty when some
// eigenvalue of A1 lands inside the hull.
std::optional<GapWindow> hull_window(const Spectrum& spec_a1, const Spectrum& spec_a2) {
    if (spec_a1.values.size() == 0 || spec_a2.values.size() == 0)
        fail(errc::invalid_argument, "window extraction needs nonempty spectra");

    const double lo = spec_a2.values(0);
    const double hi = spec_a2.values(spec_a2.values.size() - 1);

    double gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < spec_a1.values.size(); ++i)
        gap = std::min(gap, dist_to_interval(spec_a1.values(i), lo, hi));

    if (gap <= 0.0) return std::nullopt;
    return GapWindow{lo, hi, gap};
}

}  // namespace

const char* failure_reason_name(FailureReason reason) {
    switch (reason) {
        case FailureReason::gap_nonpositive: return "GAP_NONPOSITIVE";
        case FailureReason::rho_too_large: return "RHO_TOO_LARGE";
        case FailureReason::interior_count_mismatch: return "INTERIOR_COUNT_MISMATCH";
    }
    return "UNKNOWN";
}

BlockForm block_partition(const HermitianMatrix& a, const OrthonormalFrame& q1) {
    if (a.n() != q1.n())
        fail(errc::dimension_mismatch, "operand is " + std::to_string(a.n()) +
                                           "-dimensional, frame is " + std::to_string(q1.n()));
    if (q1.k() >= q1.n())
        fail(errc::dimension_mismatch, "frame must leave a nonempty complement (k <= n-1)");

    const OrthonormalFrame q2 = complete_frame(q1);
    Eigen::MatrixXcd a1 = q1.cols().adjoint() * a.mat() * q1.cols();
    Eigen::MatrixXcd a2 = q2.cols().adjoint() * a.mat() * q2.cols();

    BlockForm form;
    form.a1 = 0.5 * (a1 + a1.adjoint().eval());
    form.a2 = 0.5 * (a2 + a2.adjoint().eval());
    form.b = q2.cols().adjoint() * a.mat() * q1.cols();
    return form;
}

ResidualReport residual(const HermitianMatrix& a, const OrthonormalFrame& q1) {
    if (a.n() != q1.n())
        fail(errc::dimension_mismatch, "operand is " + std::to_string(a.n()) +
                                           "-dimensional, frame is " + std::to_string(q1.n()));

    const Eigen::MatrixXcd aq = a.mat() * q1.cols();
    ResidualReport report;
    report.r = aq - q1.cols() * (q1.cols().adjoint() * aq);
    report.rho = spectral_norm(report.r);
    return report;
}

GapWindow extract_window_apriori(const Spectrum& spec_a1, const Spectrum& spec_a2) {
    std::optional<GapWindow> window = hull_window(spec_a1, spec_a2);
    if (!window)
        fail(errc::gap_nonpositive,
             "an eigenvalue of the compression lies inside the complementary hull");
    return *window;
}

double delta_r(double rho, double gap) {
    if (!(gap > 0.0)) fail(errc::gap_nonpositive, "enclosure radius needs gap > 0");
    if (rho < 0.0) fail(errc::invalid_argument, "residual norm must be nonnegative");
    if (rho == 0.0) return 0.0;

    // rho·tan(½·arctan(t)) with t = 2·rho/gap, in the algebraic form
    // rho·t/(1 + sqrt(1+t²)) rewritten to stay finite for huge t.
    const double inv_t = gap / (2.0 * rho);
    return rho / (inv_t + std::sqrt(1.0 + inv_t * inv_t));
}

AprioriCertificate certify_apriori(const HermitianMatrix& a, const OrthonormalFrame& q1) {
    const BlockForm form = block_partition(a, q1);
    const Spectrum spec_a1 = detail::spectrum_of(form.a1, false, a.max_abs());
    const Spectrum spec_a2 = detail::spectrum_of(form.a2, false, a.max_abs());
    const ResidualReport res = residual(a, q1);

    AprioriCertificate cert;
    cert.valid = false;
    cert.rho = res.rho;
    cert.admissible = false;
    cert.tan_bound = kNaN;
    cert.angle_bound = kNaN;
    cert.delta_r = kNaN;
    cert.enclosure_lo = kNaN;
    cert.enclosure_hi = kNaN;
    cert.k = q1.k();

    std::optional<GapWindow> window = hull_window(spec_a1, spec_a2);
    if (!window) {
        cert.failure_reason = FailureReason::gap_nonpositive;
        return cert;
    }

    cert.window = *window;
    cert.tan_bound = res.rho / window->gap;
    cert.angle_bound = std::atan(cert.tan_bound);
    cert.delta_r = delta_r(res.rho, window->gap);
    cert.enclosure_lo = window->lo - cert.delta_r;
    cert.enclosure_hi = window->hi + cert.delta_r;

    // Strict rho < √2·gap, rejected with a scale-relative margin so the
    // boundary pair lands on the failure side regardless of roundoff.
    const double margin = 1e-9 * (1.0 + a.max_abs());
    cert.admissible = res.rho < std::sqrt(2.0) * window->gap - margin;
    cert.valid = cert.admissible;
    if (!cert.valid) cert.failure_reason = FailureReason::rho_too_large;
    return cert;
}

AposterioriCertificate certify_aposteriori(const HermitianMatrix& a, const OrthonormalFrame& q1,
                                           double interior_lo, double interior_hi) {
    if (!(interior_lo <= interior_hi))
        fail(errc::invalid_argument, "interior interval has lo > hi");

    const BlockForm form = block_partition(a, q1);
    const Spectrum spec_a1 = detail::spectrum_of(form.a1, false, a.max_abs());
    const ResidualReport res = residual(a, q1);
    const Spectrum spec_a = hermitian_spectrum(a, false);

    AposterioriCertificate cert;
    cert.valid = false;
    cert.rho = res.rho;
    cert.tan_bound = kNaN;
    cert.angle_bound = kNaN;
    cert.k = q1.k();

    double gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < spec_a1.values.size(); ++i)
        gap = std::min(gap, dist_to_interval(spec_a1.values(i), interior_lo, interior_hi));

    if (gap > 0.0) {
        cert.window = GapWindow{interior_lo, interior_hi, gap};
        cert.tan_bound = res.rho / gap;
        cert.angle_bound = std::atan(cert.tan_bound);
    }

    const double tol = 1e-9 * (1.0 + a.max_abs());
    Eigen::Index interior_count = 0;
    for (Eigen::Index i = 0; i < spec_a.values.size(); ++i) {
        const double lambda = spec_a.values(i);
        if (lambda >= interior_lo - tol && lambda <= interior_hi + tol) ++interior_count;
    }

    if (interior_count != a.n() - q1.k()) {
        cert.failure_reason = FailureReason::interior_count_mismatch;
        return cert;
    }
    if (!(gap > 0.0)) {
        cert.failure_reason = FailureReason::gap_nonpositive;
        return cert;
    }
    cert.valid = true;
    return cert;
}

OrthonormalFrame exact_subspace(const Spectrum& spec_a, const GapWindow& window,
                                SubspaceSelect mode) {
    if (!(window.gap > 0.0)) fail(errc::gap_nonpositive, "window gap must be positive");
    if (!(window.lo <= window.hi)) fail(errc::invalid_argument, "window has lo > hi");
    if (!spec_a.vectors)
        fail(errc::invalid_argument, "subspace selection needs eigenvectors in the spectrum");

    const Eigen::Index n = spec_a.values.size();
    std::vector<Eigen::Index> picked;
    for (Eigen::Index i = 0; i < n; ++i) {
        const bool exterior =
            dist_to_interval(spec_a.values(i), window.lo, window.hi) > 0.5 * window.gap;
        if (exterior == (mode == SubspaceSelect::exterior)) picked.push_back(i);
    }
    if (picked.empty())
        fail(errc::empty_selection, mode == SubspaceSelect::exterior
                                        ? "no eigenvalue beyond the midpoint threshold"
                                        : "no eigenvalue within the midpoint threshold");

    Eigen::MatrixXcd cols(spec_a.vectors->rows(), static_cast<Eigen::Index>(picked.size()));
    for (std::size_t j = 0; j < picked.size(); ++j)
        cols.col(static_cast<Eigen::Index>(j)) = spec_a.vectors->col(picked[j]);
    return OrthonormalFrame::validated(cols);
}

OrthonormalFrame exact_subspace(const HermitianMatrix& a, const GapWindow& window,
                                SubspaceSelect mode) {
    return exact_subspace(hermitian_spectrum(a, true), window, mode);
}

double lemma_intersection_check(const OrthonormalFrame& q1, const OrthonormalFrame& x1) {
    if (q1.n() != x1.n())
        fail(errc::dimension_mismatch, "frames live in different ambient dimensions");
    if (q1.k() != x1.k())
        fail(errc::rank_mismatch, "frames have ranks " + std::to_string(q1.k()) + " and " +
                                      std::to_string(x1.k()));
    return detail::smallest_singular_value(q1.cols().adjoint() * x1.cols());
}

bool enclosure_check(const Spectrum& spec_a, const AprioriCertificate& cert) {
    if (!cert.valid || !cert.window)
        fail(errc::invalid_argument, "enclosure check needs a valid certificate");
    if (spec_a.values.size() == 0) fail(errc::invalid_argument, "empty spectrum");

    // max|λ| bounds ‖A‖_max from above, so this slack is no tighter than the
    // certificate's own.
    const double scale = spec_a.values.cwiseAbs().maxCoeff();
    const double tol = 1e-9 * (1.0 + scale);
    const GapWindow& w = *cert.window;

    Eigen::Index interior_count = 0;
    for (Eigen::Index i = 0; i < spec_a.values.size(); ++i) {
        const double lambda = spec_a.values(i);
        if (lambda >= cert.enclosure_lo - tol && lambda <= cert.enclosure_hi + tol) {
            ++interior_count;
            continue;
        }
        const bool exterior = lambda <= w.lo - w.gap + tol || lambda >= w.hi + w.gap - tol;
        if (!exterior) return false;
    }
    return interior_count == spec_a.values.size() - cert.k;
}

std::pair<HermitianMatrix, OrthonormalFrame> canonical_counterexample() {
    const double root2 = std::sqrt(2.0);
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(3, 3);
    a(0, 0) = -1.0;
    a(1, 1) = 1.0;
    a(0, 2) = root2;
    a(2, 0) = root2;

    Eigen::MatrixXcd q1 = Eigen::MatrixXcd::Identity(3, 3).leftCols(2);
    return {HermitianMatrix::validated(a), OrthonormalFrame::validated(q1)};
}

}  // namespace tanbound
