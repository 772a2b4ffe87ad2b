#include "tanbound/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace tanbound {

namespace {

double max_abs_entry(const Eigen::MatrixXcd& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

}  // namespace

const char* errc_name(errc code) {
    switch (code) {
        case errc::not_square: return "NOT_SQUARE";
        case errc::not_hermitian: return "NOT_HERMITIAN";
        case errc::rank_deficient: return "RANK_DEFICIENT";
        case errc::dimension_mismatch: return "DIMENSION_MISMATCH";
        case errc::rank_mismatch: return "RANK_MISMATCH";
        case errc::no_convergence: return "NO_CONVERGENCE";
        case errc::gap_nonpositive: return "GAP_NONPOSITIVE";
        case errc::empty_selection: return "EMPTY_SELECTION";
        case errc::parse_error: return "PARSE_ERROR";
        case errc::size_overflow: return "SIZE_OVERFLOW";
        case errc::io_error: return "IO_ERROR";
        case errc::invalid_argument: return "INVALID_ARGUMENT";
    }
    return "UNKNOWN";
}

HermitianMatrix HermitianMatrix::validated(const Eigen::MatrixXcd& raw) {
    if (raw.rows() != raw.cols())
        fail(errc::not_square, "expected a square matrix, got " + std::to_string(raw.rows()) +
                                   "x" + std::to_string(raw.cols()));
    if (raw.rows() < 2)
        fail(errc::invalid_argument, "Hermitian operand must have n >= 2");

    const double scale = max_abs_entry(raw);
    const double defect = max_abs_entry(raw - raw.adjoint());
    if (defect > 1e-12 * (1.0 + scale))
        fail(errc::not_hermitian,
             "Hermiticity defect " + std::to_string(defect) + " exceeds tolerance");

    Eigen::MatrixXcd sym = 0.5 * (raw + raw.adjoint().eval());
    const double max_abs = max_abs_entry(sym);
    return HermitianMatrix(std::move(sym), max_abs);
}

HermitianMatrix validate_hermitian(const Eigen::MatrixXcd& raw) {
    return HermitianMatrix::validated(raw);
}

OrthonormalFrame OrthonormalFrame::validated(const Eigen::MatrixXcd& columns) {
    const Eigen::Index n = columns.rows();
    const Eigen::Index k = columns.cols();
    if (k < 1 || k > n)
        fail(errc::dimension_mismatch,
             "frame must have 1 <= k <= n columns, got n=" + std::to_string(n) +
                 " k=" + std::to_string(k));
    Eigen::MatrixXcd gram = columns.adjoint() * columns;
    gram -= Eigen::MatrixXcd::Identity(k, k);
    const double defect = max_abs_entry(gram);
    if (defect > 1e-10)
        fail(errc::invalid_argument,
             "columns are not orthonormal: Gram defect " + std::to_string(defect));
    return OrthonormalFrame(columns);
}

OrthonormalFrame orthonormalize(const Eigen::MatrixXcd& raw) {
    const Eigen::Index n = raw.rows();
    const Eigen::Index k = raw.cols();
    if (k < 1 || k > n)
        fail(errc::dimension_mismatch,
             "expected 1 <= k <= n, got n=" + std::to_string(n) + " k=" + std::to_string(k));

    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(raw);
    const double sigma_max = svd.singularValues()(0);
    const double sigma_min = svd.singularValues()(k - 1);
    if (sigma_max == 0.0 || sigma_min < 1e-10 * sigma_max)
        fail(errc::rank_deficient, "smallest column singular value " + std::to_string(sigma_min) +
                                       " below 1e-10 of largest " + std::to_string(sigma_max));

    return OrthonormalFrame::validated(detail::qr_phase_normalized(raw));
}

OrthonormalFrame complete_frame(const OrthonormalFrame& q1) {
    const Eigen::Index n = q1.n();
    const Eigen::Index k = q1.k();
    if (k >= n)
        fail(errc::invalid_argument, "frame already spans the whole space, no complement");

    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(q1.cols());
    Eigen::MatrixXcd full = qr.householderQ();
    return OrthonormalFrame::validated(full.rightCols(n - k));
}

namespace detail {

Spectrum spectrum_of(const Eigen::MatrixXcd& herm, bool want_vectors, double scale) {
    const Eigen::Index n = herm.rows();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
        herm, want_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        fail(errc::no_convergence, "eigendecomposition did not converge");

    Spectrum spectrum;
    spectrum.values = solver.eigenvalues();
    if (want_vectors) {
        spectrum.vectors = solver.eigenvectors();
        const Eigen::MatrixXcd residual =
            herm * (*spectrum.vectors) - (*spectrum.vectors) * spectrum.values.asDiagonal();
        const double defect = max_abs_entry(residual);
        if (defect > 1e-9 * (1.0 + scale) * static_cast<double>(n))
            fail(errc::no_convergence,
                 "eigenvector residual " + std::to_string(defect) + " exceeds tolerance");
    }
    return spectrum;
}

double smallest_singular_value(const Eigen::MatrixXcd& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    return svd.singularValues()(svd.singularValues().size() - 1);
}

Eigen::MatrixXcd qr_phase_normalized(const Eigen::MatrixXcd& raw) {
    const Eigen::Index n = raw.rows();
    const Eigen::Index k = raw.cols();
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(raw);
    Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(n, k);
    // Rotating each column by the phase of the matching diagonal entry of R
    // leaves an already orthonormal input essentially unchanged.
    const auto r_diag = qr.matrixQR().diagonal();
    for (Eigen::Index j = 0; j < k; ++j) {
        const double mag = std::abs(r_diag(j));
        if (mag > 0.0) q.col(j) *= r_diag(j) / mag;
    }
    return q;
}

}  // namespace detail

Spectrum hermitian_spectrum(const HermitianMatrix& a, bool want_vectors) {
    return detail::spectrum_of(a.mat(), want_vectors, a.max_abs());
}

double spectral_norm(const Eigen::MatrixXcd& m) {
    if (m.rows() == 0 || m.cols() == 0) fail(errc::invalid_argument, "empty matrix");
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    return svd.singularValues()(0);
}

namespace {

struct RouteAngles {
    std::vector<double> cosine;  // descending angles from arccos of UᴴV values
    std::vector<double> sine;    // descending angles from arcsin of U − V(VᴴU) values
};

RouteAngles compute_routes(const OrthonormalFrame& u, const OrthonormalFrame& v) {
    if (u.n() != v.n())
        fail(errc::dimension_mismatch, "frames live in different ambient dimensions");

    // Order so the first frame has the smaller rank; principal angles are
    // symmetric in the arguments.
    const bool swap = u.k() > v.k();
    const Eigen::MatrixXcd& p = swap ? v.cols() : u.cols();
    const Eigen::MatrixXcd& q = swap ? u.cols() : v.cols();
    const Eigen::Index num = p.cols();

    Eigen::MatrixXcd cross = p.adjoint() * q;
    Eigen::JacobiSVD<Eigen::MatrixXcd> cos_svd(cross);

    Eigen::MatrixXcd perp = p - q * (q.adjoint() * p);
    Eigen::JacobiSVD<Eigen::MatrixXcd> sin_svd(perp);

    RouteAngles routes;
    routes.cosine.resize(num);
    routes.sine.resize(num);
    for (Eigen::Index i = 0; i < num; ++i) {
        // Cosines descending = angles ascending, so reverse for descending.
        routes.cosine[i] = std::acos(clamp01(cos_svd.singularValues()(num - 1 - i)));
        routes.sine[i] = std::asin(clamp01(sin_svd.singularValues()(i)));
    }
    return routes;
}

}  // namespace

AngleRoutes principal_angle_routes(const OrthonormalFrame& u, const OrthonormalFrame& v) {
    RouteAngles routes = compute_routes(u, v);
    return AngleRoutes{std::move(routes.cosine), std::move(routes.sine)};
}

AngleSet principal_angles(const OrthonormalFrame& u, const OrthonormalFrame& v) {
    RouteAngles routes = compute_routes(u, v);
    const std::size_t num = routes.cosine.size();

    // Cross-check the two largest angles. Each route resolves angles at its
    // ill-conditioned end only to about sqrt(n·eps), so allow that on top of
    // the nominal 1e-8 agreement; random well-separated frames agree far
    // below 1e-8.
    const double ambient = static_cast<double>(u.n());
    const double resolution = 8.0 * std::sqrt(ambient * 2.2e-16);
    if (std::abs(routes.cosine[0] - routes.sine[0]) > 1e-8 + resolution)
        throw std::logic_error("principal angle routes disagree beyond tolerance");

    AngleSet set;
    set.angles.resize(num);
    for (std::size_t i = 0; i < num; ++i) {
        const bool below_quarter_pi = routes.sine[i] <= 0.25 * std::numbers::pi;
        set.angles[i] = below_quarter_pi ? routes.sine[i] : routes.cosine[i];
    }
    // Mixing the two routes can break monotonicity by roundoff right at the
    // switch point.
    std::sort(set.angles.begin(), set.angles.end(), std::greater<double>());
    return set;
}

}  // namespace tanbound
