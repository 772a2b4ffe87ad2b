#pragma once

#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <vector>

#include "tanbound/errors.hpp"

namespace tanbound {

using Complex = std::complex<double>;

/// Dense Hermitian operand. Construction validates the Hermiticity defect
/// ‖A − Aᴴ‖_max ≤ 1e-12·(1 + ‖A‖_max) and stores the symmetrized (A + Aᴴ)/2,
/// whose entries are exactly Hermitian.
class HermitianMatrix {
  public:
    static HermitianMatrix validated(const Eigen::MatrixXcd& raw);

    Eigen::Index n() const { return mat_.rows(); }
    const Eigen::MatrixXcd& mat() const { return mat_; }

    /// Largest entry magnitude; the scale used by relative tolerances.
    double max_abs() const { return max_abs_; }

  private:
    HermitianMatrix(Eigen::MatrixXcd mat, double max_abs)
        : mat_(std::move(mat)), max_abs_(max_abs) {}

    Eigen::MatrixXcd mat_;
    double max_abs_;
};

/// n×k basis with orthonormal columns, representing a k-dimensional subspace.
/// Construction validates ‖QᴴQ − I‖_max ≤ 1e-10.
class OrthonormalFrame {
  public:
    static OrthonormalFrame validated(const Eigen::MatrixXcd& columns);

    Eigen::Index n() const { return cols_.rows(); }
    Eigen::Index k() const { return cols_.cols(); }
    const Eigen::MatrixXcd& cols() const { return cols_; }

  private:
    explicit OrthonormalFrame(Eigen::MatrixXcd cols) : cols_(std::move(cols)) {}

    Eigen::MatrixXcd cols_;
};

/// Eigenvalues sorted ascending, optionally with a unitary eigenvector frame.
struct Spectrum {
    Eigen::VectorXd values;
    std::optional<Eigen::MatrixXcd> vectors;
};

/// Principal angles between two subspaces, in radians, sorted descending.
struct AngleSet {
    std::vector<double> angles;

    double largest() const { return angles.front(); }
};

/// Validates a raw square array and returns the symmetrized Hermitian operand.
HermitianMatrix validate_hermitian(const Eigen::MatrixXcd& raw);

/// Orthonormal basis of the column span of `raw` (QR with column phases
/// normalized so the triangular factor has positive real diagonal).
/// Fails with rank_deficient when the smallest singular value is below
/// 1e-10 times the largest.
OrthonormalFrame orthonormalize(const Eigen::MatrixXcd& raw);

/// Orthonormal basis Q2 of the orthogonal complement of span(q1), so that
/// [Q1 Q2] is unitary.
OrthonormalFrame complete_frame(const OrthonormalFrame& q1);

/// Eigendecomposition of a Hermitian operand, eigenvalues ascending. With
/// want_vectors the result satisfies ‖AX − XΛ‖_max ≤ 1e-9·(1 + ‖A‖_max)·n.
Spectrum hermitian_spectrum(const HermitianMatrix& a, bool want_vectors);

/// Largest singular value of an arbitrary rectangular matrix.
double spectral_norm(const Eigen::MatrixXcd& m);

/// Principal angles between span(u) and span(v). Each angle is computed by
/// both the cosine route (singular values of UᴴV) and the sine route
/// (singular values of U − V(VᴴU)); the two largest-angle results are
/// cross-checked, and the returned set takes the sine-route value below π/4
/// and the cosine-route value above, where each arc function is
/// well conditioned.
AngleSet principal_angles(const OrthonormalFrame& u, const OrthonormalFrame& v);

/// Both routes' full angle lists (descending), mainly for agreement tests.
struct AngleRoutes {
    std::vector<double> cosine_route;
    std::vector<double> sine_route;
};

AngleRoutes principal_angle_routes(const OrthonormalFrame& u, const OrthonormalFrame& v);

namespace detail {

/// Eigendecomposition of an exactly Hermitian block of any size ≥ 1.
/// `scale` feeds the residual tolerance 1e-9·(1 + scale)·n.
Spectrum spectrum_of(const Eigen::MatrixXcd& herm, bool want_vectors, double scale);

/// Smallest singular value (0 for an empty product).
double smallest_singular_value(const Eigen::MatrixXcd& m);

/// Thin Q factor of raw with each column's phase fixed so the triangular
/// factor has positive real diagonal. No rank check.
Eigen::MatrixXcd qr_phase_normalized(const Eigen::MatrixXcd& raw);

}  // namespace detail

}  // namespace tanbound
