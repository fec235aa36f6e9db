#pragma once

// Dense complex linear algebra with explicit rank tolerances, and the subspace
// algebra (range, kernel, sum, intersection, complement, preimage) built on it.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <string_view>

#include "accform/errors.hpp"

namespace accform {

using Complex = std::complex<double>;
using Index = Eigen::Index;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

struct ToleranceConfig {
    double rank_rtol = 1e-10;     // relative singular value cutoff
    double angle_tol = 1e-8;      // principal angle (radians) below which subspaces coincide
    double residual_tol = 1e-9;   // absolute residual bound for solves and sign tests

    void validate() const {
        auto ok = [](double x) { return std::isfinite(x) && x > 0.0 && x < 1.0; };
        if (!ok(rank_rtol) || !ok(angle_tol) || !ok(residual_tol))
            throw InputError("tolerances must lie strictly between 0 and 1");
    }

    friend bool operator==(const ToleranceConfig&, const ToleranceConfig&) = default;
};

inline void require_finite(const ComplexMatrix& m, std::string_view what) {
    if (!m.allFinite()) throw InputError(std::string(what) + ": matrix has non-finite entries");
}

inline ComplexMatrix hermitian_part(const ComplexMatrix& m) { return (m + m.adjoint()) * 0.5; }
inline ComplexMatrix skew_part(const ComplexMatrix& m) { return (m - m.adjoint()) * 0.5; }
// Im M in the operator sense: (M - M*)/(2i), Hermitian.
inline ComplexMatrix imaginary_part(const ComplexMatrix& m) {
    return (m - m.adjoint()) * Complex(0.0, -0.5);
}

// Singular values in decreasing order; empty for empty input.
inline RealVector singular_values(const ComplexMatrix& m) {
    if (m.size() == 0) return RealVector();
    return Eigen::JacobiSVD<ComplexMatrix>(m).singularValues();
}

// Spectral norm; 0 for empty matrices.
inline double norm2(const ComplexMatrix& m) {
    if (m.size() == 0) return 0.0;
    if (m.cols() == 1 || m.rows() == 1) return m.norm();
    return singular_values(m)(0);
}

inline double sigma_min(const ComplexMatrix& m) {
    if (m.size() == 0) return 0.0;
    const RealVector s = singular_values(m);
    return s(s.size() - 1);
}

// Multiplies each column by a unit scalar so that its first entry of largest
// modulus is real and positive. Makes bases from different factorizations
// comparable entrywise in the one-dimensional case and keeps output deterministic.
inline void canonicalize_phases(ComplexMatrix& b) {
    for (Index j = 0; j < b.cols(); ++j) {
        const double big = b.col(j).cwiseAbs().maxCoeff();
        if (big == 0.0) continue;
        Index pick = 0;
        for (Index i = 0; i < b.rows(); ++i) {
            if (std::abs(b(i, j)) >= big * (1.0 - 1e-12)) {
                pick = i;
                break;
            }
        }
        const Complex z = b(pick, j);
        b.col(j) *= std::conj(z) / std::abs(z);
    }
}

class Subspace {
public:
    Subspace() = default;

    // Columns of basis must be orthonormal. Checked loosely; callers in this
    // library always pass factorization output.
    Subspace(Index ambient, ComplexMatrix basis) : ambient_(ambient), basis_(std::move(basis)) {
        if (basis_.cols() == 0) basis_.resize(ambient_, 0);
        if (basis_.rows() != ambient_ || basis_.cols() > ambient_)
            throw DimensionError("subspace basis does not fit its ambient dimension");
        if (basis_.cols() > 0 &&
            (basis_.adjoint() * basis_ - ComplexMatrix::Identity(basis_.cols(), basis_.cols()))
                    .norm() > 1e-6)
            throw InputError("subspace basis is not orthonormal");
    }

    static Subspace zero(Index ambient) { return Subspace(ambient, ComplexMatrix(ambient, 0)); }
    static Subspace full(Index ambient) {
        return Subspace(ambient, ComplexMatrix::Identity(ambient, ambient));
    }

    Index ambient_dim() const { return ambient_; }
    Index dim() const { return basis_.cols(); }
    bool is_zero() const { return dim() == 0; }
    bool is_full() const { return dim() == ambient_; }
    const ComplexMatrix& basis() const { return basis_; }

    ComplexMatrix projector() const { return basis_ * basis_.adjoint(); }
    ComplexMatrix project(const ComplexMatrix& x) const { return basis_ * (basis_.adjoint() * x); }

    // ||B*B - I||_2, the quantity bounded by 10 rank_rtol for produced subspaces.
    double orthonormality_defect() const {
        if (dim() == 0) return 0.0;
        return norm2(basis_.adjoint() * basis_ - ComplexMatrix::Identity(dim(), dim()));
    }

private:
    Index ambient_ = 0;
    ComplexMatrix basis_ = ComplexMatrix(0, 0);
};

namespace detail {

inline Index numerical_rank(const RealVector& sv, double rtol, double scale) {
    if (sv.size() == 0) return 0;
    const double thr = rtol * std::max(sv(0), scale);
    Index r = 0;
    while (r < sv.size() && sv(r) > thr) ++r;
    return r;
}

inline void require_same_ambient(const Subspace& a, const Subspace& b, std::string_view op) {
    if (a.ambient_dim() != b.ambient_dim())
        throw DimensionError(std::string(op) + ": ambient dimensions differ (" +
                             std::to_string(a.ambient_dim()) + " vs " +
                             std::to_string(b.ambient_dim()) + ")");
}

// Orthonormal basis of range(x) for x of full column rank (polar factor).
inline ComplexMatrix polar_orthonormalize(const ComplexMatrix& x) {
    if (x.cols() == 0) return x;
    Eigen::JacobiSVD<ComplexMatrix> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
    ComplexMatrix q = svd.matrixU() * svd.matrixV().adjoint();
    canonicalize_phases(q);
    return q;
}

}  // namespace detail

// Column space of m. Singular values at or below rank_rtol * max(sigma_max, scale)
// count as zero; scale lets callers supply a reference magnitude when m itself
// may be pure rounding noise.
inline Subspace orthonormal_range(const ComplexMatrix& m, const ToleranceConfig& tol,
                                  double scale = 0.0) {
    require_finite(m, "orthonormal_range");
    if (m.rows() == 0 || m.cols() == 0) return Subspace::zero(m.rows());
    Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeFullU);
    const Index r = detail::numerical_rank(svd.singularValues(), tol.rank_rtol, scale);
    ComplexMatrix b = svd.matrixU().leftCols(r);
    canonicalize_phases(b);
    return Subspace(m.rows(), std::move(b));
}

inline Subspace kernel(const ComplexMatrix& m, const ToleranceConfig& tol, double scale = 0.0) {
    require_finite(m, "kernel");
    const Index n = m.cols();
    if (n == 0) return Subspace::zero(0);
    if (m.rows() == 0) return Subspace::full(n);
    Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeFullV);
    const Index r = detail::numerical_rank(svd.singularValues(), tol.rank_rtol, scale);
    ComplexMatrix b = svd.matrixV().rightCols(n - r);
    canonicalize_phases(b);
    return Subspace(n, std::move(b));
}

inline Index numerical_rank(const ComplexMatrix& m, const ToleranceConfig& tol, double scale = 0.0) {
    return detail::numerical_rank(singular_values(m), tol.rank_rtol, scale);
}

// Minimum-norm least-squares solution of m x = rhs with the same rank cutoff.
inline ComplexMatrix pseudo_solve(const ComplexMatrix& m, const ComplexMatrix& rhs,
                                  const ToleranceConfig& tol, double scale = 0.0) {
    if (m.rows() != rhs.rows()) throw DimensionError("pseudo_solve: row mismatch");
    if (m.size() == 0 || rhs.cols() == 0) return ComplexMatrix::Zero(m.cols(), rhs.cols());
    Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RealVector& s = svd.singularValues();
    const Index r = detail::numerical_rank(s, tol.rank_rtol, scale);
    ComplexMatrix coeffs = svd.matrixU().leftCols(r).adjoint() * rhs;
    for (Index i = 0; i < r; ++i) coeffs.row(i) /= s(i);
    return svd.matrixV().leftCols(r) * coeffs;
}

// Sum and intersection from a single SVD of [Q1 Q2]: singular values of that
// matrix are sqrt(1 -+ cos(theta_i)) over the principal angles theta_i, so the
// ones at or below sqrt(2) sin(angle_tol / 2) mark shared directions. Counting
// both outputs from the same split keeps dim(S1+S2) + dim(S1∩S2) = dim S1 + dim S2.
namespace detail {

struct SumIntersect {
    Subspace sum;
    Subspace intersection;
};

inline SumIntersect sum_and_intersect(const Subspace& s1, const Subspace& s2,
                                      const ToleranceConfig& tol) {
    const Index n = s1.ambient_dim();
    const Index k1 = s1.dim(), k2 = s2.dim(), k = k1 + k2;
    if (k1 == 0) return {s2, Subspace::zero(n)};
    if (k2 == 0) return {s1, Subspace::zero(n)};
    ComplexMatrix g(n, k);
    g << s1.basis(), s2.basis();
    Eigen::JacobiSVD<ComplexMatrix> svd(g, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const RealVector& s = svd.singularValues();
    const double thr = std::sqrt(2.0) * std::sin(tol.angle_tol / 2.0);
    Index r = 0;
    while (r < s.size() && s(r) > thr) ++r;

    ComplexMatrix sum_basis = svd.matrixU().leftCols(r);
    canonicalize_phases(sum_basis);

    const ComplexMatrix v = svd.matrixV().rightCols(k - r);
    ComplexMatrix x = (s1.basis() * v.topRows(k1) - s2.basis() * v.bottomRows(k2)) * 0.5;
    return {Subspace(n, std::move(sum_basis)), Subspace(n, polar_orthonormalize(x))};
}

}  // namespace detail

inline Subspace sum(const Subspace& s1, const Subspace& s2, const ToleranceConfig& tol) {
    detail::require_same_ambient(s1, s2, "sum");
    return detail::sum_and_intersect(s1, s2, tol).sum;
}

inline Subspace intersect(const Subspace& s1, const Subspace& s2, const ToleranceConfig& tol) {
    detail::require_same_ambient(s1, s2, "intersect");
    return detail::sum_and_intersect(s1, s2, tol).intersection;
}

inline Subspace complement(const Subspace& s) {
    const Index n = s.ambient_dim();
    if (s.dim() == 0) return Subspace::full(n);
    if (s.dim() == n) return Subspace::zero(n);
    Eigen::HouseholderQR<ComplexMatrix> qr(s.basis());
    const ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(n, n);
    ComplexMatrix b = q.rightCols(n - s.dim());
    canonicalize_phases(b);
    return Subspace(n, std::move(b));
}

// {u : m u ∈ s}, as kernel((I - P_s) m). The rank cutoff is taken relative to
// ||m|| because the projected matrix can be pure rounding noise.
inline Subspace preimage(const ComplexMatrix& m, const Subspace& s, const ToleranceConfig& tol) {
    if (m.rows() != s.ambient_dim())
        throw DimensionError("preimage: matrix rows " + std::to_string(m.rows()) +
                             " do not match subspace ambient dimension " +
                             std::to_string(s.ambient_dim()));
    require_finite(m, "preimage");
    const ComplexMatrix r = m - s.project(m);
    return kernel(r, tol, norm2(m));
}

// Image of a subspace under a linear map.
inline Subspace image(const ComplexMatrix& m, const Subspace& s, const ToleranceConfig& tol) {
    if (m.cols() != s.ambient_dim()) throw DimensionError("image: column mismatch");
    return orthonormal_range(m * s.basis(), tol, norm2(m));
}

enum class Relation { equal, first_in_second, second_in_first, incomparable };

inline std::string_view to_string(Relation r) {
    switch (r) {
        case Relation::equal: return "equal";
        case Relation::first_in_second: return "first_in_second";
        case Relation::second_in_first: return "second_in_first";
        case Relation::incomparable: return "incomparable";
    }
    return "?";
}

struct SubspaceRelation {
    Relation relation = Relation::incomparable;
    // Largest principal angle between the two subspaces (taken from the smaller
    // one into the larger), in radians.
    double max_principal_angle = 0.0;
    double angle_first_to_second = 0.0;   // asin ||(I - P2) Q1||
    double angle_second_to_first = 0.0;   // asin ||(I - P1) Q2||

    bool first_in_second() const {
        return relation == Relation::equal || relation == Relation::first_in_second;
    }
    bool second_in_first() const {
        return relation == Relation::equal || relation == Relation::second_in_first;
    }
    bool equal() const { return relation == Relation::equal; }
};

inline double departure_angle(const Subspace& from, const Subspace& into) {
    if (from.dim() == 0) return 0.0;
    const double s = norm2(from.basis() - into.project(from.basis()));
    return std::asin(std::min(1.0, s));
}

inline SubspaceRelation subspace_relation(const Subspace& s1, const Subspace& s2,
                                          const ToleranceConfig& tol) {
    detail::require_same_ambient(s1, s2, "subspace_relation");
    SubspaceRelation out;
    out.angle_first_to_second = departure_angle(s1, s2);
    out.angle_second_to_first = departure_angle(s2, s1);
    const bool in12 = out.angle_first_to_second <= tol.angle_tol;
    const bool in21 = out.angle_second_to_first <= tol.angle_tol;
    out.relation = in12 && in21 ? Relation::equal
                   : in12       ? Relation::first_in_second
                   : in21       ? Relation::second_in_first
                                : Relation::incomparable;
    out.max_principal_angle =
        s1.dim() <= s2.dim() ? out.angle_first_to_second : out.angle_second_to_first;
    return out;
}

struct EigenPair {
    double value = 0.0;
    ComplexVector vector;
};

// Extremal eigenpairs of a Hermitian matrix (input is symmetrized first).
inline EigenPair min_eigen(const ComplexMatrix& h) {
    if (h.size() == 0) throw DimensionError("min_eigen: empty matrix");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(h));
    ComplexMatrix v = es.eigenvectors().col(0);
    canonicalize_phases(v);
    return {es.eigenvalues()(0), v.col(0)};
}

inline EigenPair max_eigen(const ComplexMatrix& h) {
    if (h.size() == 0) throw DimensionError("max_eigen: empty matrix");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(h));
    const Index last = h.rows() - 1;
    ComplexMatrix v = es.eigenvectors().col(last);
    canonicalize_phases(v);
    return {es.eigenvalues()(last), v.col(0)};
}

inline RealVector hermitian_eigenvalues(const ComplexMatrix& h) {
    if (h.size() == 0) return RealVector();
    return Eigen::SelfAdjointEigenSolver<ComplexMatrix>(hermitian_part(h), Eigen::EigenvaluesOnly)
        .eigenvalues();
}

}  // namespace accform
