#pragma once

// Problem ingestion and the central FormSystem value: the form a(u, v) = v* T0 u
// (linear in u, conjugate-linear in v) on V and the linking map J : V -> H,
// both in orthonormal coordinates.

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "accform/json_io.hpp"
#include "accform/numerics.hpp"

namespace accform {

class FormSystem {
public:
    FormSystem(ComplexMatrix t0, ComplexMatrix j, ToleranceConfig tol = {})
        : t0_(std::move(t0)), j_(std::move(j)), tol_(tol) {
        tol_.validate();
        if (t0_.rows() != t0_.cols()) throw DimensionError("T0 must be square");
        if (j_.cols() != t0_.rows())
            throw DimensionError("J has " + std::to_string(j_.cols()) +
                                 " columns but dim_V is " + std::to_string(t0_.rows()));
        require_finite(t0_, "T0");
        require_finite(j_, "J");
    }

    Index dim_V() const { return t0_.rows(); }
    Index dim_H() const { return j_.rows(); }
    const ComplexMatrix& T0() const { return t0_; }
    const ComplexMatrix& J() const { return j_; }
    const ToleranceConfig& tolerances() const { return tol_; }

    FormSystem with_tolerances(const ToleranceConfig& tol) const { return {t0_, j_, tol}; }

    // a(u, v)
    Complex form(const ComplexVector& u, const ComplexVector& v) const { return v.dot(t0_ * u); }

private:
    ComplexMatrix t0_;
    ComplexMatrix j_;
    ToleranceConfig tol_;
};

// T = T0 + J*J, the operator of b(u, v) = a(u, v) + <Ju, Jv>.
inline ComplexMatrix derived_T(const FormSystem& fs) { return fs.T0() + fs.J().adjoint() * fs.J(); }

inline ComplexMatrix adjoint_J(const FormSystem& fs) { return fs.J().adjoint(); }

enum class Verdict { holds, fails };

inline std::string_view to_string(Verdict v) { return v == Verdict::holds ? "holds" : "fails"; }

struct Certificate {
    std::string check;       // operation that produced it
    Verdict verdict = Verdict::holds;
    double margin = 0.0;     // meaning documented per check
    double tolerance = 0.0;  // threshold the verdict was decided against
    std::vector<ComplexVector> witness;  // non-empty exactly when the verdict fails
    std::string note;

    bool holds() const { return verdict == Verdict::holds; }

    static Certificate pass(std::string check, double margin, double tolerance,
                            std::string note = {}) {
        return {std::move(check), Verdict::holds, margin, tolerance, {}, std::move(note)};
    }

    static Certificate fail(std::string check, double margin, double tolerance,
                            std::vector<ComplexVector> witness, std::string note = {}) {
        if (witness.empty()) throw std::logic_error(check + ": failing certificate needs a witness");
        return {std::move(check), Verdict::fails, margin, tolerance, std::move(witness),
                std::move(note)};
    }

    static Certificate decide(std::string check, bool ok, double margin, double tolerance,
                              const ComplexVector& witness, std::string note = {}) {
        if (ok) return pass(std::move(check), margin, tolerance, std::move(note));
        return fail(std::move(check), margin, tolerance, {witness}, std::move(note));
    }
};

// Condition (I): Re a(u, u) >= 0, tested as lambda_min((T0 + T0*)/2) >= -residual_tol.
// margin = lambda_min; witness = its eigenvector.
inline Certificate check_condition_i(const FormSystem& fs) {
    const double tol = fs.tolerances().residual_tol;
    if (fs.dim_V() == 0) return Certificate::pass("condition_i", 0.0, tol);
    const EigenPair e = min_eigen(fs.T0());
    return Certificate::decide("condition_i", e.value >= -tol, e.value, tol, e.vector);
}

// Condition (II): J onto H, tested as numerical rank J = dim_H.
// margin = sigma_min(J) / sigma_max(J) over the dim_H singular values (0 if fewer exist).
inline Certificate check_condition_ii(const FormSystem& fs) {
    const ToleranceConfig& tol = fs.tolerances();
    if (fs.dim_H() == 0) return Certificate::pass("condition_ii", 1.0, tol.rank_rtol);
    const RealVector s = singular_values(fs.J());
    double margin = 0.0;
    if (s.size() == fs.dim_H() && s(0) > 0.0) margin = s(s.size() - 1) / s(0);
    const Subspace left_null = kernel(fs.J().adjoint(), tol);
    if (left_null.is_zero()) return Certificate::pass("condition_ii", margin, tol.rank_rtol);
    return Certificate::fail("condition_ii", margin, tol.rank_rtol, {left_null.basis().col(0)},
                             "J is not onto H; witness is orthogonal to the range of J");
}

struct RawProblem {
    Index dim_V = 0;
    Index dim_H = 0;
    ComplexMatrix T0_raw;
    ComplexMatrix J_raw;
    std::optional<ComplexMatrix> gram_V;
    std::optional<ComplexMatrix> gram_H;
    ToleranceConfig tolerances;
};

namespace detail {

inline void require_hermitian(const ComplexMatrix& g, double tol, const std::string& name) {
    const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
    if ((g - g.adjoint()).cwiseAbs().maxCoeff() > tol * scale)
        throw InputError(name + " is not Hermitian");
}

inline ToleranceConfig tolerances_from_json(const Json& j) {
    if (!j.is_object()) throw InputError("tolerances must be an object");
    reject_unknown_keys(j, {"rank_rtol", "angle_tol", "residual_tol"}, "tolerances");
    ToleranceConfig t;
    auto read = [&](const char* key, double& dst) {
        if (!j.contains(key)) return;
        if (!j.at(key).is_number()) throw InputError(std::string("tolerances.") + key + " must be a number");
        dst = j.at(key).get<double>();
    };
    read("rank_rtol", t.rank_rtol);
    read("angle_tol", t.angle_tol);
    read("residual_tol", t.residual_tol);
    t.validate();
    return t;
}

}  // namespace detail

inline void validate(const RawProblem& p) {
    p.tolerances.validate();
    if (p.T0_raw.rows() != p.dim_V || p.T0_raw.cols() != p.dim_V)
        throw DimensionError("T0 must be dim_V x dim_V");
    if (p.J_raw.rows() != p.dim_H || p.J_raw.cols() != p.dim_V)
        throw DimensionError("J must be dim_H x dim_V");
    require_finite(p.T0_raw, "T0");
    require_finite(p.J_raw, "J");
    const double tol = p.tolerances.residual_tol;
    if (p.gram_V) {
        if (p.gram_V->rows() != p.dim_V || p.gram_V->cols() != p.dim_V)
            throw DimensionError("gram_V must be dim_V x dim_V");
        require_finite(*p.gram_V, "gram_V");
        detail::require_hermitian(*p.gram_V, tol, "gram_V");
        if (hermitian_eigenvalues(*p.gram_V)(0) < -tol)
            throw InputError("gram_V has a negative eigenvalue");
    }
    if (p.gram_H) {
        if (p.gram_H->rows() != p.dim_H || p.gram_H->cols() != p.dim_H)
            throw DimensionError("gram_H must be dim_H x dim_H");
        require_finite(*p.gram_H, "gram_H");
        detail::require_hermitian(*p.gram_H, tol, "gram_H");
        if (hermitian_eigenvalues(*p.gram_H)(0) <= tol)
            throw InputError("gram_H is singular (not positive definite)");
    }
}

inline RawProblem problem_from_json(const Json& j) {
    if (!j.is_object()) throw InputError("problem: top level must be an object");
    reject_unknown_keys(j, {"dim_V", "dim_H", "T0", "J", "gram_V", "gram_H", "tolerances"},
                        "problem");
    RawProblem p;
    p.dim_V = count_from_json(j, "dim_V", "problem");
    p.dim_H = count_from_json(j, "dim_H", "problem");
    if (!j.contains("T0")) throw InputError("problem: missing key \"T0\"");
    if (!j.contains("J")) throw InputError("problem: missing key \"J\"");
    p.T0_raw = matrix_from_json(j.at("T0"), "T0", p.dim_V, p.dim_V);
    p.J_raw = matrix_from_json(j.at("J"), "J", p.dim_H, p.dim_V);
    if (j.contains("gram_V")) p.gram_V = matrix_from_json(j.at("gram_V"), "gram_V", p.dim_V, p.dim_V);
    if (j.contains("gram_H")) p.gram_H = matrix_from_json(j.at("gram_H"), "gram_H", p.dim_H, p.dim_H);
    if (j.contains("tolerances")) p.tolerances = detail::tolerances_from_json(j.at("tolerances"));
    validate(p);
    return p;
}

inline RawProblem load_problem(std::string_view text) {
    return problem_from_json(parse_json(text, "problem"));
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline Json tolerances_to_json(const ToleranceConfig& t) {
    return Json{{"rank_rtol", t.rank_rtol}, {"angle_tol", t.angle_tol}, {"residual_tol", t.residual_tol}};
}

inline Json problem_to_json(const RawProblem& p) {
    Json j;
    j["dim_V"] = p.dim_V;
    j["dim_H"] = p.dim_H;
    j["T0"] = matrix_to_json(p.T0_raw);
    j["J"] = matrix_to_json(p.J_raw);
    if (p.gram_V) j["gram_V"] = matrix_to_json(*p.gram_V);
    if (p.gram_H) j["gram_H"] = matrix_to_json(*p.gram_H);
    j["tolerances"] = tolerances_to_json(p.tolerances);
    return j;
}

inline RawProblem raw_problem(const FormSystem& fs) {
    return {fs.dim_V(), fs.dim_H(), fs.T0(), fs.J(), std::nullopt, std::nullopt, fs.tolerances()};
}

struct NormalizedProblem {
    FormSystem system;
    ComplexMatrix change_of_basis;    // raw V coordinates -> normalized V coordinates
    ComplexMatrix h_change_of_basis;  // raw H coordinates -> normalized H coordinates
    ComplexMatrix lift;               // normalized V -> raw V (right inverse of change_of_basis)
};

// Quotients V by the null space of gram_V (the finite-dimensional Hausdorff
// completion) and rescales both spaces to the standard inner product. The form
// and the linking map must vanish on that null space, otherwise they do not
// descend to the quotient.
inline NormalizedProblem normalize(const RawProblem& p) {
    validate(p);
    const ToleranceConfig& tol = p.tolerances;
    const Index n = p.dim_V;

    ComplexMatrix c = ComplexMatrix::Identity(n, n);
    ComplexMatrix lift = ComplexMatrix::Identity(n, n);
    if (p.gram_V) {
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(*p.gram_V));
        const RealVector& lam = es.eigenvalues();
        const double top = lam(n - 1);
        if (top <= 0.0) throw InputError("gram_V is zero: the quotient space is trivial");
        Index first = 0;
        while (first < n && lam(first) <= tol.rank_rtol * top) ++first;
        const Index k = n - first;
        const ComplexMatrix u = es.eigenvectors().rightCols(k);
        const RealVector s = lam.tail(k).cwiseSqrt();
        c = s.asDiagonal() * u.adjoint();
        lift = u * s.cwiseInverse().asDiagonal();
        if (first > 0) {
            const ComplexMatrix null = es.eigenvectors().leftCols(first);
            const double t_scale = std::max(1.0, norm2(p.T0_raw));
            const double j_scale = std::max(1.0, norm2(p.J_raw));
            if (norm2(p.T0_raw * null) > tol.residual_tol * t_scale ||
                norm2(null.adjoint() * p.T0_raw) > tol.residual_tol * t_scale)
                throw InputError("form does not vanish on the null space of gram_V (not continuous for the seminorm)");
            if (norm2(p.J_raw * null) > tol.residual_tol * j_scale)
                throw InputError("J does not vanish on the null space of gram_V (not continuous for the seminorm)");
        }
    }

    ComplexMatrix h = ComplexMatrix::Identity(p.dim_H, p.dim_H);
    if (p.gram_H) {
        Eigen::LLT<ComplexMatrix> llt(hermitian_part(*p.gram_H));
        if (llt.info() != Eigen::Success) throw InputError("gram_H is singular (not positive definite)");
        h = llt.matrixL().adjoint();
    }

    ComplexMatrix t0 = lift.adjoint() * p.T0_raw * lift;
    ComplexMatrix j = h * p.J_raw * lift;
    return {FormSystem(std::move(t0), std::move(j), tol), std::move(c), std::move(h), std::move(lift)};
}

}  // namespace accform
