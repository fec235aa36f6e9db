#pragma once

// The associated operator of a form: D_j(a), V_j(a), the association test
// D_j(a) ∩ ker J ⊂ ker T, the operator A with a(u, v) = <A Ju, Jv>, the range
// test rg J* ⊂ rg T for m-accretivity, and the resolvent (I + A)^{-1} = J Z.

#include <optional>
#include <string>

#include "accform/model.hpp"

namespace accform {

struct AssociatedOperator {
    Subspace domain;       // D(A) in H, orthonormal basis Q
    ComplexMatrix action;  // A Q, dim_H x dim(domain)
    Certificate m_accretive;

    Index dim_H() const { return domain.ambient_dim(); }
    bool full_domain() const { return domain.is_full(); }
    // A on H, extended by zero on the orthogonal complement of its domain.
    ComplexMatrix matrix() const { return action * domain.basis().adjoint(); }
    // A x for x in the domain (the component orthogonal to the domain is ignored).
    ComplexMatrix apply(const ComplexMatrix& x) const { return action * (domain.basis().adjoint() * x); }
};

// Accretivity and m-accretivity straight from (domain, action):
// Re <Ax, x> >= -residual_tol |x|^2 on the domain, and I + A onto H.
inline AssociatedOperator make_operator(Subspace domain, ComplexMatrix action, const ToleranceConfig& tol) {
    if (action.rows() != domain.ambient_dim() || action.cols() != domain.dim())
        throw DimensionError("operator action does not match its domain");
    require_finite(action, "operator action");
    const ComplexMatrix& q = domain.basis();
    const double re_min = domain.dim() == 0 ? 0.0 : hermitian_eigenvalues(q.adjoint() * action)(0);
    const Index onto = numerical_rank(q + action, tol, 1.0);
    const bool accretive = re_min >= -tol.residual_tol;
    const bool surjective = onto == domain.ambient_dim();
    Certificate c;
    if (!accretive) {
        const EigenPair e = min_eigen(q.adjoint() * action);
        c = Certificate::fail("operator_m_accretive", re_min, tol.residual_tol, {q * e.vector},
                              "not accretive: Re <Ax, x> < 0 along the witness");
    } else if (!surjective) {
        const Subspace miss = complement(orthonormal_range(q + action, tol, 1.0));
        c = Certificate::fail("operator_m_accretive", re_min, tol.residual_tol, {miss.basis().col(0)},
                              "I + A is not onto H; witness is orthogonal to rg(I + A)");
    } else {
        c = Certificate::pass("operator_m_accretive", re_min, tol.residual_tol,
                              "margin is the smallest eigenvalue of the Hermitian part of A on its domain");
    }
    return {std::move(domain), std::move(action), std::move(c)};
}

// D_j(a) = T0^{-1}[rg J*], cross-checked against T^{-1}[rg J*].
inline Subspace domain_subspace(const FormSystem& fs) {
    const ToleranceConfig& tol = fs.tolerances();
    const Subspace rg_jstar = orthonormal_range(adjoint_J(fs), tol);
    const Subspace d0 = preimage(fs.T0(), rg_jstar, tol);
    const Subspace d1 = preimage(derived_T(fs), rg_jstar, tol);
    const SubspaceRelation rel = subspace_relation(d0, d1, tol);
    if (!rel.equal())
        throw NumericalDegeneracyError("domain_subspace: preimages under T0 and T disagree (angle " +
                                       std::to_string(rel.max_principal_angle) + ")");
    return d0;
}

// V_j(a) = (T* ker J)^⊥, cross-checked against T^{-1}[(ker J)^⊥].
inline Subspace vja_subspace(const FormSystem& fs) {
    const ToleranceConfig& tol = fs.tolerances();
    const ComplexMatrix t = derived_T(fs);
    const Subspace ker_j = kernel(fs.J(), tol);
    const Subspace v = complement(image(t.adjoint(), ker_j, tol));
    const Subspace check = preimage(t, complement(ker_j), tol);
    const SubspaceRelation rel = subspace_relation(v, check, tol);
    if (!rel.equal())
        throw NumericalDegeneracyError("vja_subspace: (T* ker J)^perp and T^{-1}[(ker J)^perp] disagree (angle " +
                                       std::to_string(rel.max_principal_angle) + ")");
    return v;
}

struct AssociationResult {
    Certificate associated;
    Subspace D_ja;
    Subspace V_ja;
    Subspace ker_T;
    Subspace ker_j;
    Subspace intersection;  // D_j(a) ∩ ker J
    std::optional<AssociatedOperator> op;
};

namespace detail {

inline void require_conditions_i_ii(const FormSystem& fs, std::string_view op) {
    const Certificate c1 = check_condition_i(fs);
    if (!c1.holds())
        throw PreconditionError(std::string(op) + ": Condition (I) fails (lambda_min of Re T0 = " +
                                std::to_string(c1.margin) + ")");
    const Certificate c2 = check_condition_ii(fs);
    if (!c2.holds()) throw PreconditionError(std::string(op) + ": Condition (II) fails (J is not onto H)");
}

// A from D_j(a): Q spans J D_j(a), U in D_j(a) with J U = Q, and A Q = F where
// J* F = T0 U. Well-definedness is re-verified with a second preimage U + W C,
// W spanning D_j(a) ∩ ker J.
inline AssociatedOperator build_from_domain(const FormSystem& fs, const Subspace& d, const Subspace& inter) {
    const ToleranceConfig& tol = fs.tolerances();
    const double jn = norm2(fs.J());
    const ComplexMatrix jd = fs.J() * d.basis();
    Subspace q = orthonormal_range(jd, tol, jn);
    const ComplexMatrix u = d.basis() * pseudo_solve(jd, q.basis(), tol, jn);
    const ComplexMatrix jstar = fs.J().adjoint();
    const ComplexMatrix t0u = fs.T0() * u;
    ComplexMatrix f = pseudo_solve(jstar, t0u, tol, jn);

    const double scale = std::max(1.0, norm2(t0u));
    const double res = norm2(jstar * f - t0u);
    if (res > tol.residual_tol * scale)
        throw NumericalDegeneracyError("build_operator: J* f = T0 u has residual " + std::to_string(res) +
                                       " (association mis-detected)");
    const ComplexMatrix tu = derived_T(fs) * u;
    if (norm2(jstar * (q.basis() + f) - tu) > tol.residual_tol * std::max(1.0, norm2(tu)))
        throw NumericalDegeneracyError("build_operator: J*(I + A) J u = T u fails");

    if (inter.dim() > 0 && q.dim() > 0) {
        ComplexMatrix c(inter.dim(), q.dim());
        for (Index i = 0; i < c.rows(); ++i)
            for (Index k = 0; k < c.cols(); ++k) c(i, k) = 1.0 / static_cast<double>(1 + i + k);
        const ComplexMatrix u2 = u + inter.basis() * c;
        const ComplexMatrix f2 = pseudo_solve(jstar, fs.T0() * u2, tol, jn);
        if (norm2(f2 - f) > tol.residual_tol * std::max(1.0, norm2(f)))
            throw NumericalDegeneracyError("build_operator: two preimages of the same domain vectors give different A");
    }
    return make_operator(std::move(q), std::move(f), tol);
}

}  // namespace detail

inline AssociationResult check_associated(const FormSystem& fs) {
    detail::require_conditions_i_ii(fs, "check_associated");
    const ToleranceConfig& tol = fs.tolerances();
    AssociationResult r;
    r.D_ja = domain_subspace(fs);
    r.V_ja = vja_subspace(fs);
    r.ker_T = kernel(derived_T(fs), tol);
    r.ker_j = kernel(fs.J(), tol);
    r.intersection = intersect(r.D_ja, r.ker_j, tol);
    if (!subspace_relation(r.ker_T, r.intersection, tol).first_in_second())
        throw NumericalDegeneracyError("check_associated: ker T is not inside D_j(a) ∩ ker J");

    const SubspaceRelation rel = subspace_relation(r.intersection, r.ker_T, tol);
    const double margin = tol.angle_tol - rel.angle_first_to_second;
    if (rel.first_in_second()) {
        r.associated = Certificate::pass("check_associated", margin, tol.angle_tol,
                                         "D_j(a) ∩ ker J lies in ker T; margin is angle_tol minus the departure angle");
        r.op = detail::build_from_domain(fs, r.D_ja, r.intersection);
    } else {
        const ComplexMatrix off = r.intersection.basis() - r.ker_T.project(r.intersection.basis());
        Index best = 0;
        for (Index k = 1; k < off.cols(); ++k)
            if (off.col(k).norm() > off.col(best).norm()) best = k;
        ComplexMatrix w = off.col(best) / off.col(best).norm();
        canonicalize_phases(w);
        r.associated = Certificate::fail("check_associated", margin, tol.angle_tol, {w.col(0)},
                                         "witness lies in D_j(a) ∩ ker J but not in ker T");
    }
    return r;
}

inline AssociatedOperator build_operator(const FormSystem& fs) {
    AssociationResult r = check_associated(fs);
    if (!r.op) throw PreconditionError("build_operator: (a, J) is not associated with an operator");
    return std::move(*r.op);
}

// rg J* ⊂ rg T, cross-checked against surjectivity of I + A.
inline Certificate check_m_accretive(const FormSystem& fs, const AssociationResult& assoc) {
    if (!assoc.op) throw PreconditionError("check_m_accretive: (a, J) is not associated with an operator");
    const ToleranceConfig& tol = fs.tolerances();
    const Subspace rg_jstar = orthonormal_range(adjoint_J(fs), tol);
    const Subspace rg_t = orthonormal_range(derived_T(fs), tol);
    const SubspaceRelation rel = subspace_relation(rg_jstar, rg_t, tol);
    const bool range_ok = rel.first_in_second();
    if (range_ok != assoc.op->m_accretive.holds())
        throw NumericalDegeneracyError(std::string("check_m_accretive: range test says ") +
                                       (range_ok ? "holds" : "fails") +
                                       " but the rank of I + A disagrees");
    const double margin = tol.angle_tol - rel.angle_first_to_second;
    if (range_ok)
        return Certificate::pass("check_m_accretive", margin, tol.angle_tol,
                                 "rg J* ⊂ rg T; margin is angle_tol minus the departure angle");
    const ComplexMatrix off = rg_jstar.basis() - rg_t.project(rg_jstar.basis());
    Index best = 0;
    for (Index k = 1; k < off.cols(); ++k)
        if (off.col(k).norm() > off.col(best).norm()) best = k;
    return Certificate::fail("check_m_accretive", margin, tol.angle_tol,
                             {off.col(best) / off.col(best).norm()}, "witness in rg J* outside rg T");
}

inline Certificate check_m_accretive(const FormSystem& fs) { return check_m_accretive(fs, check_associated(fs)); }

struct Resolvent {
    ComplexMatrix R;  // (I + A)^{-1} = J Z on H
    ComplexMatrix Z;  // T Z = J*, columns in (ker T)^⊥
    double residual = 0.0;  // |R + A R - I|
};

inline Resolvent resolvent_factor(const FormSystem& fs, const AssociationResult& assoc) {
    const Certificate m = check_m_accretive(fs, assoc);
    if (!m.holds()) throw PreconditionError("resolvent: the associated operator is not m-accretive");
    const ToleranceConfig& tol = fs.tolerances();
    const ComplexMatrix t = derived_T(fs);
    const ComplexMatrix w = complement(assoc.ker_T).basis();
    const ComplexMatrix jstar = adjoint_J(fs);
    const ComplexMatrix tw = t * w;
    Resolvent out;
    out.Z = w * pseudo_solve(tw, jstar, tol, norm2(t));
    const double zres = norm2(t * out.Z - jstar);
    if (zres > tol.residual_tol * std::max(1.0, norm2(jstar)))
        throw NumericalDegeneracyError("resolvent: T Z = J* has residual " + std::to_string(zres));
    out.R = fs.J() * out.Z;
    const AssociatedOperator& a = *assoc.op;
    const Index n = fs.dim_H();
    const double off_domain = norm2(out.R - a.domain.project(out.R));
    out.residual = norm2(out.R + a.apply(out.R) - ComplexMatrix::Identity(n, n));
    if (std::max(off_domain, out.residual) > tol.residual_tol * std::max(1.0, norm2(out.R)))
        throw NumericalDegeneracyError("resolvent: (I + A) J Z = I fails (residual " +
                                       std::to_string(std::max(off_domain, out.residual)) + ")");
    return out;
}

inline ComplexMatrix resolvent_at_one(const FormSystem& fs) {
    return resolvent_factor(fs, check_associated(fs)).R;
}

// {f : J* f ∈ T(D_j(a))}
inline Subspace range_of_IplusA(const FormSystem& fs, const AssociationResult& assoc) {
    if (!assoc.op) throw PreconditionError("range_of_IplusA: (a, J) is not associated with an operator");
    const ToleranceConfig& tol = fs.tolerances();
    const ComplexMatrix t = derived_T(fs);
    const Subspace td = orthonormal_range(t * assoc.D_ja.basis(), tol, norm2(t));
    return preimage(adjoint_J(fs), td, tol);
}

inline Subspace range_of_IplusA(const FormSystem& fs) { return range_of_IplusA(fs, check_associated(fs)); }

}  // namespace accform
