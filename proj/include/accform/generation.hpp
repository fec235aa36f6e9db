#pragma once

// The Cayley transform J = (I - A)(I + A)^{-1} on rg(I + A), recovery of A from
// A(I + J) = I - J, and the form a(u, v) = <(I - J)u, (I + J)v> with link I + J
// whose associated operator is A again.

#include "accform/association.hpp"

namespace accform {

struct CayleyData {
    ComplexMatrix J_matrix;  // dim_H x dim_H, zero on the orthogonal complement of domain_of_J
    Subspace domain_of_J;    // rg(I + A)

    Index dim_H() const { return domain_of_J.ambient_dim(); }
};

namespace detail {

inline void require_accretive(const AssociatedOperator& a, const ToleranceConfig& tol, std::string_view op) {
    if (a.domain.dim() == 0) return;
    const double re_min = hermitian_eigenvalues(a.domain.basis().adjoint() * a.action)(0);
    if (re_min < -tol.residual_tol)
        throw PreconditionError(std::string(op) + ": operator is not accretive (lambda_min of Re A = " +
                                std::to_string(re_min) + ")");
}

// Given Y with independent columns and X, the map Y c -> X c as a matrix on H
// that vanishes off rg Y.
inline std::pair<Subspace, ComplexMatrix> graph_map(const ComplexMatrix& y, const ComplexMatrix& x,
                                                    const ToleranceConfig& tol, std::string_view op) {
    Subspace d = orthonormal_range(y, tol, 1.0);
    if (d.dim() != y.cols())
        throw NumericalDegeneracyError(std::string(op) + ": images are numerically dependent (rank " +
                                       std::to_string(d.dim()) + " of " + std::to_string(y.cols()) + ")");
    const ComplexMatrix c = d.basis().adjoint() * y;
    const ComplexMatrix on_basis = c.transpose().partialPivLu().solve(x.transpose()).transpose();
    return {std::move(d), on_basis};
}

}  // namespace detail

inline CayleyData cayley(const AssociatedOperator& a, const ToleranceConfig& tol = {}) {
    detail::require_accretive(a, tol, "cayley");
    const ComplexMatrix& q = a.domain.basis();
    auto [dom, k] = detail::graph_map(q + a.action, q - a.action, tol, "cayley");
    if (k.size() > 0) {
        const double s = singular_values(k)(0);
        if (s > 1.0 + tol.residual_tol)
            throw NumericalDegeneracyError("cayley: transform is not contractive (norm " + std::to_string(s) + ")");
    }
    const ComplexMatrix jm = k * dom.basis().adjoint();
    return {jm, std::move(dom)};
}

inline AssociatedOperator recover_operator(const CayleyData& c, const ToleranceConfig& tol = {}) {
    const ComplexMatrix& d = c.domain_of_J.basis();
    if (c.J_matrix.rows() != c.dim_H() || c.J_matrix.cols() != c.dim_H())
        throw DimensionError("recover_operator: J must be dim_H x dim_H");
    require_finite(c.J_matrix, "J");
    const ComplexMatrix k = c.J_matrix * d;
    auto [dom, action] = detail::graph_map(d + k, d - k, tol, "recover_operator (I + J singular)");
    // action holds A applied to the columns of dom's basis.
    return make_operator(std::move(dom), ComplexMatrix(action), tol);
}

// T0 = (I + J)*(I - J), link I + J; V is H with its own norm.
inline FormSystem generate_form(const AssociatedOperator& a, const ToleranceConfig& tol = {}) {
    if (!a.full_domain()) throw PreconditionError("generate_form: D(A) must be all of H");
    const CayleyData c = cayley(a, tol);
    const Index n = a.dim_H();
    const ComplexMatrix id = ComplexMatrix::Identity(n, n);
    const ComplexMatrix link = id + c.J_matrix;
    FormSystem fs((id + c.J_matrix).adjoint() * (id - c.J_matrix), link, tol);

    const double scale = tol.residual_tol * std::max(1.0, norm2(a.action));
    if (norm2(hermitian_part(fs.T0()) - (id - c.J_matrix.adjoint() * c.J_matrix)) > tol.residual_tol)
        throw NumericalDegeneracyError("generate_form: Re a(u, u) differs from |u|^2 - |Ju|^2");
    if (!check_condition_i(fs).holds() || !check_condition_ii(fs).holds())
        throw NumericalDegeneracyError("generate_form: produced form fails Condition (I) or (II)");
    if (!kernel(link, tol).is_zero()) throw NumericalDegeneracyError("generate_form: link I + J is not injective");
    const AssociationResult r = check_associated(fs);
    if (!r.op || !r.D_ja.is_full()) throw NumericalDegeneracyError("generate_form: D_j(a) is not all of V");
    if (norm2(r.op->matrix() - a.matrix()) > scale)
        throw NumericalDegeneracyError("generate_form: associated operator differs from A");
    return fs;
}

}  // namespace accform
