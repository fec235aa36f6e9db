#pragma once

// Named example systems with the facts expected of them. The differential
// examples are discretized on uniform grids with Gram matrices for the V and H
// inner products and then normalized; each fact is re-evaluated by run_case.

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "accform/dynamics.hpp"
#include "accform/structure.hpp"

namespace accform {

enum class Provenance { published, derived, trivial };

inline std::string_view to_string(Provenance p) {
    switch (p) {
        case Provenance::published: return "published";
        case Provenance::derived: return "derived";
        case Provenance::trivial: return "trivial";
    }
    return "?";
}

struct FactOutcome {
    bool holds = false;
    double value = 0.0;  // the measured quantity (a residual, a dimension, a norm)
    std::string detail;
};

struct GalleryCase;

struct ExpectedFact {
    std::string id;
    std::string expected;
    Provenance provenance = Provenance::derived;
    std::function<FactOutcome(const GalleryCase&)> check;
};

struct GalleryCase {
    std::string name;
    Json parameters = Json::object();
    FormSystem system;
    std::optional<NormalizedProblem> discretization;  // set when built from Gram data
    RealVector grid;                                  // node positions of discretized cases
    std::vector<ExpectedFact> expected_facts;
};

struct FactResult {
    std::string id;
    std::string expected;
    Provenance provenance;
    bool pass = false;
    double value = 0.0;
    std::string detail;
};

struct GalleryReport {
    std::string name;
    Json parameters;
    std::vector<FactResult> facts;

    bool all_pass() const {
        for (const auto& f : facts)
            if (!f.pass) return false;
        return true;
    }
};

inline const std::vector<std::string>& gallery_names() {
    static const std::vector<std::string> names{
        "multival",   "zero_form_rank1", "welldef_nonmacc_truncated", "gen_inverse",     "signdiff",
        "deriv_halfline", "deriv_line",  "invar_block",               "kerT_nontrivial", "dirichlet_laplacian"};
    return names;
}

namespace detail {

inline Index int_param(const Json& p, const char* key, Index fallback, Index min) {
    if (!p.contains(key)) return fallback;
    const Json& v = p.at(key);
    if (!v.is_number_integer() || v.get<long long>() < min)
        throw InputError(std::string("parameter ") + key + " must be an integer >= " + std::to_string(min));
    return static_cast<Index>(v.get<long long>());
}

inline double real_param(const Json& p, const char* key, double fallback) {
    if (!p.contains(key)) return fallback;
    const Json& v = p.at(key);
    if (!v.is_number() || !std::isfinite(v.get<double>()))
        throw InputError(std::string("parameter ") + key + " must be a finite number");
    return v.get<double>();
}

// Entries may be plain numbers or [re, im] pairs.
inline ComplexMatrix matrix_param(const Json& p, const char* key, ComplexMatrix fallback) {
    if (!p.contains(key)) return fallback;
    Json m = p.at(key);
    if (m.is_array())
        for (auto& row : m)
            if (row.is_array())
                for (auto& x : row)
                    if (x.is_number()) x = Json::array({x.get<double>(), 0.0});
    return matrix_from_json(m, std::string("parameter ") + key);
}

inline FactOutcome outcome(bool holds, double value, std::string detail = {}) {
    return {holds, value, std::move(detail)};
}

inline FactOutcome certificate_outcome(const Certificate& c, bool expect_holds) {
    return {c.holds() == expect_holds, c.margin, c.check + " " + std::string(to_string(c.verdict))};
}

inline ExpectedFact fact(std::string id, std::string expected, Provenance p,
                         std::function<FactOutcome(const GalleryCase&)> f) {
    return {std::move(id), std::move(expected), p, std::move(f)};
}

inline ExpectedFact associated_fact(bool expect, Provenance p) {
    return fact("associated", expect ? "holds" : "fails", p, [expect](const GalleryCase& c) {
        return certificate_outcome(check_associated(c.system).associated, expect);
    });
}

inline ExpectedFact m_accretive_fact(Provenance p) {
    return fact("m_accretive", "holds", p,
                [](const GalleryCase& c) { return certificate_outcome(check_m_accretive(c.system), true); });
}

inline ExpectedFact accretive_fact(Provenance p) {
    return fact("condition_i", "holds", p,
                [](const GalleryCase& c) { return certificate_outcome(check_condition_i(c.system), true); });
}

inline ExpectedFact operator_fact(std::string id, std::string expected, Provenance p, ComplexMatrix target,
                                  double rtol) {
    return fact(std::move(id), std::move(expected), p, [target = std::move(target), rtol](const GalleryCase& c) {
        const AssociatedOperator a = build_operator(c.system);
        if (!a.full_domain()) return outcome(false, 0.0, "operator is not everywhere defined");
        const double r = norm2(a.matrix() - target);
        return outcome(r <= rtol * std::max(1.0, norm2(target)), r, "|A - expected|");
    });
}

inline ExpectedFact orthant_fact(Provenance p) {
    return fact("orthant_invariant", "holds", p, [](const GalleryCase& c) {
        const AssociatedOperator a = build_operator(c.system);
        InvarianceOptions opt;
        opt.lambdas = InvarianceOptions::default_grid();
        opt.ts = InvarianceOptions::default_grid();
        const InvarianceReport r = invariance_check(a, ProjectionSpec::orthant(a.dim_H()), opt, c.system.tolerances());
        const bool ok = r.agree && r.semigroup.certificate.holds() && r.resolvent.certificate.holds() &&
                        r.generator.certificate.holds();
        return outcome(ok, std::min({r.semigroup.worst, r.resolvent.worst, r.generator.worst}),
                       "generator evidence " + std::string(to_string(r.generator.evidence)));
    });
}

inline ComplexMatrix basis_span(Index n, std::initializer_list<Index> idx) {
    ComplexMatrix m = ComplexMatrix::Zero(n, static_cast<Index>(idx.size()));
    Index k = 0;
    for (Index i : idx) m(i, k++) = 1.0;
    return m;
}

inline void require_conditions(const GalleryCase& c) {
    if (!check_condition_i(c.system).holds() || !check_condition_ii(c.system).holds())
        throw InputError(c.name + ": parameters give a form that fails Condition (I) or (II)");
}

// Node positions a + k h for k = 1..n.
inline RealVector nodes(double a, double h, Index n) {
    RealVector x(n);
    for (Index k = 0; k < n; ++k) x(k) = a + static_cast<double>(k + 1) * h;
    return x;
}

inline GalleryCase from_raw(std::string name, Json params, const RawProblem& raw, RealVector grid) {
    NormalizedProblem np = normalize(raw);
    FormSystem fs = np.system;
    return {std::move(name), std::move(params), std::move(fs), std::move(np), std::move(grid), {}};
}

// --- individual cases -------------------------------------------------------

inline GalleryCase make_multival(const ToleranceConfig& tol) {
    ComplexMatrix t0(2, 2);
    t0 << 0.0, 1.0, -1.0, 0.0;
    GalleryCase c{"multival", Json::object(), FormSystem(t0, basis_span(2, {1}).adjoint(), tol), {}, {}, {}};
    c.expected_facts = {
        fact("T_invertible", "holds", Provenance::published,
             [](const GalleryCase& g) { return certificate_outcome(check_condition_iii(g.system).certificate, true); }),
        associated_fact(false, Provenance::published),
        fact("D_ja_equals_ker_j", "holds", Provenance::published, [](const GalleryCase& g) {
            const auto r = subspace_relation(domain_subspace(g.system), kernel(g.system.J(), g.system.tolerances()),
                                             g.system.tolerances());
            return outcome(r.equal(), r.max_principal_angle);
        }),
    };
    return c;
}

inline GalleryCase make_zero_form_rank1(const ToleranceConfig& tol) {
    GalleryCase c{"zero_form_rank1", Json::object(),
                  FormSystem(ComplexMatrix::Zero(2, 2), basis_span(2, {0}).adjoint(), tol), {}, {}, {}};
    c.expected_facts = {
        associated_fact(true, Provenance::published),
        m_accretive_fact(Provenance::published),
        operator_fact("A", "0", Provenance::published, ComplexMatrix::Zero(1, 1), 1e-12),
        fact("ker_T_equals_ker_j_nonzero", "holds", Provenance::published, [](const GalleryCase& g) {
            const auto& tol = g.system.tolerances();
            const Subspace kt = kernel(derived_T(g.system), tol);
            const auto r = subspace_relation(kt, kernel(g.system.J(), tol), tol);
            return outcome(r.equal() && !kt.is_zero(), static_cast<double>(kt.dim()), "dim ker T");
        }),
    };
    return c;
}

inline GalleryCase make_welldef_truncated(const Json& params, const ToleranceConfig& tol) {
    reject_unknown_keys(params, {"N"}, "welldef_nonmacc_truncated");
    const Index n = int_param(params, "N", 3, 2);
    ComplexMatrix t0 = ComplexMatrix::Zero(n, n);
    t0(1, 0) = -1.0;  // T0 e1 = -e2
    t0(0, 1) = 1.0;   // T0 e2 = e1
    ComplexMatrix j = ComplexMatrix::Zero(1, n);
    j(0, 1) = 1.0;
    for (Index k = 3; k <= n; ++k) {
        t0(k - 1, k - 1) = 1.0 / static_cast<double>(k);
        j(0, k - 1) = 1.0 / static_cast<double>(k - 1);
    }
    GalleryCase c{"welldef_nonmacc_truncated", Json{{"N", n}}, FormSystem(t0, j, tol), {}, {}, {}};
    c.expected_facts = {
        associated_fact(true, Provenance::derived),
        m_accretive_fact(Provenance::derived),
        fact("inverse_T_norm", "recorded", Provenance::derived, [](const GalleryCase& g) {
            const double mu = check_condition_iii(g.system).mu;
            return outcome(true, mu > 0.0 ? 1.0 / mu : std::numeric_limits<double>::infinity(), "|T^{-1}|");
        }),
        fact("restrict_e1_e2_is_multival", "holds", Provenance::published, [](const GalleryCase& g) {
            const Index dim = g.system.dim_V();
            const FormSystem r = compress(g.system, basis_span(dim, {0, 1}));
            const bool assoc = check_associated(r).associated.holds();
            return outcome(!assoc, assoc ? 1.0 : 0.0, "restricted pair is associated: " + std::string(assoc ? "yes" : "no"));
        }),
    };
    if (n >= 3)
        c.expected_facts.push_back(fact("restrict_e3_operator", "4/3", Provenance::published, [](const GalleryCase& g) {
            const FormSystem r = restrict(g.system, Subspace(g.system.dim_V(), basis_span(g.system.dim_V(), {2})));
            const AssociatedOperator a = build_operator(r);
            const double v = a.matrix()(0, 0).real();
            return outcome(std::abs(a.matrix()(0, 0) - 4.0 / 3.0) <= 1e-12, v, "A on span{e3}");
        }));
    return c;
}

inline GalleryCase make_gen_inverse(const Json& params, const ToleranceConfig& tol) {
    reject_unknown_keys(params, {"B"}, "gen_inverse");
    const ComplexMatrix b = matrix_param(params, "B", ComplexMatrix::Identity(1, 1));
    if (b.rows() != b.cols() || b.rows() == 0) throw InputError("gen_inverse: B must be a non-empty square matrix");
    const Index n = b.rows();
    const ComplexMatrix id = ComplexMatrix::Identity(n, n);
    ComplexMatrix t0 = ComplexMatrix::Zero(2 * n, 2 * n);
    t0.topLeftCorner(n, n) = b;
    t0.topRightCorner(n, n) = -id;
    t0.bottomLeftCorner(n, n) = id;
    ComplexMatrix j = ComplexMatrix::Zero(n, 2 * n);
    j.rightCols(n) = id;
    GalleryCase c{"gen_inverse", Json{{"B", matrix_to_json(b)}}, FormSystem(t0, j, tol), {}, {}, {}};
    require_conditions(c);

    const bool injective = kernel(b, c.system.tolerances()).is_zero();
    c.expected_facts = {
        fact("T_invertible", "holds", Provenance::published,
             [](const GalleryCase& g) { return certificate_outcome(check_condition_iii(g.system).certificate, true); }),
        fact("T_inverse_block_formula", "holds", Provenance::published, [b, n, id](const GalleryCase& g) {
            ComplexMatrix blocks(2 * n, 2 * n);
            blocks << id, id, -id, b;
            const ComplexMatrix inv = (id + b).partialPivLu().inverse();
            ComplexMatrix expected(2 * n, 2 * n);
            // (I + B)^{-1} multiplies both block rows.
            expected.topRows(n) = inv * blocks.topRows(n);
            expected.bottomRows(n) = inv * blocks.bottomRows(n);
            const double r = norm2(derived_T(g.system) * expected - ComplexMatrix::Identity(2 * n, 2 * n));
            return outcome(r <= 1e-10 * std::max(1.0, norm2(expected)), r, "|T X - I|");
        }),
        fact("V_ja_is_graph_B", "holds", Provenance::published, [b, id](const GalleryCase& g) {
            ComplexMatrix graph(2 * b.rows(), b.rows());
            graph << id, b;
            const auto& tol = g.system.tolerances();
            const auto r = subspace_relation(vja_subspace(g.system), orthonormal_range(graph, tol, 1.0), tol);
            return outcome(r.equal(), r.max_principal_angle);
        }),
        associated_fact(injective, Provenance::published),
    };
    if (injective)
        c.expected_facts.push_back(
            operator_fact("A_equals_B_inverse", "B^{-1}", Provenance::published, b.partialPivLu().inverse(), 1e-10));
    return c;
}

// Edge signs sign(midpoint) on the uniform grid of n_cells cells over (a, b).
inline RealVector edge_signs(double a, double b, Index n_cells) {
    const double h = (b - a) / static_cast<double>(n_cells);
    RealVector s(n_cells);
    for (Index e = 0; e < n_cells; ++e) {
        const double m = a + (static_cast<double>(e) + 0.5) * h;
        s(e) = static_cast<double>((m > 0.0) - (m < 0.0));
    }
    return s;
}

// Forward differences (u_{e+1} - u_e) / h over all edges with u_0 = u_n = 0;
// n_cells x (n_cells - 1).
inline RealMatrix dirichlet_gradient(Index n_cells, double h) {
    RealMatrix d = RealMatrix::Zero(n_cells, n_cells - 1);
    for (Index e = 0; e < n_cells; ++e) {
        if (e < n_cells - 1) d(e, e) = 1.0 / h;
        if (e > 0) d(e, e - 1) = -1.0 / h;
    }
    return d;
}

}  // namespace detail

// Discrete signdiff on (a, b) with N uniform cells (N - 1 interior nodes).
// The discrete radical is nontrivial exactly when every edge sign is nonzero
// and the signs sum to zero; the kernel vector is then h * cumsum(sign).
inline GalleryCase signdiff(Index n_cells, double a, double b, const ToleranceConfig& tol = {}) {
    if (n_cells < 2) throw InputError("signdiff: N must be at least 2");
    if (!(a < b)) throw InputError("signdiff: need a < b");
    const Index n = n_cells - 1;
    const double h = (b - a) / static_cast<double>(n_cells);
    const RealMatrix d = detail::dirichlet_gradient(n_cells, h);
    const RealVector s = detail::edge_signs(a, b, n_cells);

    RawProblem raw;
    raw.dim_V = n;
    raw.dim_H = n;
    raw.T0_raw = Complex(0.0, h) * (d.transpose() * s.asDiagonal() * d).cast<Complex>();
    raw.J_raw = ComplexMatrix::Identity(n, n);
    raw.gram_V = (h * d.transpose() * d).cast<Complex>();
    raw.gram_H = h * ComplexMatrix::Identity(n, n);
    raw.tolerances = tol;
    GalleryCase c = detail::from_raw("signdiff", Json{{"N", n_cells}, {"a", a}, {"b", b}}, raw,
                                     detail::nodes(a, h, n));
    detail::require_conditions(c);

    const bool balanced = (s.array() != 0.0).all() && std::abs(s.sum()) < 0.5;
    RealVector profile(n);  // u_k = h * sum_{e < k} s_e
    double acc = 0.0;
    for (Index k = 0; k < n; ++k) profile(k) = (acc += h * s(k));

    using detail::fact;
    using detail::outcome;
    c.expected_facts = {
        fact("conservative", "Re a = 0", Provenance::published, [](const GalleryCase& g) {
            const double r = norm2(hermitian_part(g.system.T0()));
            return outcome(r <= 1e-12, r, "|Re T0|");
        }),
        detail::associated_fact(true, Provenance::published),
        detail::m_accretive_fact(Provenance::published),
        fact("iA_hermitian", "holds", Provenance::published, [](const GalleryCase& g) {
            const ComplexMatrix ia = Complex(0.0, 1.0) * build_operator(g.system).matrix();
            const double r = norm2(ia - ia.adjoint());
            return outcome(r <= 1e-9, r, "|iA - (iA)*|");
        }),
        fact("radical_dim", balanced ? "1" : "0", Provenance::derived, [balanced](const GalleryCase& g) {
            const Index k = radical(g.system).dim();
            return outcome(k == (balanced ? 1 : 0), static_cast<double>(k));
        }),
        fact("sigma_min_T", "recorded", Provenance::derived, [](const GalleryCase& g) {
            return outcome(true, check_condition_iii(g.system).mu, "trend data; no verdict");
        }),
    };
    if (balanced)
        c.expected_facts.push_back(
            fact("radical_contains_profile", "holds", Provenance::published, [profile](const GalleryCase& g) {
                const ComplexVector v = g.discretization->change_of_basis * profile.cast<Complex>();
                const double r = (g.system.T0() * v).norm() / v.norm();
                return outcome(r <= 1e-10, r, "|T0 u| / |u| for the discrete hat profile");
            }));
    return c;
}

// sigma_min(T) of the discrete signdiff system for each N.
inline std::vector<std::pair<Index, double>> signdiff_sigma_trend(double a, double b, const std::vector<Index>& ns) {
    std::vector<std::pair<Index, double>> out;
    for (Index n : ns) out.emplace_back(n, check_condition_iii(signdiff(n, a, b).system).mu);
    return out;
}

// Upwind discretization of a(u, v) = -int u' conj(v) on (0, L), u(0) = 0 and
// zero inflow at L. Nodes kh, k = 1..N; V carries the discrete H^1 norm.
inline GalleryCase deriv_halfline(Index n, double len, const ToleranceConfig& tol = {}) {
    if (n < 2) throw InputError("deriv_halfline: N must be at least 2");
    if (!(len > 0.0)) throw InputError("deriv_halfline: L must be positive");
    const double h = len / static_cast<double>(n);
    RealMatrix back = RealMatrix::Zero(n, n);  // (u_k - u_{k-1}) / h with u_0 = 0
    RealMatrix fwd = RealMatrix::Zero(n, n);   // (u_{k+1} - u_k) / h with u_{N+1} = 0
    for (Index k = 0; k < n; ++k) {
        back(k, k) = 1.0 / h;
        fwd(k, k) = -1.0 / h;
        if (k > 0) back(k, k - 1) = -1.0 / h;
        if (k + 1 < n) fwd(k, k + 1) = 1.0 / h;
    }
    RawProblem raw;
    raw.dim_V = n;
    raw.dim_H = n;
    raw.T0_raw = (-h * fwd).cast<Complex>();
    raw.J_raw = ComplexMatrix::Identity(n, n);
    raw.gram_V = (h * (back.transpose() * back + RealMatrix::Identity(n, n))).cast<Complex>();
    raw.gram_H = h * ComplexMatrix::Identity(n, n);
    raw.tolerances = tol;
    GalleryCase c = detail::from_raw("deriv_halfline", Json{{"N", n}, {"L", len}}, raw, detail::nodes(0.0, h, n));
    detail::require_conditions(c);

    // u(x) = sin(pi x / 2L): u(0) = 0, u(L) = 1.
    RealVector probe(n);
    for (Index k = 0; k < n; ++k) probe(k) = std::sin(std::numbers::pi * c.grid(k) / (2.0 * len));
    c.expected_facts = {
        detail::accretive_fact(Provenance::published),
        detail::associated_fact(true, Provenance::derived),
        detail::m_accretive_fact(Provenance::derived),
        detail::fact("boundary_residual", "recorded", Provenance::derived, [probe](const GalleryCase& g) {
            const ComplexVector u = g.discretization->change_of_basis * probe.cast<Complex>();
            const double re = u.dot(g.system.T0() * u).real();
            return detail::outcome(true, re - 0.5, "Re a(u, u) - |u(L)|^2 / 2 for sin(pi x / 2L)");
        }),
    };
    return c;
}

// Upwind a(u, v) = int u' conj(v) on the periodic grid of N nodes over (-L, L).
inline GalleryCase deriv_line(Index n, double len, const ToleranceConfig& tol = {}) {
    if (n < 3) throw InputError("deriv_line: N must be at least 3");
    if (!(len > 0.0)) throw InputError("deriv_line: L must be positive");
    const double h = 2.0 * len / static_cast<double>(n);
    RealMatrix back = RealMatrix::Zero(n, n);  // (u_k - u_{k-1}) / h, indices mod N
    for (Index k = 0; k < n; ++k) {
        back(k, k) = 1.0 / h;
        back(k, (k + n - 1) % n) = -1.0 / h;
    }
    RawProblem raw;
    raw.dim_V = n;
    raw.dim_H = n;
    raw.T0_raw = (h * back).cast<Complex>();
    raw.J_raw = ComplexMatrix::Identity(n, n);
    raw.gram_V = (h * (back.transpose() * back + RealMatrix::Identity(n, n))).cast<Complex>();
    raw.gram_H = h * ComplexMatrix::Identity(n, n);
    raw.tolerances = tol;
    GalleryCase c = detail::from_raw("deriv_line", Json{{"N", n}, {"L", len}}, raw, detail::nodes(-len - h, h, n));
    detail::require_conditions(c);
    c.expected_facts = {
        detail::accretive_fact(Provenance::published),
        detail::associated_fact(true, Provenance::published),
        detail::m_accretive_fact(Provenance::published),
        detail::fact("D_ja_full", "holds", Provenance::published, [](const GalleryCase& g) {
            const Subspace d = domain_subspace(g.system);
            return detail::outcome(d.is_full(), static_cast<double>(d.dim()));
        }),
        detail::orthant_fact(Provenance::derived),
    };
    return c;
}

// V = H1 x D(R) with the graph norm of R, j(u1, u2) = (u1, u1 + u2) and
// a(u, v) = <[[0, -R], [R^{-1}, R^{-1}]] u, v>_V for R = diag(r), r_i >= 1.
inline GalleryCase invar_block(const RealVector& r, const ToleranceConfig& tol = {}) {
    const Index k = r.size();
    if (k == 0) throw InputError("invar_block: R must be non-empty");
    if ((r.array() < 1.0).any()) throw InputError("invar_block: entries of R must be >= 1");
    const ComplexMatrix id = ComplexMatrix::Identity(k, k);
    const ComplexMatrix rr = r.cast<Complex>().asDiagonal();
    const ComplexMatrix rinv = r.cwiseInverse().cast<Complex>().asDiagonal();
    ComplexMatrix m = ComplexMatrix::Zero(2 * k, 2 * k);
    m.topRightCorner(k, k) = -rr;
    m.bottomLeftCorner(k, k) = rinv;
    m.bottomRightCorner(k, k) = rinv;
    ComplexMatrix gram = ComplexMatrix::Zero(2 * k, 2 * k);
    gram.topLeftCorner(k, k) = id;
    gram.bottomRightCorner(k, k) = rr * rr;
    ComplexMatrix j = ComplexMatrix::Zero(2 * k, 2 * k);
    j.topLeftCorner(k, k) = id;
    j.bottomLeftCorner(k, k) = id;
    j.bottomRightCorner(k, k) = id;

    RawProblem raw;
    raw.dim_V = 2 * k;
    raw.dim_H = 2 * k;
    raw.T0_raw = gram * m;
    raw.J_raw = j;
    raw.gram_V = gram;
    raw.tolerances = tol;
    Json rj = Json::array();
    for (Index i = 0; i < k; ++i) rj.push_back(r(i));
    GalleryCase c = detail::from_raw("invar_block", Json{{"R", rj}}, raw, RealVector());
    detail::require_conditions(c);

    ComplexMatrix a = ComplexMatrix::Zero(2 * k, 2 * k);
    a.topLeftCorner(k, k) = rr;
    a.topRightCorner(k, k) = -2.0 * rr;
    a.bottomRightCorner(k, k) = rr;
    using detail::fact;
    using detail::outcome;
    c.expected_facts = {
        fact("condition_iii", "holds", Provenance::published,
             [](const GalleryCase& g) { return detail::certificate_outcome(check_condition_iii(g.system).certificate, true); }),
        detail::operator_fact("A", "[[R, -2R], [0, R]]", Provenance::published, a, 1e-10),
        fact("resolvent_formula", "holds", Provenance::published, [rr, id, k](const GalleryCase& g) {
            const AssociatedOperator op = build_operator(g.system);
            double worst = 0.0;
            for (double lambda : {1.0, 2.0}) {
                const ComplexMatrix inv = (lambda * id + rr).inverse();
                ComplexMatrix expected = ComplexMatrix::Zero(2 * k, 2 * k);
                expected.topLeftCorner(k, k) = inv;
                expected.topRightCorner(k, k) = 2.0 * inv * rr * inv;
                expected.bottomRightCorner(k, k) = inv;
                worst = std::max(worst, norm2(resolvent_at(op, lambda) - expected));
            }
            return outcome(worst <= 1e-10, worst, "max over lambda in {1, 2}");
        }),
        fact("subspace_H1_invariant", "holds", Provenance::published, [k](const GalleryCase& g) {
            const AssociatedOperator op = build_operator(g.system);
            InvarianceOptions opt;
            opt.lambdas = InvarianceOptions::default_grid();
            opt.ts = InvarianceOptions::default_grid();
            const Subspace h1(2 * k, ComplexMatrix::Identity(2 * k, k));
            const InvarianceReport r = invariance_check(op, ProjectionSpec::onto(h1), opt, g.system.tolerances());
            const bool ok = r.agree && r.semigroup.certificate.holds() && r.resolvent.certificate.holds() &&
                            r.generator.certificate.holds() && r.generator.evidence == Evidence::exact;
            return outcome(ok, std::min({r.semigroup.worst, r.resolvent.worst, r.generator.worst}));
        }),
    };
    return c;
}

// a = 0 on C^3, j(u) = u1: ker T = ker j has dimension 2.
inline GalleryCase kerT_nontrivial(const ToleranceConfig& tol = {}) {
    GalleryCase c{"kerT_nontrivial", Json::object(),
                  FormSystem(ComplexMatrix::Zero(3, 3), detail::basis_span(3, {0}).adjoint(), tol), {}, {}, {}};
    using detail::fact;
    using detail::outcome;
    c.expected_facts = {
        fact("ker_T_dim", "2", Provenance::derived, [](const GalleryCase& g) {
            const Index k = kernel(derived_T(g.system), g.system.tolerances()).dim();
            return outcome(k == 2, static_cast<double>(k));
        }),
        fact("reduced_dim_V", "dim_V - 2", Provenance::derived, [](const GalleryCase& g) {
            const ReducedSystem r = reduce_ker_T(g.system);
            return outcome(r.system.dim_V() == g.system.dim_V() - 2, static_cast<double>(r.system.dim_V()));
        }),
        fact("j_D_ja_preserved", "holds", Provenance::derived, [](const GalleryCase& g) {
            const auto& tol = g.system.tolerances();
            const ReducedSystem r = reduce_ker_T(g.system);
            const Subspace before = image(g.system.J(), domain_subspace(g.system), tol);
            const Subspace after = image(r.system.J(), domain_subspace(r.system), tol);
            const auto rel = subspace_relation(before, after, tol);
            return outcome(rel.equal(), rel.max_principal_angle);
        }),
        detail::associated_fact(true, Provenance::published),
        detail::operator_fact("A", "0", Provenance::published, ComplexMatrix::Zero(1, 1), 1e-12),
    };
    return c;
}

// a(u, v) = int u' conj(v') on H^1_0(0, 1), N interior nodes, H = discrete L^2.
inline GalleryCase dirichlet_laplacian(Index n, const ToleranceConfig& tol = {}) {
    if (n < 1) throw InputError("dirichlet_laplacian: N must be positive");
    const double h = 1.0 / static_cast<double>(n + 1);
    const RealMatrix d = detail::dirichlet_gradient(n + 1, h);
    const RealMatrix k = h * d.transpose() * d;
    RawProblem raw;
    raw.dim_V = n;
    raw.dim_H = n;
    raw.T0_raw = k.cast<Complex>();
    raw.J_raw = ComplexMatrix::Identity(n, n);
    raw.gram_V = k.cast<Complex>();
    raw.gram_H = h * ComplexMatrix::Identity(n, n);
    raw.tolerances = tol;
    GalleryCase c = detail::from_raw("dirichlet_laplacian", Json{{"N", n}}, raw, detail::nodes(0.0, h, n));
    detail::require_conditions(c);

    ComplexMatrix lap = ComplexMatrix::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
        lap(i, i) = 2.0 / (h * h);
        if (i + 1 < n) lap(i, i + 1) = lap(i + 1, i) = -1.0 / (h * h);
    }
    c.expected_facts = {
        detail::fact("condition_iii", "holds", Provenance::derived,
                     [](const GalleryCase& g) { return detail::certificate_outcome(check_condition_iii(g.system).certificate, true); }),
        detail::m_accretive_fact(Provenance::derived),
        detail::operator_fact("A", "tridiag(-1, 2, -1) / h^2", Provenance::derived, lap, 1e-10),
        detail::orthant_fact(Provenance::derived),
    };
    return c;
}

inline GalleryCase example(const std::string& name, const Json& params = Json::object(),
                           const ToleranceConfig& tol = {}) {
    if (!params.is_object()) throw InputError("gallery parameters must be an object");
    auto none = [&] { reject_unknown_keys(params, {}, name); };
    if (name == "multival") return none(), detail::make_multival(tol);
    if (name == "zero_form_rank1") return none(), detail::make_zero_form_rank1(tol);
    if (name == "welldef_nonmacc_truncated") return detail::make_welldef_truncated(params, tol);
    if (name == "gen_inverse") return detail::make_gen_inverse(params, tol);
    if (name == "signdiff") {
        reject_unknown_keys(params, {"N", "a", "b"}, name);
        return signdiff(detail::int_param(params, "N", 50, 2), detail::real_param(params, "a", -1.0),
                        detail::real_param(params, "b", 1.0), tol);
    }
    if (name == "deriv_halfline") {
        reject_unknown_keys(params, {"N", "L"}, name);
        return deriv_halfline(detail::int_param(params, "N", 50, 2), detail::real_param(params, "L", 10.0), tol);
    }
    if (name == "deriv_line") {
        reject_unknown_keys(params, {"N", "L"}, name);
        return deriv_line(detail::int_param(params, "N", 64, 3), detail::real_param(params, "L", 10.0), tol);
    }
    if (name == "invar_block") {
        reject_unknown_keys(params, {"R"}, name);
        RealVector r(3);
        r << 1.0, 2.0, 3.0;
        if (params.contains("R")) {
            const Json& v = params.at("R");
            if (!v.is_array() || v.empty()) throw InputError("invar_block: R must be a non-empty array of numbers");
            r.resize(static_cast<Index>(v.size()));
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (!v[i].is_number()) throw InputError("invar_block: R must be a non-empty array of numbers");
                r(static_cast<Index>(i)) = v[i].get<double>();
            }
        }
        return invar_block(r, tol);
    }
    if (name == "kerT_nontrivial") return none(), kerT_nontrivial(tol);
    if (name == "dirichlet_laplacian") {
        reject_unknown_keys(params, {"N"}, name);
        return dirichlet_laplacian(detail::int_param(params, "N", 20, 1), tol);
    }
    throw InputError("unknown gallery case \"" + name + "\"");
}

// Failures, including thrown errors, become report entries.
inline GalleryReport run_case(const GalleryCase& c) {
    GalleryReport rep{c.name, c.parameters, {}};
    for (const ExpectedFact& f : c.expected_facts) {
        FactResult r{f.id, f.expected, f.provenance, false, 0.0, {}};
        try {
            const FactOutcome o = f.check(c);
            r.pass = o.holds;
            r.value = o.value;
            r.detail = o.detail;
        } catch (const std::exception& e) {
            r.detail = std::string("error: ") + e.what();
        }
        rep.facts.push_back(std::move(r));
    }
    return rep;
}

}  // namespace accform
