#pragma once

// Contraction semigroups and resolvents of an m-accretive A, invariance of closed
// convex sets (subspaces and the nonnegative orthant), the perturbation bound for
// A + S, and norm-resolvent approximation by a_n = a + <B_n ., .>.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "accform/association.hpp"
#include "accform/expm.hpp"
#include "accform/fov.hpp"

namespace accform {

namespace detail {

inline void require_full_macc(const AssociatedOperator& a, std::string_view op) {
    if (!a.full_domain()) throw PreconditionError(std::string(op) + ": operator is not defined on all of H");
    if (!a.m_accretive.holds()) throw PreconditionError(std::string(op) + ": operator is not m-accretive");
}

}  // namespace detail

// e^{-tA}
inline ComplexMatrix semigroup_at(const AssociatedOperator& a, double t) {
    detail::require_full_macc(a, "semigroup_at");
    if (!std::isfinite(t) || t < 0.0) throw InputError("semigroup_at: t must be finite and >= 0");
    const Index n = a.dim_H();
    if (t == 0.0) return ComplexMatrix::Identity(n, n);
    ComplexMatrix s = expm(-t * a.matrix());
    const double nrm = norm2(s);
    // Allowance for Pade and squaring rounding on top of the contraction bound.
    const double slack = 1e-12 * std::max(1.0, t * norm2(a.action));
    if (nrm > 1.0 + std::max(10.0 * a.m_accretive.tolerance, slack))
        throw NumericalDegeneracyError("semigroup_at: |e^{-tA}| = " + std::to_string(nrm) + " exceeds 1");
    return s;
}

// (lambda I + A)^{-1}
inline ComplexMatrix resolvent_at(const AssociatedOperator& a, double lambda) {
    detail::require_full_macc(a, "resolvent_at");
    if (!std::isfinite(lambda) || lambda <= 0.0) throw InputError("resolvent_at: lambda must be finite and > 0");
    const Index n = a.dim_H();
    return (lambda * ComplexMatrix::Identity(n, n) + a.matrix()).partialPivLu().inverse();
}

// The closed convex set C of an invariance question, through its projection P.
class ProjectionSpec {
public:
    enum class Kind { subspace, nonneg_orthant };

    static ProjectionSpec onto(Subspace s) {
        const Index n = s.ambient_dim();
        return ProjectionSpec(Kind::subspace, std::move(s), n);
    }
    static ProjectionSpec orthant(Index n) { return ProjectionSpec(Kind::nonneg_orthant, Subspace::zero(n), n); }

    Kind kind() const { return kind_; }
    Index ambient_dim() const { return n_; }
    const Subspace& subspace() const { return sub_; }

    // Columnwise projection. For the orthant in C^n: real parts clipped at 0,
    // imaginary parts dropped.
    ComplexMatrix project(const ComplexMatrix& x) const {
        if (kind_ == Kind::subspace) return sub_.project(x);
        return x.real().cwiseMax(0.0).cast<Complex>();
    }

    // Points of C from unconstrained samples.
    ComplexMatrix into_set(const ComplexMatrix& x) const { return project(x); }

private:
    ProjectionSpec(Kind k, Subspace s, Index n) : kind_(k), sub_(std::move(s)), n_(n) {}
    Kind kind_;
    Subspace sub_;
    Index n_;
};

inline std::string_view to_string(ProjectionSpec::Kind k) {
    return k == ProjectionSpec::Kind::subspace ? "subspace" : "nonneg_orthant";
}

enum class Evidence { exact, certified, sampled };

inline std::string_view to_string(Evidence e) {
    switch (e) {
        case Evidence::exact: return "exact";
        case Evidence::certified: return "certified";
        case Evidence::sampled: return "sampled";
    }
    return "?";
}

struct CriterionResult {
    Certificate certificate;
    Evidence evidence = Evidence::exact;
    double worst = 0.0;  // smallest observed value (0 is the boundary)
};

struct InvarianceOptions {
    std::vector<double> lambdas;
    std::vector<double> ts;
    Index n_samples = 10000;
    std::uint64_t seed = 0x5eed;

    static std::vector<double> default_grid() {
        std::vector<double> g;
        for (int k = -3; k <= 3; ++k) g.push_back(std::ldexp(1.0, k));
        return g;
    }
};

struct InvarianceReport {
    ProjectionSpec::Kind kind;
    CriterionResult semigroup;   // (i) S_t C ⊂ C
    CriterionResult resolvent;   // (ii) lambda (lambda + A)^{-1} C ⊂ C
    CriterionResult generator;   // (iii) Re <Ax, x - Px> >= 0
    bool agree = true;
    std::string note;
};

namespace detail {

inline ComplexMatrix complex_normal(std::mt19937_64& rng, Index rows, Index cols) {
    std::normal_distribution<double> g;
    ComplexMatrix m(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) m(i, j) = Complex(g(rng), g(rng));
    return m;
}

inline ComplexMatrix real_normal(std::mt19937_64& rng, Index rows, Index cols) {
    std::normal_distribution<double> g;
    ComplexMatrix m(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) m(i, j) = g(rng);
    return m;
}

inline bool is_real(const ComplexMatrix& m, double tol) {
    return m.size() == 0 || m.imag().cwiseAbs().maxCoeff() <= tol * std::max(1.0, m.cwiseAbs().maxCoeff());
}

// Distance from each column to C, relative to the column norm; returns the
// worst column and its index.
inline std::pair<double, Index> worst_exit(const ProjectionSpec& p, const ComplexMatrix& y) {
    const ComplexMatrix py = p.project(y);
    double worst = 0.0;
    Index at = 0;
    for (Index k = 0; k < y.cols(); ++k) {
        const double d = (y.col(k) - py.col(k)).norm() / std::max(1.0, y.col(k).norm());
        if (d > worst) worst = d, at = k;
    }
    return {worst, at};
}

// Pushes points of C through a family of maps and certifies they stay in C.
template <class Map>
CriterionResult push_through(const char* check, const ProjectionSpec& p, const ComplexMatrix& pts,
                             const std::vector<double>& params, Map&& map, Evidence ev, double tol) {
    double worst = 0.0;
    ComplexVector wit;
    for (double s : params) {
        const auto [d, k] = worst_exit(p, map(s) * pts);
        if (d > worst) worst = d, wit = pts.col(k);
    }
    CriterionResult r;
    r.evidence = ev;
    r.worst = -worst;
    r.certificate = worst <= tol ? Certificate::pass(check, tol - worst, tol,
                                                     "margin is the tolerance minus the largest relative exit from C")
                                 : Certificate::fail(check, tol - worst, tol, {wit}, "witness is a point of C that leaves C");
    return r;
}

}  // namespace detail

// The three equivalent invariance criteria. Subspaces are decided exactly (basis images and a
// Hermitian eigenvalue test); the orthant is certified by the Z-matrix sign test
// on a real A and cross-checked by sampling.
inline InvarianceReport invariance_check(const AssociatedOperator& a, const ProjectionSpec& p,
                                         InvarianceOptions opt, const ToleranceConfig& tol) {
    detail::require_full_macc(a, "invariance_check");
    const Index n = a.dim_H();
    if (p.ambient_dim() != n) throw DimensionError("invariance_check: projection lives in the wrong dimension");
    if (opt.lambdas.empty()) opt.lambdas = InvarianceOptions::default_grid();
    if (opt.ts.empty()) opt.ts = InvarianceOptions::default_grid();
    for (double l : opt.lambdas)
        if (!(l > 0.0) || !std::isfinite(l)) throw InputError("invariance_check: lambdas must be finite and > 0");
    for (double t : opt.ts)
        if (!(t > 0.0) || !std::isfinite(t)) throw InputError("invariance_check: ts must be finite and > 0");
    if (opt.n_samples < 1) throw InputError("invariance_check: n_samples must be positive");

    const ComplexMatrix am = a.matrix();
    const double an = std::max(1.0, norm2(am));
    InvarianceReport rep;
    rep.kind = p.kind();
    const auto resolvent_map = [&](double l) { return (l * resolvent_at(a, l)).eval(); };
    const auto semigroup_map = [&](double t) { return semigroup_at(a, t); };

    if (p.kind() == ProjectionSpec::Kind::subspace) {
        const Subspace& c = p.subspace();
        const ComplexMatrix q = c.basis();
        const ComplexMatrix off = ComplexMatrix::Identity(n, n) - c.projector();
        // (iii): Re x*(I-P)Ax >= 0 for all x, i.e. Herm((I-P)A) is positive semidefinite.
        const EigenPair e = n == 0 ? EigenPair{0.0, ComplexVector()} : min_eigen(off * am);
        rep.generator.evidence = Evidence::exact;
        rep.generator.worst = e.value;
        const double thr = tol.residual_tol * an;
        rep.generator.certificate =
            Certificate::decide("invariance_generator", e.value >= -thr, e.value + thr, thr, e.vector,
                                "lambda_min of the Hermitian part of (I - P) A");
        if (q.cols() == 0) {
            rep.resolvent = {Certificate::pass("invariance_resolvent", tol.residual_tol, tol.residual_tol), Evidence::exact, 0.0};
            rep.semigroup = {Certificate::pass("invariance_semigroup", tol.residual_tol, tol.residual_tol), Evidence::exact, 0.0};
        } else {
            rep.resolvent = detail::push_through("invariance_resolvent", p, q, opt.lambdas, resolvent_map,
                                                 Evidence::exact, tol.residual_tol);
            rep.semigroup = detail::push_through("invariance_semigroup", p, q, opt.ts, semigroup_map, Evidence::exact,
                                                 tol.residual_tol);
        }
    } else {
        if (!detail::is_real(am, tol.residual_tol))
            throw PreconditionError("invariance_check: the orthant needs a real operator");
        std::mt19937_64 rng(opt.seed);
        // Sampled (iii) on real and complex points.
        const Index ns = opt.n_samples;
        ComplexMatrix x(n, ns);
        x.leftCols(ns / 2) = detail::real_normal(rng, n, ns / 2);
        x.rightCols(ns - ns / 2) = detail::complex_normal(rng, n, ns - ns / 2);
        const ComplexMatrix ax = am * x;
        const ComplexMatrix d = x - p.project(x);
        double worst = std::numeric_limits<double>::infinity();
        for (Index k = 0; k < ns; ++k) worst = std::min(worst, d.col(k).dot(ax.col(k)).real() / x.col(k).squaredNorm());
        // Z-matrix test: e^{-tA} >= 0 for all t iff A_ij <= 0 off the diagonal.
        const Eigen::MatrixXd ar = am.real();
        double pos = 0.0;
        Index pi = 0, pj = 0;
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < n; ++j)
                if (i != j && ar(i, j) > pos) pos = ar(i, j), pi = i, pj = j;
        const double zthr = tol.residual_tol * an;
        const bool z_matrix = pos <= zthr;
        rep.generator.evidence = Evidence::certified;
        rep.generator.worst = worst;
        if (z_matrix) {
            rep.generator.certificate = Certificate::pass(
                "invariance_generator", zthr - pos, zthr,
                "A has no positive off-diagonal entry (Z-matrix); sampled minimum " + std::to_string(worst));
        } else {
            // x = e_j - s e_i with s = A_ij / (2 A_ii) gives Re <Ax, x - Px> = -s A_ij / 2 < 0.
            const double aii = ar(pi, pi);
            const double s = aii > 0.0 ? pos / (2.0 * aii) : 1.0;
            ComplexVector w = ComplexVector::Zero(n);
            w(pj) = 1.0;
            w(pi) = -s;
            const ComplexMatrix wm = w;
            const double val = (wm - p.project(wm)).col(0).dot(am * w).real() / w.squaredNorm();
            rep.generator.worst = std::min(worst, val);
            rep.generator.certificate = Certificate::fail("invariance_generator", -pos, zthr, {w},
                                                          "positive off-diagonal entry of A; witness violates (iii)");
        }
        if (worst < -tol.residual_tol && z_matrix) {
            rep.agree = false;
            rep.note += "sampled (iii) found a negative value although A is a Z-matrix; ";
        }
        const ComplexMatrix c = p.into_set(detail::real_normal(rng, n, std::min<Index>(ns, 1000)));
        rep.resolvent = detail::push_through("invariance_resolvent", p, c, opt.lambdas, resolvent_map,
                                             Evidence::sampled, tol.residual_tol);
        rep.semigroup = detail::push_through("invariance_semigroup", p, c, opt.ts, semigroup_map, Evidence::sampled,
                                             tol.residual_tol);
    }
    const bool g = rep.generator.certificate.holds();
    if (rep.resolvent.certificate.holds() != g || rep.semigroup.certificate.holds() != g) {
        rep.agree = false;
        rep.note += "criteria (i), (ii), (iii) disagree";
    }
    return rep;
}

struct FormInvarianceReport {
    Certificate form_criterion;     // Re a(u, u - w) >= 0 with j(w) = P j(u)
    Evidence evidence = Evidence::exact;
    double worst = 0.0;
    bool approximation_required = false;  // P j(u) outside rg j for some sample
    InvarianceReport operator_criteria;
    bool agree = true;
};

// The form version of criterion (iii); in finite dimensions the approximating
// sequence w_k collapses to a single w with j(w) = P j(u).
inline FormInvarianceReport form_invariance_check(const FormSystem& fs, const ProjectionSpec& p,
                                                  InvarianceOptions opt = {}) {
    const ToleranceConfig& tol = fs.tolerances();
    const AssociationResult assoc = check_associated(fs);
    if (!assoc.op) throw PreconditionError("form_invariance_check: (a, j) is not associated with an operator");
    if (!check_m_accretive(fs, assoc).holds())
        throw PreconditionError("form_invariance_check: the associated operator is not m-accretive");
    if (p.ambient_dim() != fs.dim_H()) throw DimensionError("form_invariance_check: projection lives in the wrong dimension");
    if (opt.n_samples < 1) throw InputError("form_invariance_check: n_samples must be positive");

    FormInvarianceReport rep;
    rep.operator_criteria = invariance_check(*assoc.op, p, opt, tol);
    const ComplexMatrix& db = assoc.D_ja.basis();
    const double jn = norm2(fs.J());
    const double scale = std::max(1.0, norm2(fs.T0()));

    if (p.kind() == ProjectionSpec::Kind::subspace) {
        // w(u) = J^+ P J u is linear, so Re a(u, u - w(u)) is a Hermitian form on D_j(a).
        const ComplexMatrix pj = p.project(fs.J() * db);
        const ComplexMatrix w = pseudo_solve(fs.J(), pj, tol, jn);
        const double miss = norm2(fs.J() * w - pj);
        rep.approximation_required = miss > tol.residual_tol * std::max(1.0, norm2(pj));
        const ComplexMatrix form = (db - w).adjoint() * fs.T0() * db;
        const EigenPair e = db.cols() == 0 ? EigenPair{0.0, ComplexVector()} : min_eigen(form);
        rep.evidence = Evidence::exact;
        rep.worst = e.value;
        const double thr = tol.residual_tol * scale;
        rep.form_criterion = Certificate::decide("form_invariance", e.value >= -thr, e.value + thr, thr,
                                                 db.cols() == 0 ? ComplexVector() : ComplexVector(db * e.vector),
                                                 "lambda_min of Re a(u, u - w(u)) on D_j(a)");
    } else {
        std::mt19937_64 rng(opt.seed ^ 0xf0f0u);
        const Index ns = opt.n_samples;
        ComplexMatrix c(db.cols(), db.cols() + ns);
        c.leftCols(db.cols()) = ComplexMatrix::Identity(db.cols(), db.cols());
        c.middleCols(db.cols(), ns / 2) = detail::real_normal(rng, db.cols(), ns / 2);
        c.rightCols(ns - ns / 2) = detail::complex_normal(rng, db.cols(), ns - ns / 2);
        const ComplexMatrix u = db * c;
        const ComplexMatrix pj = p.project(fs.J() * u);
        const ComplexMatrix w = pseudo_solve(fs.J(), pj, tol, jn);
        const ComplexMatrix r = fs.J() * w - pj;
        const ComplexMatrix t0u = fs.T0() * u;
        double worst = std::numeric_limits<double>::infinity();
        Index at = 0;
        for (Index k = 0; k < u.cols(); ++k) {
            if (r.col(k).norm() > tol.residual_tol * std::max(1.0, pj.col(k).norm())) rep.approximation_required = true;
            const double nu = u.col(k).squaredNorm();
            if (nu == 0.0) continue;
            const double v = (u.col(k) - w.col(k)).dot(t0u.col(k)).real() / nu;
            if (v < worst) worst = v, at = k;
        }
        rep.evidence = Evidence::sampled;
        rep.worst = u.cols() == 0 ? 0.0 : worst;
        const double thr = tol.residual_tol * scale;
        rep.form_criterion = Certificate::decide("form_invariance", rep.worst >= -thr, rep.worst + thr, thr,
                                                 u.cols() == 0 ? ComplexVector() : ComplexVector(u.col(at)),
                                                 "sampled minimum of Re a(u, u - w) / |u|^2");
    }
    if (rep.approximation_required) {
        // Outside rg j the single-w criterion is not available; defer to the operator.
        rep.form_criterion = rep.operator_criteria.generator.certificate;
        rep.form_criterion.note = "approximation required: P j(u) is not in rg j; verdict taken from the operator criterion";
    }
    rep.agree = rep.form_criterion.holds() == rep.operator_criteria.generator.certificate.holds();
    return rep;
}

struct PerturbationReport {
    double lhs = 0.0;  // |(A + S)^{-1}|
    double rhs = 0.0;  // 2|A^{-1}| + (1 + tan theta)^2 |S| |A^{-1}|^2
    double theta = 0.0;
    Certificate bound;
    Certificate sum_m_accretive;  // A + S accretive and invertible
};

inline PerturbationReport perturb_bound_check(const ComplexMatrix& a, const ComplexMatrix& s,
                                              const ToleranceConfig& tol = {}) {
    if (a.rows() != a.cols() || s.rows() != s.cols() || a.rows() != s.rows())
        throw DimensionError("perturb_bound_check: A and S must be square of the same size");
    if (a.rows() == 0) throw DimensionError("perturb_bound_check: empty matrices");
    require_finite(a, "A");
    require_finite(s, "S");
    const Index n = a.rows();
    const AssociatedOperator op = make_operator(Subspace::full(n), a, tol);
    if (!op.m_accretive.holds()) throw PreconditionError("perturb_bound_check: A is not m-accretive");
    const RealVector sa = singular_values(a);
    if (!(sa(n - 1) > static_cast<double>(n) * tol.rank_rtol * sa(0)))
        throw PreconditionError("perturb_bound_check: A is not invertible");
    const SectorialityReport sr = check_sectorial(s, tol);
    if (!sr.sectorial.holds() || !sr.semi_angle)
        throw PreconditionError("perturb_bound_check: S is not sectorial with vertex 0 and semi-angle < pi/2");

    PerturbationReport rep;
    rep.theta = *sr.semi_angle;
    const double ainv = 1.0 / sa(n - 1);
    const ComplexMatrix sum = a + s;
    const RealVector ss = singular_values(sum);
    rep.lhs = 1.0 / ss(n - 1);
    const double k = 1.0 + std::tan(rep.theta);
    rep.rhs = 2.0 * ainv + k * k * norm2(s) * ainv * ainv;
    const double slack = rep.rhs - rep.lhs;
    const double thr = tol.residual_tol * std::max(1.0, rep.rhs);
    Eigen::JacobiSVD<ComplexMatrix> svd(sum, Eigen::ComputeFullV);
    rep.bound = Certificate::decide("perturb_bound", slack >= -thr, slack, thr, svd.matrixV().col(n - 1),
                                    "margin is rhs minus lhs");

    const double re_min = hermitian_eigenvalues(sum)(0);
    const bool invertible = ss(n - 1) > static_cast<double>(n) * tol.rank_rtol * ss(0);
    const bool accretive = re_min >= -tol.residual_tol;
    if (!accretive)
        rep.sum_m_accretive = Certificate::fail("perturb_sum_m_accretive", re_min, tol.residual_tol,
                                                {min_eigen(sum).vector}, "A + S is not accretive");
    else if (!invertible)
        rep.sum_m_accretive = Certificate::fail("perturb_sum_m_accretive", ss(n - 1), 0.0,
                                                {svd.matrixV().col(n - 1)}, "A + S is singular");
    else
        rep.sum_m_accretive = Certificate::pass("perturb_sum_m_accretive", re_min, tol.residual_tol,
                                                "margin is lambda_min of Re(A + S)");
    return rep;
}

struct ApproxSchedule {
    enum class Family { scaled_identity, scaled_matrix };
    Family family = Family::scaled_identity;
    std::optional<ComplexMatrix> matrix;  // D for scaled_matrix: B_n = D / n
    std::optional<double> theta;          // declared semi-angle; must cover the certified one
    long long n_max = 1000000;
    long long ratio = 10;  // geometric step of the schedule

    // n = 1, ratio, ratio^2, ... and n_max itself.
    std::vector<long long> points() const {
        std::vector<long long> ns;
        for (long long n = 1; n < n_max; n *= ratio) ns.push_back(n);
        ns.push_back(n_max);
        return ns;
    }
};

inline std::string_view to_string(ApproxSchedule::Family f) {
    return f == ApproxSchedule::Family::scaled_identity ? "scaled_identity" : "scaled_matrix";
}

struct ApproxPoint {
    long long n = 0;
    double delta = 0.0;
    double epsilon = 0.0;
    double theta = 0.0;
};

struct ApproxReport {
    std::vector<ApproxPoint> schedule;
    std::vector<double> errors;  // |(I + A_n)^{-1} - (I + A)^{-1}|
    std::vector<double> bounds;  // (1 + tan theta) (eps_n / sqrt(delta_n)) |Z|
    double z_norm = 0.0;
    std::vector<std::string> warnings;
};

inline ApproxReport approx_experiment(const FormSystem& fs, const ApproxSchedule& sched) {
    const ToleranceConfig& tol = fs.tolerances();
    if (sched.n_max < 1) throw InputError("approx_experiment: n_max must be positive");
    if (sched.ratio < 2) throw InputError("approx_experiment: ratio must be at least 2");
    const Index nv = fs.dim_V();
    ComplexMatrix d = ComplexMatrix::Identity(nv, nv);
    if (sched.family == ApproxSchedule::Family::scaled_matrix) {
        if (!sched.matrix) throw InputError("approx_experiment: scaled_matrix needs a matrix");
        if (sched.matrix->rows() != nv || sched.matrix->cols() != nv)
            throw DimensionError("approx_experiment: B matrix must be dim_V x dim_V");
        require_finite(*sched.matrix, "B");
        d = *sched.matrix;
    }
    const SectorialityReport sr = check_sectorial(d, tol);
    if (!sr.sectorial.holds() || !sr.semi_angle)
        throw PreconditionError("approx_experiment: B is not sectorial with vertex 0");
    double theta = *sr.semi_angle;
    if (sched.theta) {
        if (!(*sched.theta >= 0.0 && *sched.theta < std::numbers::pi / 2))
            throw InputError("approx_experiment: theta must lie in [0, pi/2)");
        if (*sched.theta + tol.angle_tol < theta)
            throw PreconditionError("approx_experiment: declared theta " + std::to_string(*sched.theta) +
                                    " is below the certified semi-angle " + std::to_string(theta));
        theta = std::max(theta, *sched.theta);
    }
    const RealVector ev = hermitian_eigenvalues(d);
    const double lo = ev(0), hi = ev(ev.size() - 1);
    if (!(lo > tol.residual_tol)) throw PreconditionError("approx_experiment: Re B is not positive definite");

    const AssociationResult assoc = check_associated(fs);
    if (!assoc.op) throw PreconditionError("approx_experiment: (a, j) is not associated with an operator");
    const Resolvent base = resolvent_factor(fs, assoc);

    ApproxReport rep;
    rep.z_norm = norm2(base.Z);
    double prev_ratio = std::numeric_limits<double>::infinity();
    for (long long n : sched.points()) {
        const double inv = 1.0 / static_cast<double>(n);
        ApproxPoint pt{n, lo * inv, hi * inv, theta};
        const double ratio = pt.epsilon * pt.epsilon / pt.delta;
        if (!(ratio < prev_ratio))
            rep.warnings.push_back("eps_n^2 / delta_n does not decrease at n = " + std::to_string(n));
        prev_ratio = ratio;

        const FormSystem fs_n(fs.T0() + inv * d, fs.J(), tol);
        // a_n is j-elliptic with omega = 0: Re a_n(u, u) >= delta_n |u|^2.
        const double re_min = hermitian_eigenvalues(fs_n.T0())(0);
        if (re_min < pt.delta * (1.0 - 1e-8) - tol.residual_tol)
            throw NumericalDegeneracyError("approx_experiment: a_n is not j-elliptic at n = " + std::to_string(n));
        const Resolvent rn = resolvent_factor(fs_n, check_associated(fs_n));
        const double err = norm2(rn.R - base.R);
        const double bound = (1.0 + std::tan(theta)) * (pt.epsilon / std::sqrt(pt.delta)) * rep.z_norm;
        if (err > bound + tol.residual_tol)
            throw NumericalDegeneracyError("approx_experiment: error " + std::to_string(err) + " exceeds bound " +
                                           std::to_string(bound) + " at n = " + std::to_string(n));
        rep.schedule.push_back(pt);
        rep.errors.push_back(err);
        rep.bounds.push_back(bound);
    }
    return rep;
}

}  // namespace accform
