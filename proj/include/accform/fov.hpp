#pragma once

// Numerical range W(M) = {x*Mx : |x| = 1} and the scalar certificates built on
// it: sectoriality, Condition (III), j-ellipticity and the lower bound
// |b(u, u)| >= rho |u|^2.

#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <queue>
#include <vector>

#include "accform/model.hpp"

namespace accform {

struct SupportPoint {
    double angle = 0.0;   // outward normal direction e^{i angle}
    double level = 0.0;   // max over W of Re(e^{-i angle} z)
    Complex point;        // x*Mx for the unit top eigenvector x
    ComplexVector vector;
};

struct FieldOfValues {
    std::vector<Complex> boundary_points;  // counterclockwise
    std::vector<double> angles;            // normal angle of each point, increasing in [0, 2pi)
    std::vector<ComplexVector> vectors;    // unit x with boundary_points[k] = x*Mx
    Index n_angles = 0;                    // base grid size before refinement
    // Upper bound on the Hausdorff distance between the polygon and W(M): the
    // largest distance from a corner of the outer support-line polygon to the
    // matching edge of the inner polygon.
    double outer_gap = 0.0;
};

namespace detail {

inline SupportPoint support(const ComplexMatrix& m, double phi) {
    const Complex rot = std::polar(1.0, -phi);
    const EigenPair top = max_eigen(rot * m);
    const Complex p = top.vector.dot(m * top.vector);
    return {phi, top.value, p, top.vector};
}

// Height of the triangle cut off by the two support lines over the chord joining
// the support points, L sin(alpha) sin(beta) / sin(alpha + beta) with alpha, beta
// the angles between the chord and each line. This stays well conditioned when
// the lines are nearly parallel, unlike intersecting them explicitly.
inline double support_gap(const SupportPoint& a, const SupportPoint& b, double phi_b) {
    const Complex d = b.point - a.point;
    const double len = std::abs(d);
    if (len == 0.0) return 0.0;
    const Complex ra = std::polar(1.0, -a.angle) * d;
    const Complex rb = std::polar(1.0, -phi_b) * (-d);
    const double alpha = std::atan2(std::max(0.0, -ra.real()), ra.imag());
    const double beta = std::atan2(std::max(0.0, -rb.real()), -rb.imag());
    const double sum = alpha + beta;
    if (sum <= 0.0) return 0.0;
    if (sum >= std::numbers::pi) return len;
    return len * std::sin(alpha) * std::sin(beta) / std::sin(sum);
}

}  // namespace detail

struct FovOptions {
    // Refinement stops once every gap is below gap_rtol * max(|M|, tiny) or
    // after max_extra extra support points (default 8 * n_angles).
    double gap_rtol = 1e-12;
    Index max_extra = -1;
};

// Rotation method on the angles 2 pi k / n_angles, refined by bisection where the
// support lines leave a gap (this catches hull vertices with narrow normal cones).
inline FieldOfValues field_of_values(const ComplexMatrix& m, Index n_angles, FovOptions opt = {}) {
    if (m.rows() != m.cols()) throw DimensionError("field_of_values: matrix must be square");
    if (m.rows() == 0) throw DimensionError("field_of_values: empty matrix");
    if (n_angles < 8) throw InputError("field_of_values: need at least 8 angles");
    require_finite(m, "field_of_values");

    const double two_pi = 2.0 * std::numbers::pi;
    const double gap_target = opt.gap_rtol * std::max(norm2(m), std::numeric_limits<double>::min());
    const Index budget = opt.max_extra >= 0 ? opt.max_extra : 8 * n_angles;

    std::map<double, SupportPoint> pts;
    for (Index k = 0; k < n_angles; ++k) {
        const double phi = two_pi * static_cast<double>(k) / static_cast<double>(n_angles);
        pts.emplace(phi, detail::support(m, phi));
    }

    struct Interval {
        double gap, lo, hi;  // hi may exceed 2 pi for the wrap-around interval
        bool operator<(const Interval& o) const {
            return gap < o.gap || (gap == o.gap && lo > o.lo);
        }
    };
    auto lookup = [&](double phi) -> const SupportPoint& {
        return pts.at(phi >= two_pi ? phi - two_pi : phi);
    };
    auto make = [&](double lo, double hi) {
        return Interval{detail::support_gap(lookup(lo), lookup(hi), hi), lo, hi};
    };
    std::priority_queue<Interval> queue;
    for (auto it = pts.begin(); it != pts.end(); ++it) {
        auto next = std::next(it);
        const double hi = next == pts.end() ? pts.begin()->first + two_pi : next->first;
        queue.push(make(it->first, hi));
    }
    Index extra = 0;
    while (!queue.empty() && queue.top().gap > gap_target && extra < budget) {
        const Interval iv = queue.top();
        if (iv.hi - iv.lo < 1e-13) break;
        queue.pop();
        const double mid = 0.5 * (iv.lo + iv.hi);
        const double key = mid >= two_pi ? mid - two_pi : mid;
        pts.emplace(key, detail::support(m, key));
        ++extra;
        queue.push(make(iv.lo, mid));
        queue.push(make(mid, iv.hi));
    }

    FieldOfValues out;
    out.n_angles = n_angles;
    out.outer_gap = queue.empty() ? 0.0 : queue.top().gap;
    for (const auto& [phi, s] : pts) {
        out.angles.push_back(phi);
        out.boundary_points.push_back(s.point);
        out.vectors.push_back(s.vector);
    }
    return out;
}

struct SectorialityReport {
    Certificate vertex_zero;   // Re <Mu, u> >= -residual_tol |u|^2
    Certificate sectorial;     // vertex zero and some semi-angle < pi/2
    std::optional<double> semi_angle;  // present exactly when sectorial holds
};

// Smallest t with |Im <Mu,u>| <= t Re <Mu,u>, found by certified bisection on
// lambda_max(+-Im M - t Re M) <= 0 (a Loewner-order test, so the returned
// angle is an over-approximation up to rounding noise).
inline SectorialityReport check_sectorial(const ComplexMatrix& m, const ToleranceConfig& tol) {
    if (m.rows() != m.cols()) throw DimensionError("check_sectorial: matrix must be square");
    if (m.rows() == 0) throw DimensionError("check_sectorial: empty matrix");
    require_finite(m, "check_sectorial");
    SectorialityReport rep;
    const ComplexMatrix re = hermitian_part(m);
    const ComplexMatrix im = imaginary_part(m);
    const EigenPair low = min_eigen(re);
    rep.vertex_zero = Certificate::decide("check_sectorial.vertex_zero", low.value >= -tol.residual_tol,
                                          low.value, tol.residual_tol, low.vector);
    if (!rep.vertex_zero.holds()) {
        rep.sectorial = Certificate::fail("check_sectorial", low.value, tol.residual_tol, {low.vector},
                                          "numerical range leaves the closed right half-plane");
        return rep;
    }
    const double noise = 100.0 * std::numeric_limits<double>::epsilon() * std::max(norm2(m), 1e-300);
    auto excess = [&](double t) {
        const EigenPair a = max_eigen(im - t * re);
        const EigenPair b = max_eigen(-im - t * re);
        return a.value >= b.value ? a : b;
    };
    double lo = 0.0, hi = 0.0;
    if (excess(0.0).value > noise) {
        hi = 1.0;
        while (excess(hi).value > noise) {
            lo = hi;
            hi *= 2.0;
            if (hi > 1e12) {
                const EigenPair w = excess(hi);
                rep.sectorial = Certificate::fail(
                    "check_sectorial", std::numbers::pi / 2.0, tol.angle_tol, {w.vector},
                    "no semi-angle below pi/2: |Im| is not dominated by Re along the witness");
                return rep;
            }
        }
        for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            (excess(mid).value > noise ? lo : hi) = mid;
        }
    }
    const double theta = std::atan(hi);
    rep.semi_angle = theta;
    rep.sectorial = Certificate::pass("check_sectorial", std::numbers::pi / 2.0 - theta, tol.angle_tol,
                                      "margin is pi/2 minus the certified semi-angle");
    return rep;
}

struct ConditionIII {
    Certificate certificate;
    double mu = 0.0;
};

// mu = sigma_min(T); holds iff mu > dim_V * rank_rtol * max(|T|, scale). Witness:
// the right singular vector of sigma_min. Pass the parent's |T| as scale when fs
// is a compression, so that a numerically zero T̂ is not read as invertible.
inline ConditionIII check_condition_iii(const FormSystem& fs, double scale = 0.0) {
    const ToleranceConfig& tol = fs.tolerances();
    const ComplexMatrix t = derived_T(fs);
    if (t.size() == 0) return {Certificate::pass("check_condition_iii", 0.0, 0.0), 0.0};
    Eigen::JacobiSVD<ComplexMatrix> svd(t, Eigen::ComputeFullV);
    const RealVector& s = svd.singularValues();
    const double mu = s(s.size() - 1);
    const double thr = static_cast<double>(fs.dim_V()) * tol.rank_rtol * std::max(s(0), scale);
    ComplexMatrix w = svd.matrixV().col(t.cols() - 1);
    canonicalize_phases(w);
    return {Certificate::decide("check_condition_iii", mu > thr, mu, thr, w.col(0)), mu};
}

struct JEllipticity {
    double omega = 0.0;
    double mu = 0.0;
};

inline std::vector<double> default_omega_grid() {
    std::vector<double> g{0.0};
    for (int k = 0; k <= 10; ++k) g.push_back(std::ldexp(1.0, k));
    return g;
}

// First omega on the grid with lambda_min(Re T0 + omega J*J) > residual_tol.
inline std::optional<JEllipticity> check_j_elliptic(const FormSystem& fs,
                                                    const std::vector<double>& omega_grid) {
    if (omega_grid.empty()) throw InputError("check_j_elliptic: omega grid is empty");
    if (fs.dim_V() == 0) return std::nullopt;
    const ComplexMatrix re = hermitian_part(fs.T0());
    const ComplexMatrix jj = fs.J().adjoint() * fs.J();
    for (double w : omega_grid) {
        const double lam = hermitian_eigenvalues(re + w * jj)(0);
        if (lam > fs.tolerances().residual_tol) return JEllipticity{w, lam};
    }
    return std::nullopt;
}

struct IncompleteBound {
    double rho = 0.0;        // certified lower bound on dist(0, W(T))
    double rho_upper = 0.0;  // distance from 0 to the inner polygon (an upper bound)
    Certificate certificate;
};

// dist(0, W) = max(0, sup_phi lambda_min(Re(e^{-i phi} T))) for convex compact W.
// Every evaluated phi gives a valid lower bound; a grid search is followed by
// golden-section refinement around the best grid angle.
inline IncompleteBound check_incomplete_bound(const FormSystem& fs, Index n_angles = 360) {
    const ToleranceConfig& tol = fs.tolerances();
    const ComplexMatrix t = derived_T(fs);
    if (t.size() == 0) throw DimensionError("check_incomplete_bound: empty system");
    auto g = [&](double phi) { return min_eigen(std::polar(1.0, -phi) * t); };
    const double two_pi = 2.0 * std::numbers::pi;
    double best_phi = 0.0;
    EigenPair best = g(0.0);
    for (Index k = 1; k < n_angles; ++k) {
        const double phi = two_pi * static_cast<double>(k) / static_cast<double>(n_angles);
        EigenPair e = g(phi);
        if (e.value > best.value) {
            best = std::move(e);
            best_phi = phi;
        }
    }
    const double step = two_pi / static_cast<double>(n_angles);
    double a = best_phi - step, b = best_phi + step;
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - r * (b - a), d = a + r * (b - a);
    EigenPair gc = g(c), gd = g(d);
    for (int it = 0; it < 80; ++it) {
        if (gc.value >= gd.value) {
            b = d;
            d = c;
            gd = std::move(gc);
            c = b - r * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = std::move(gd);
            d = a + r * (b - a);
            gd = g(d);
        }
    }
    for (EigenPair* e : {&gc, &gd})
        if (e->value > best.value) best = std::move(*e);

    IncompleteBound out;
    out.rho = std::max(0.0, best.value);

    const FieldOfValues w = field_of_values(t, std::max<Index>(8, n_angles));
    const auto& p = w.boundary_points;
    double upper = std::numeric_limits<double>::infinity();
    Index closest = 0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        const Complex a0 = p[k], b0 = p[(k + 1) % p.size()];
        const Complex d0 = b0 - a0;
        const double len2 = std::norm(d0);
        const double s = len2 == 0.0 ? 0.0 : std::clamp((-a0 * std::conj(d0)).real() / len2, 0.0, 1.0);
        const double dist = std::abs(a0 + s * d0);
        if (std::abs(p[k]) < std::abs(p[static_cast<std::size_t>(closest)])) closest = static_cast<Index>(k);
        upper = std::min(upper, dist);
    }
    // With rho > 0 the origin lies outside W, hence outside the inner polygon,
    // and the edge distance bounds dist(0, W) from above.
    out.rho_upper = out.rho > 0.0 ? std::max(upper, out.rho) : 0.0;
    out.certificate = Certificate::decide(
        "check_incomplete_bound", out.rho > tol.residual_tol, out.rho, tol.residual_tol,
        w.vectors[static_cast<std::size_t>(closest)],
        out.rho > tol.residual_tol ? "" : "0 lies in (or within tolerance of) the numerical range of T");
    return out;
}

}  // namespace accform
