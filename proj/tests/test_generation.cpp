#include <catch_amalgamated.hpp>

#include "accform/generation.hpp"
#include "support/random_systems.hpp"
#include "support/worked_examples.hpp"

using namespace accform;
using namespace accform::testing;

namespace {

const ToleranceConfig tol{};

AssociatedOperator full(const ComplexMatrix& a) {
    return make_operator(Subspace::full(a.rows()), a, tol);
}

ComplexMatrix eye(Index n) { return ComplexMatrix::Identity(n, n); }

}  // namespace

TEST_CASE("A = 0: J = I, link 2I, T0 = 0") {
    const auto a = full(ComplexMatrix::Zero(3, 3));
    const CayleyData c = cayley(a);
    CHECK(norm2(c.J_matrix - eye(3)) < 1e-12);
    const FormSystem fs = generate_form(a);
    CHECK(norm2(fs.J() - 2.0 * eye(3)) < 1e-12);
    CHECK(norm2(fs.T0()) < 1e-12);
}

TEST_CASE("A = I: J = 0, link I, T0 = I") {
    const auto a = full(eye(4));
    CHECK(norm2(cayley(a).J_matrix) < 1e-12);
    const FormSystem fs = generate_form(a);
    CHECK(norm2(fs.J() - eye(4)) < 1e-12);
    CHECK(norm2(fs.T0() - eye(4)) < 1e-12);
}

TEST_CASE("skew A has a unitary Cayley transform") {
    ComplexMatrix s(2, 2);
    s << 0.0, 1.0, -1.0, 0.0;
    const CayleyData c = cayley(full(s));
    CHECK(norm2(c.J_matrix.adjoint() * c.J_matrix - eye(2)) < 1e-12);
    // (I - S)(I + S)^{-1} for S = [[0, 1], [-1, 0]] is [[0, -1], [1, 0]].
    ComplexMatrix expected(2, 2);
    expected << 0.0, -1.0, 1.0, 0.0;
    CHECK(norm2(c.J_matrix - expected) < 1e-12);
    const FormSystem fs = generate_form(full(s));
    CHECK(norm2(hermitian_part(fs.T0())) < 1e-12);
    CHECK(norm2(build_operator(fs).matrix() - s) < 1e-12);
}

TEST_CASE("roundtrips on random accretive operators") {
    Rng rng(81);
    for (int trial = 0; trial < 200; ++trial) {
        const Index n = 8;
        const ComplexMatrix m = random_accretive(rng, n, uniform_int(rng, 0, 8), uniform(rng, 0.0, 3.0));
        const auto a = full(m);
        const CayleyData c = cayley(a);

        // I + J = 2 (I + A)^{-1}, checked against an independent LU solve.
        const ComplexMatrix inv = (eye(n) + m).partialPivLu().inverse();
        CHECK(norm2(eye(n) + c.J_matrix - 2.0 * inv) < 1e-10 * std::max(1.0, norm2(inv)));

        const AssociatedOperator back = recover_operator(c);
        CHECK(back.full_domain());
        CHECK(norm2(back.matrix() - m) < 1e-10 * std::max(1.0, norm2(m)));

        const FormSystem fs = generate_form(a);
        CHECK(check_condition_i(fs).holds());
        CHECK(check_condition_ii(fs).holds());
        CHECK(kernel(fs.J(), tol).is_zero());
        CHECK(norm2(build_operator(fs).matrix() - m) < 1e-10 * std::max(1.0, norm2(m)));
    }
}

TEST_CASE("Cayley transform is a contraction") {
    Rng rng(82);
    for (int trial = 0; trial < 10; ++trial) {
        const ComplexMatrix m = random_accretive(rng, 6, uniform_int(rng, 0, 6), 2.0);
        const CayleyData c = cayley(full(m));
        for (int k = 0; k < 100; ++k) {
            const ComplexVector x = random_vector(rng, 6);
            CHECK((c.J_matrix * x).norm() <= x.norm() * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("Re a(u, u) = |u|^2 - |Ju|^2 for the generated form") {
    Rng rng(83);
    const ComplexMatrix m = random_accretive(rng, 5, 2, 1.5);
    const CayleyData c = cayley(full(m));
    const FormSystem fs = generate_form(full(m));
    for (int k = 0; k < 50; ++k) {
        const ComplexVector u = random_vector(rng, 5);
        const double re = u.dot(fs.T0() * u).real();
        CHECK(std::abs(re - (u.squaredNorm() - (c.J_matrix * u).squaredNorm())) < 1e-10 * u.squaredNorm());
        CHECK(re >= -1e-12 * u.squaredNorm());
    }
}

TEST_CASE("partial-domain operators: Cayley on rg(I + A) and recovery") {
    // D(A) = span{e1, e2} in C^3 with A e1 = 2 e1 + e3, A e2 = e1 + 0.5 e2.
    ComplexMatrix q = ComplexMatrix::Zero(3, 2);
    q(0, 0) = 1.0;
    q(1, 1) = 1.0;
    ComplexMatrix act = ComplexMatrix::Zero(3, 2);
    act(0, 0) = 2.0;
    act(2, 0) = 1.0;
    act(0, 1) = 1.0;
    act(1, 1) = 0.5;
    const AssociatedOperator a = make_operator(orthonormal_range(q, tol, 1.0), act, tol);
    REQUIRE(a.domain.dim() == 2);
    const CayleyData c = cayley(a);
    CHECK(c.domain_of_J.dim() == 2);
    // J vanishes off rg(I + A).
    CHECK(norm2(c.J_matrix * complement(c.domain_of_J).basis()) < 1e-12);
    const AssociatedOperator back = recover_operator(c);
    CHECK(subspace_relation(back.domain, a.domain, tol).equal());
    CHECK(norm2(back.matrix() - a.matrix()) < 1e-10);
    CHECK_THROWS_AS(generate_form(a), PreconditionError);
}

TEST_CASE("preconditions and degeneracies") {
    ComplexMatrix bad(2, 2);
    bad << -1.0, 0.0, 0.0, 1.0;
    CHECK_THROWS_AS(cayley(full(bad)), PreconditionError);
    CHECK_THROWS_AS(generate_form(full(bad)), PreconditionError);

    // J = -I makes I + J singular.
    const CayleyData c{-eye(2), Subspace::full(2)};
    CHECK_THROWS_AS(recover_operator(c), NumericalDegeneracyError);

    const CayleyData wrong{eye(3), Subspace::full(2)};
    CHECK_THROWS_AS(recover_operator(wrong), DimensionError);
}
