#include <doctest.h>

#include "liouville/coupling.hpp"
#include "liouville/errors.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <random>

using namespace liouville;

namespace {

CouplingMatrix M(Rational a11, Rational a12, Rational a21, Rational a22) { return {a11, a12, a21, a22}; }

bool has(const HypothesisVerdict& v, const std::string& name) {
    return std::find(v.violations.begin(), v.violations.end(), name) != v.violations.end();
}

CouplingMatrix random_admissible(std::mt19937& rng) {
    for (;;) {
        CouplingMatrix A{oracle::random_rational(rng, 0, 4, 4), oracle::random_rational(rng, 0, 4, 4),
                         oracle::random_rational(rng, 0, 4, 4), oracle::random_rational(rng, 0, 4, 4)};
        if (validate_hypothesis(A).ok()) return A;
    }
}

}  // namespace

TEST_CASE("hypothesis examples") {
    CHECK(validate_hypothesis(M(0, 2, 2, 0)).ok());
    CHECK(validate_hypothesis(M(1, 1, 1, 1)).ok());
    CHECK(validate_hypothesis(M(1, 3, 2, 2)).ok());
    const auto v = validate_hypothesis(M(2, 1, 1, 2));
    CHECK_FALSE(v.ok());
    CHECK(has(v, "a21 >= a11"));
    CHECK(has(v, "a12 >= a22"));
    CHECK(has(validate_hypothesis(M(0, 0, 1, 0)), "a12 > 0"));
    CHECK(has(validate_hypothesis(M(-1, 1, 1, 0)), "a11 >= 0"));
    CHECK_THROWS_AS(require_hypothesis(M(2, 1, 1, 2)), InvalidMatrix);
}

TEST_CASE("quadratic and linear forms") {
    // A = [[0,2],[2,0]], rho = (2,2): Q = 8 rho1 rho2 / 2 ... = 2*2*2*2 = 16, L = 4
    CHECK(quadratic_form(M(0, 2, 2, 0), 2, 2) == 16);
    CHECK(linear_form(M(0, 2, 2, 0), 2, 2) == 4);
    CHECK(quadratic_form(M(1, 1, 1, 1), 3, 5) == 64);
    CHECK(linear_form(M(1, 1, 1, 1), 3, 5) == 8);
    CHECK(quadratic_form(M(3, 2, 4, 1), 0, 0) == 0);
}

TEST_CASE("symmetrize examples") {
    const auto s = symmetrize(M(1, 3, 2, 2));
    CHECK(s.shift_ratio == Rational(2, 3));
    CHECK(s.b11 == Rational(3, 2));
    CHECK(s.b12 == Rational(3, 2) * 2);
    CHECK(s.b22 == 2);
    CHECK(s.shift == doctest::Approx(std::log(2.0 / 3.0)));
}

TEST_CASE("symmetrization identity Q(rho) = rho~^T B rho~ on random inputs") {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const auto A = random_admissible(rng);
        const Rational r1 = oracle::random_rational(rng, 0, 10, 6), r2 = oracle::random_rational(rng, 0, 10, 6);
        const auto s = symmetrize(A);
        const Rational t1 = s.shift_ratio * r1;
        const Rational lhs = s.b11 * t1 * t1 + 2 * s.b12 * t1 * r2 + s.b22 * r2 * r2;
        CHECK(lhs == quadratic_form(A, r1, r2));
        // Q/L is homogeneous of degree one
        const Rational lam = oracle::random_rational(rng, 1, 5, 5);
        const Rational l = linear_form(A, r1, r2);
        if (l != 0) {
            CHECK(quadratic_form(A, lam * r1, lam * r2) / linear_form(A, lam * r1, lam * r2) ==
                  lam * quadratic_form(A, r1, r2) / l);
        }
    }
}

TEST_CASE("single-equation reduction: rho2 = 0 gives Q/L = a11 rho1") {
    std::mt19937 rng(12);
    for (int trial = 0; trial < 100; ++trial) {
        const auto A = random_admissible(rng);
        const Rational r1 = oracle::random_rational(rng, 1, 10, 6);
        CHECK(quadratic_form(A, r1, 0) / linear_form(A, r1, 0) == A.a11 * r1);
    }
}

TEST_CASE("rank classes") {
    CHECK(rank_class(M(0, 2, 2, 0)).kind == RankKind::full_rank);
    const auto eq = rank_class(M(1, 1, 1, 1));
    CHECK(eq.kind == RankKind::degenerate_equal);
    const auto prop = rank_class(M(1, 4, 2, 8));
    CHECK(prop.kind == RankKind::degenerate_proportional);
    CHECK(prop.ratio == Rational(1, 2));
    CHECK_THROWS_AS(rank_class(M(0, 0, 0, 1)), InvalidMatrix);
    CHECK(to_string(RankKind::degenerate_equal) == "degenerate_equal");
}

TEST_CASE("inverse against the cofactor formula") {
    std::mt19937 rng(13);
    int checked = 0;
    while (checked < 100) {
        const auto A = random_admissible(rng);
        if (A.det() == 0) {
            CHECK_THROWS_AS(inverse(A), SingularMatrix);
            continue;
        }
        const auto inv = inverse(A);
        const auto ref = oracle::cofactor_inverse(A.a11, A.a12, A.a21, A.a22);
        CHECK(inv.a11 == ref[0]);
        CHECK(inv.a12 == ref[1]);
        CHECK(inv.a21 == ref[2]);
        CHECK(inv.a22 == ref[3]);
        ++checked;
    }
    CHECK_THROWS_AS(inverse(M(1, 1, 1, 1)), SingularMatrix);
}

TEST_CASE("intrinsic rho") {
    // A = [[0,2],[2,0]]: A^{-1} row sums are (1/2, 1/2)
    const auto r = intrinsic_rho(M(0, 2, 2, 0), 3);
    CHECK(r.unit == RhoUnit::pi);
    CHECK(r.c1 == 6);
    CHECK(r.c2 == 6);
    // A = [[1,3],[2,2]]: inverse rows (-1/2, 3/4), (1/2, -1/4)
    const auto s = intrinsic_rho(M(1, 3, 2, 2), 1);
    CHECK(s.c1 == 1);
    CHECK(s.c2 == 1);
    // A = [[0,1],[1,1]]: inverse rows (-1, 1), (1, 0)
    const auto z = intrinsic_rho(M(0, 1, 1, 1), 1);
    CHECK(z.c1 == 0);
    CHECK(z.c2 == 4);
    CHECK_THROWS_AS(intrinsic_rho(M(1, 1, 1, 1), 1), SingularMatrix);
    CHECK_THROWS_AS(intrinsic_rho(M(2, 2, 2, 2), 1), SingularMatrix);
    CHECK(intrinsic_rho(M(0, 2, 2, 0), 2) == RhoVector::multiples_of_pi(4, 4));
    // outside the hypothesis: [[2,3],[1,1]]^{-1} = [[-1,3],[1,-2]], second row sums to -1
    try {
        intrinsic_rho(M(2, 3, 1, 1), 1);
        FAIL("expected NegativeIntrinsicRho");
    } catch (const NegativeIntrinsicRho& e) {
        CHECK(e.row() == 2);
    }
}

TEST_CASE("det A <= 0 under the hypothesis, so intrinsic rho is never negative") {
    std::mt19937 rng(14);
    for (int trial = 0; trial < 200; ++trial) {
        const auto A = random_admissible(rng);
        CHECK(A.det() <= 0);
        if (A.det() == 0) continue;
        const auto r = intrinsic_rho(A, oracle::random_rational(rng, 1, 6, 3));
        CHECK(r.c1 >= 0);
        CHECK(r.c2 >= 0);
    }
}
