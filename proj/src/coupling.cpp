#include "liouville/coupling.hpp"

#include "liouville/errors.hpp"

#include <cmath>
#include <numbers>

namespace liouville {

HypothesisVerdict validate_hypothesis(const CouplingMatrix& A) {
    HypothesisVerdict v;
    if (A.a11 < 0) v.violations.emplace_back("a11 >= 0");
    if (A.a22 < 0) v.violations.emplace_back("a22 >= 0");
    if (A.a12 <= 0) v.violations.emplace_back("a12 > 0");
    if (A.a21 <= 0) v.violations.emplace_back("a21 > 0");
    if (A.a21 < A.a11) v.violations.emplace_back("a21 >= a11");
    if (A.a12 < A.a22) v.violations.emplace_back("a12 >= a22");
    return v;
}

void require_hypothesis(const CouplingMatrix& A) {
    auto verdict = validate_hypothesis(A);
    if (verdict.ok()) return;
    std::string msg = "coupling matrix is not admissible:";
    for (const auto& s : verdict.violations) msg += " [" + s + "]";
    throw InvalidMatrix(msg, std::move(verdict.violations));
}

double RhoVector::value(int i) const {
    const double c = to_double(i == 1 ? c1 : c2);
    return unit == RhoUnit::pi ? c * std::numbers::pi : c;
}

void RhoVector::validate() const {
    if (c1 < 0 || c2 < 0) throw InvalidRho("rho components must be nonnegative");
    if (c1 == 0 && c2 == 0) throw InvalidRho("rho = (0, 0) is not admissible");
}

Rational quadratic_form(const CouplingMatrix& A, const Rational& rho1, const Rational& rho2) {
    require_hypothesis(A);
    return A.a11 * A.a21 / A.a12 * rho1 * rho1 + 2 * A.a21 * rho1 * rho2 + A.a22 * rho2 * rho2;
}

Rational linear_form(const CouplingMatrix& A, const Rational& rho1, const Rational& rho2) {
    require_hypothesis(A);
    return A.a21 / A.a12 * rho1 + rho2;
}

double quadratic_form(const CouplingMatrix& A, const RhoVector& rho) {
    const double q = to_double(quadratic_form(A, rho.c1, rho.c2));
    return rho.unit == RhoUnit::pi ? q * std::numbers::pi * std::numbers::pi : q;
}

double linear_form(const CouplingMatrix& A, const RhoVector& rho) {
    const double l = to_double(linear_form(A, rho.c1, rho.c2));
    return rho.unit == RhoUnit::pi ? l * std::numbers::pi : l;
}

SymmetrizedSystem symmetrize(const CouplingMatrix& A) {
    require_hypothesis(A);
    SymmetrizedSystem s;
    s.b11 = A.a11 * A.a12 / A.a21;
    s.b12 = A.a12;
    s.b22 = A.a22;
    s.shift_ratio = A.a21 / A.a12;
    s.shift = std::log(to_double(s.shift_ratio));
    return s;
}

RankClass rank_class(const CouplingMatrix& A) {
    if (A.det() != 0) return {RankKind::full_rank, Rational(0)};
    if (A.a21 == 0) throw InvalidMatrix("rank class needs a21 > 0", {"a21 > 0"});
    if (A.a11 == A.a21) return {RankKind::degenerate_equal, Rational(1)};
    return {RankKind::degenerate_proportional, A.a11 / A.a21};
}

std::string to_string(RankKind kind) {
    switch (kind) {
        case RankKind::full_rank: return "full_rank";
        case RankKind::degenerate_proportional: return "degenerate_proportional";
        case RankKind::degenerate_equal: return "degenerate_equal";
    }
    return "unknown";
}

CouplingMatrix inverse(const CouplingMatrix& A) {
    const Rational d = A.det();
    if (d == 0) throw SingularMatrix("coupling matrix is singular (det A = 0)");
    return {A.a22 / d, -A.a12 / d, -A.a21 / d, A.a11 / d};
}

RhoVector intrinsic_rho(const CouplingMatrix& A, const Rational& gamma_sum) {
    const CouplingMatrix inv = inverse(A);
    const Rational row1 = inv.a11 + inv.a12;
    const Rational row2 = inv.a21 + inv.a22;
    if (row1 < 0) throw NegativeIntrinsicRho(1, "row 1 of A^{-1} sums to " + to_string(row1));
    if (row2 < 0) throw NegativeIntrinsicRho(2, "row 2 of A^{-1} sums to " + to_string(row2));
    RhoVector rho = RhoVector::multiples_of_pi(4 * row1 * gamma_sum, 4 * row2 * gamma_sum);
    rho.validate();
    return rho;
}

}  // namespace liouville
