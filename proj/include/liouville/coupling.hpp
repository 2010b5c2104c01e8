#pragma once

#include "liouville/rational.hpp"

#include <string>
#include <vector>

namespace liouville {

/// The 2x2 coupling matrix A = (a_ij). Entries are stored raw; the admissibility hypothesis
/// is checked by validate_hypothesis and enforced by every operation that
/// depends on it.
struct CouplingMatrix {
    Rational a11, a12, a21, a22;

    Rational det() const { return a11 * a22 - a12 * a21; }
    bool operator==(const CouplingMatrix&) const = default;
};

struct HypothesisVerdict {
    /// Names of violated inequalities, e.g. "a21 >= a11"; empty when A is admissible.
    std::vector<std::string> violations;

    bool ok() const { return violations.empty(); }
};

HypothesisVerdict validate_hypothesis(const CouplingMatrix& A);

/// Throws InvalidMatrix listing the violations when A is not admissible.
void require_hypothesis(const CouplingMatrix& A);

enum class RhoUnit { plain, pi };

/// Parameter vector (rho1, rho2). Components are exact rationals, either as
/// plain numbers or as multiples of pi (the natural scale of the critical
/// set). value() gives the floating-point magnitude.
struct RhoVector {
    Rational c1, c2;
    RhoUnit unit = RhoUnit::pi;

    static RhoVector multiples_of_pi(Rational r1, Rational r2) {
        return {std::move(r1), std::move(r2), RhoUnit::pi};
    }
    static RhoVector plain(Rational r1, Rational r2) {
        return {std::move(r1), std::move(r2), RhoUnit::plain};
    }

    double value(int i) const;
    double rho1() const { return value(1); }
    double rho2() const { return value(2); }

    /// Throws InvalidRho unless rho_i >= 0 and rho != (0, 0).
    void validate() const;

    bool operator==(const RhoVector&) const = default;
};

/// Q(rho) = (a11 a21 / a12) rho1^2 + 2 a21 rho1 rho2 + a22 rho2^2, exact.
Rational quadratic_form(const CouplingMatrix& A, const Rational& rho1, const Rational& rho2);
/// L(rho) = (a21 / a12) rho1 + rho2, exact.
Rational linear_form(const CouplingMatrix& A, const Rational& rho1, const Rational& rho2);

double quadratic_form(const CouplingMatrix& A, const RhoVector& rho);
double linear_form(const CouplingMatrix& A, const RhoVector& rho);

/// Symmetric companion system: b11 = a11 a12 / a21, b12 = b21 = a12,
/// b22 = a22, and the first component shifted by log(a21 / a12).
struct SymmetrizedSystem {
    Rational b11, b12, b22;
    Rational shift_ratio;  // a21 / a12
    double shift = 0.0;    // log(shift_ratio)
};

SymmetrizedSystem symmetrize(const CouplingMatrix& A);

enum class RankKind { full_rank, degenerate_proportional, degenerate_equal };

struct RankClass {
    RankKind kind = RankKind::full_rank;
    /// a11 / a21 for the degenerate classes (u1 = ratio * u2 + C).
    Rational ratio;
};

RankClass rank_class(const CouplingMatrix& A);

std::string to_string(RankKind kind);

/// rho_i = (row-i sum of A^{-1}) * 4 pi * gamma_sum, returned as exact
/// multiples of pi.
RhoVector intrinsic_rho(const CouplingMatrix& A, const Rational& gamma_sum);

/// Inverse matrix (a^{ij}); throws SingularMatrix when det A = 0.
CouplingMatrix inverse(const CouplingMatrix& A);

}  // namespace liouville
