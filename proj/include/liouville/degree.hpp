#pragma once

#include "liouville/coupling.hpp"
#include "liouville/rational.hpp"

#include <array>
#include <map>
#include <optional>
#include <vector>

namespace liouville {

/// Closed surface of genus g (chi = 2 - 2g) or planar domain with h holes
/// (chi = 1 - h). Always an input, never inferred.
struct Topology {
    enum class Kind { closed_surface, planar_domain };

    Kind kind = Kind::closed_surface;
    long count = 1;  // genus or number of holes

    static Topology closed_surface(long genus) { return {Kind::closed_surface, genus}; }
    static Topology planar_domain(long holes) { return {Kind::planar_domain, holes}; }
    static Topology torus() { return closed_surface(1); }
    static Topology sphere() { return closed_surface(0); }

    long euler_char() const { return kind == Kind::closed_surface ? 2 - 2 * count : 1 - count; }
    bool operator==(const Topology&) const = default;
};

using TorusPoint = std::array<double, 2>;

/// Singular sources p_l with strengths gamma_l > -1. Points may be left empty
/// for purely combinatorial use; otherwise there is one point per strength.
struct SingularProfile {
    std::vector<TorusPoint> points;
    std::vector<Rational> strengths;

    std::size_t size() const { return strengths.size(); }
    /// mu_l = 1 + gamma_l
    std::vector<Rational> masses() const;
    Rational gamma_sum() const;
    /// Throws InvalidArgument on gamma_l <= -1, coincident points, points
    /// outside [0,1)^2 or a point/strength count mismatch.
    void validate() const;

    bool operator==(const SingularProfile&) const = default;
};

/// Values n_1 < n_2 < ... (the critical set divided by 8 pi), complete in
/// (0, cutoff].
struct CriticalSpectrum {
    std::vector<Rational> values;
    Rational cutoff;
};

/// Coefficients of g(x) keyed by exponent, exact for all exponents <= cutoff.
/// Zero coefficients are not stored.
struct GeneratingSeries {
    std::map<Rational, Rational> terms;
    Rational cutoff;

    Rational coefficient(const Rational& exponent) const;
};

struct RegionClassification {
    int k = 0;
    double q = 0.0;      // Q(rho)
    double l = 0.0;      // L(rho)
    double ratio = 0.0;  // Q / L
    /// Q / (8 pi L), exact when rho is given in multiples of pi.
    std::optional<Rational> ratio_over_8pi;
    /// n_k and n_{k+1} (n_0 = 0); the region is 8 pi n_k < Q/L < 8 pi n_{k+1}.
    Rational lower, upper;
};

struct DegreeReport {
    RegionClassification region;
    /// b_0 = 1, b_1, ..., b_k at the exponents n_1..n_k.
    std::vector<Rational> coefficients;
    Rational degree;
};

struct PositivityTable {
    /// partial_sums[k] = 1 + sum_{j<=k} b_j for k = 0..k_max
    std::vector<Rational> partial_sums;
    bool all_positive = true;
};

CriticalSpectrum enumerate_spectrum(const SingularProfile& profile, const Rational& cutoff);

GeneratingSeries expand_series(const Topology& topology, const SingularProfile& profile,
                               const Rational& cutoff);

RegionClassification classify(const CouplingMatrix& A, const RhoVector& rho,
                              const SingularProfile& profile);

DegreeReport degree(const CouplingMatrix& A, const RhoVector& rho, const Topology& topology,
                    const SingularProfile& profile);

/// (1/2) prod (1 + gamma_l) for positive integer strengths with odd sum.
Integer torus_odd_degree(const SingularProfile& profile);

PositivityTable positivity_scan(const Topology& topology, const SingularProfile& profile,
                                int k_max);

}  // namespace liouville
