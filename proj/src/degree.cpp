#include "liouville/degree.hpp"

#include "liouville/errors.hpp"

#include <cmath>
#include <numbers>
#include <set>

namespace liouville {

std::vector<Rational> SingularProfile::masses() const {
    std::vector<Rational> mu;
    mu.reserve(strengths.size());
    for (const auto& g : strengths) mu.push_back(1 + g);
    return mu;
}

Rational SingularProfile::gamma_sum() const {
    Rational s = 0;
    for (const auto& g : strengths) s += g;
    return s;
}

void SingularProfile::validate() const {
    for (const auto& g : strengths) {
        if (g <= -1) throw InvalidArgument("singular strength must exceed -1, got " + to_string(g));
    }
    if (points.empty()) return;
    if (points.size() != strengths.size()) {
        throw InvalidArgument("profile has " + std::to_string(points.size()) + " points but " +
                              std::to_string(strengths.size()) + " strengths");
    }
    for (const auto& p : points) {
        for (double x : p) {
            if (!(x >= 0.0 && x < 1.0)) throw InvalidArgument("singular point outside [0,1)^2");
        }
    }
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            if (points[i] == points[j]) throw InvalidArgument("singular points must be distinct");
        }
    }
}

Rational GeneratingSeries::coefficient(const Rational& exponent) const {
    auto it = terms.find(exponent);
    return it == terms.end() ? Rational(0) : it->second;
}

CriticalSpectrum enumerate_spectrum(const SingularProfile& profile, const Rational& cutoff) {
    if (cutoff <= 0) throw InvalidArgument("spectrum cutoff must be positive");
    profile.validate();

    // Subset sums of the masses not exceeding the cutoff (masses are positive).
    std::set<Rational> subset_sums{Rational(0)};
    for (const auto& mu : profile.masses()) {
        std::vector<Rational> added;
        for (const auto& s : subset_sums) {
            Rational t = s + mu;
            if (t <= cutoff) added.push_back(std::move(t));
        }
        subset_sums.insert(added.begin(), added.end());
    }

    std::set<Rational> values;
    for (const auto& s : subset_sums) {
        for (Rational v = s; v <= cutoff; v += 1) {
            if (v > 0) values.insert(v);
        }
    }
    return {std::vector<Rational>(values.begin(), values.end()), cutoff};
}

GeneratingSeries expand_series(const Topology& topology, const SingularProfile& profile,
                               const Rational& cutoff) {
    if (cutoff <= 0) throw InvalidArgument("series cutoff must be positive");
    profile.validate();

    GeneratingSeries series;
    series.cutoff = cutoff;

    // (1 + x + x^2 + ...)^e = (1 - x)^{-e}; for e < 0 this is a binomial.
    const long e = static_cast<long>(profile.size()) - topology.euler_char();
    const long top = static_cast<long>(floor(cutoff));
    for (long m = 0; m <= top; ++m) {
        Integer c;
        if (e >= 0) {
            c = e == 0 ? Integer(m == 0 ? 1 : 0) : binomial(m + e - 1, m);
        } else {
            c = binomial(-e, m);
            if (m % 2 == 1) c = -c;
        }
        if (c != 0) series.terms.emplace(Rational(m), Rational(c));
    }

    for (const auto& mu : profile.masses()) {
        // Multiply by (1 - x^mu), dropping exponents beyond the cutoff.
        std::map<Rational, Rational> next = series.terms;
        for (const auto& [exponent, coeff] : series.terms) {
            Rational shifted = exponent + mu;
            if (shifted > cutoff) break;
            next[shifted] -= coeff;
        }
        std::erase_if(next, [](const auto& kv) { return kv.second == 0; });
        series.terms = std::move(next);
    }
    return series;
}

namespace {

// Digits of pi bracketing it within 1e-60; used to compare Q/(8L) against
// n * pi when rho is not a multiple of pi.
const Rational& pi_lower() {
    static const Rational v = parse_rational(
        "3.141592653589793238462643383279502884197169399375105820974944");
    return v;
}
const Rational& pi_upper() {
    static const Rational v = pi_lower() + Rational(1, Integer("1" + std::string(60, '0')));
    return v;
}

/// Q / (8 pi L), either as an exact rational or as t / pi with t rational.
class RatioOver8Pi {
public:
    RatioOver8Pi(const CouplingMatrix& A, const RhoVector& rho)
        : t_(quadratic_form(A, rho.c1, rho.c2) / (8 * linear_form(A, rho.c1, rho.c2))),
          exact_(rho.unit == RhoUnit::pi) {}

    /// -1, 0, +1 as the ratio is below, on, or above n. Off-pi rationals are
    /// never exactly on n > 0; within 1e-60 of it they are reported as on.
    int compare(const Rational& n) const {
        if (exact_ || n == 0) return t_ < n ? -1 : (t_ > n ? 1 : 0);
        const Rational x = t_ / n;  // compare x with pi
        if (x < pi_lower()) return -1;
        if (x > pi_upper()) return 1;
        return 0;
    }

    Rational upper_bound() const { return exact_ ? t_ : t_ / pi_lower(); }
    std::optional<Rational> exact() const {
        return exact_ ? std::optional<Rational>(t_) : std::nullopt;
    }

private:
    Rational t_;
    bool exact_;
};

}  // namespace

RegionClassification classify(const CouplingMatrix& A, const RhoVector& rho,
                              const SingularProfile& profile) {
    require_hypothesis(A);
    rho.validate();
    profile.validate();

    const RatioOver8Pi r8(A, rho);
    RegionClassification out;
    out.q = quadratic_form(A, rho);
    out.l = linear_form(A, rho);
    out.ratio = out.q / out.l;
    out.ratio_over_8pi = r8.exact();

    // Integers are always in the spectrum, so this cutoff contains n_{k+1}.
    const Rational cutoff = Rational(floor(r8.upper_bound())) + 2;
    const CriticalSpectrum spectrum = enumerate_spectrum(profile, cutoff);

    out.lower = 0;
    for (std::size_t j = 0; j < spectrum.values.size(); ++j) {
        const int c = r8.compare(spectrum.values[j]);
        if (c == 0) {
            throw OnCriticalSet(static_cast<int>(j + 1),
                                "rho lies on Gamma_" + std::to_string(j + 1) + " (Q/L = 8 pi * " +
                                    to_string(spectrum.values[j]) + ")");
        }
        if (c < 0) {
            out.k = static_cast<int>(j);
            out.upper = spectrum.values[j];
            return out;
        }
        out.lower = spectrum.values[j];
    }
    throw std::logic_error("classify: spectrum cutoff too small");
}

DegreeReport degree(const CouplingMatrix& A, const RhoVector& rho, const Topology& topology,
                    const SingularProfile& profile) {
    DegreeReport report;
    report.region = classify(A, rho, profile);
    report.coefficients.push_back(1);
    report.degree = 1;
    if (report.region.k == 0) return report;

    const Rational& cutoff = report.region.lower;
    const CriticalSpectrum spectrum = enumerate_spectrum(profile, cutoff);
    const GeneratingSeries series = expand_series(topology, profile, cutoff);
    for (const auto& n : spectrum.values) {
        Rational b = series.coefficient(n);
        report.degree += b;
        report.coefficients.push_back(std::move(b));
    }
    return report;
}

Integer torus_odd_degree(const SingularProfile& profile) {
    profile.validate();
    if (profile.size() == 0) throw InvalidArgument("torus_odd_degree needs at least one source");
    Integer sum = 0;
    Integer product = 1;
    for (const auto& g : profile.strengths) {
        if (!is_integer(g) || g <= 0) {
            throw InvalidArgument("torus_odd_degree needs positive integer strengths");
        }
        const Integer gi = boost::multiprecision::numerator(g);
        sum += gi;
        product *= 1 + gi;
    }
    if (sum % 2 == 0) throw InvalidArgument("torus_odd_degree needs an odd strength sum");
    return product / 2;
}

PositivityTable positivity_scan(const Topology& topology, const SingularProfile& profile,
                                int k_max) {
    if (k_max < 0) throw InvalidArgument("k_max must be nonnegative");
    if (topology.euler_char() > 0) {
        throw InvalidArgument("positivity scan needs chi <= 0, got chi = " +
                              std::to_string(topology.euler_char()));
    }
    for (const auto& g : profile.strengths) {
        if (!is_integer(g) || g <= 0) {
            throw InvalidArgument("positivity scan needs positive integer strengths");
        }
    }

    PositivityTable table;
    table.partial_sums.push_back(1);
    if (k_max > 0) {
        // Integer strengths make the spectrum exactly {1, 2, 3, ...}.
        const Rational cutoff(k_max);
        const GeneratingSeries series = expand_series(topology, profile, cutoff);
        Rational sum = 1;
        for (int j = 1; j <= k_max; ++j) {
            sum += series.coefficient(Rational(j));
            table.partial_sums.push_back(sum);
        }
    }
    for (const auto& s : table.partial_sums) {
        if (s <= 0) table.all_positive = false;
    }
    return table;
}

}  // namespace liouville
