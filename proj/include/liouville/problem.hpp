#pragma once

#include "liouville/coupling.hpp"
#include "liouville/degree.hpp"
#include "liouville/solver.hpp"

#include <json.hpp>

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace liouville {

struct SweepSpec {
    RhoPath path;
    std::vector<Rational> ts;

    bool operator==(const SweepSpec& other) const {
        return path.from == other.path.from && path.to == other.path.to && ts == other.ts;
    }
};

/// Declarative problem description read from a JSON spec file. Exact values
/// travel as strings ("p/q", "3/2pi", "1.25").
struct ProblemSpec {
    Topology topology = Topology::torus();
    SingularProfile profile;
    std::optional<CouplingMatrix> matrix;
    std::optional<RhoVector> rho;
    std::array<HStarProfile, 2> hstar{};
    SolveConfig solver;
    std::optional<Rational> cutoff;
    std::optional<SweepSpec> sweep;

    bool operator==(const ProblemSpec&) const = default;
};

/// Parses "2pi", "3/2*pi", "pi", "0", "6.283" into one component; sets
/// `is_pi` when the value carries a pi factor.
Rational parse_rho_component(const std::string& text, bool& is_pi);
RhoVector parse_rho(const nlohmann::json& pair, const std::string& field);
std::string format_rho_component(const Rational& c, RhoUnit unit);

ProblemSpec parse_problem(const nlohmann::json& j);
ProblemSpec parse_problem_text(const std::string& text);
nlohmann::ordered_json problem_to_json(const ProblemSpec& spec);

}  // namespace liouville
