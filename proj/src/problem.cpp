#include "liouville/problem.hpp"

#include "liouville/errors.hpp"

namespace liouville {

namespace {

using nlohmann::json;

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

Rational rational_field(const json& v, const std::string& field) {
    try {
        if (v.is_string()) return parse_rational(v.get<std::string>());
        if (v.is_number_integer()) return Rational(v.get<long long>());
        if (v.is_number_float()) return parse_rational(v.dump());
    } catch (const ParseError& e) {
        throw ParseError(field, e.what());
    }
    throw ParseError(field, "expected a rational string such as \"3/2\"");
}

const json& require(const json& j, const char* key, const std::string& field) {
    if (!j.is_object() || !j.contains(key)) throw ParseError(field, std::string("missing key '") + key + "'");
    return j.at(key);
}

template <typename T>
T number_field(const json& j, const char* key, const std::string& field, T fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_number()) throw ParseError(field + "." + key, "expected a number");
    return v.get<T>();
}

}  // namespace

Rational parse_rho_component(const std::string& text, bool& is_pi) {
    std::string s = lower(text);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
    is_pi = false;
    if (s.size() >= 2 && s.compare(s.size() - 2, 2, "pi") == 0) {
        is_pi = true;
        s.erase(s.size() - 2);
        while (!s.empty() && (s.back() == '*' || std::isspace(static_cast<unsigned char>(s.back())))) s.pop_back();
        if (s.empty() || s == "+") return Rational(1);
        if (s == "-") return Rational(-1);
    }
    return parse_rational(s);
}

RhoVector parse_rho(const json& pair, const std::string& field) {
    if (!pair.is_array() || pair.size() != 2) throw ParseError(field, "expected a pair [rho1, rho2]");
    Rational c[2];
    bool pi[2] = {false, false};
    for (int i = 0; i < 2; ++i) {
        const json& v = pair[i];
        try {
            if (v.is_string()) c[i] = parse_rho_component(v.get<std::string>(), pi[i]);
            else c[i] = rational_field(v, field);
        } catch (const ParseError& e) {
            throw ParseError(field, e.what());
        }
    }
    const bool any_pi = pi[0] || pi[1];
    for (int i = 0; i < 2; ++i) {
        if (any_pi && !pi[i] && c[i] != 0) {
            throw ParseError(field, "mixing multiples of pi with plain numbers");
        }
    }
    return {c[0], c[1], any_pi ? RhoUnit::pi : RhoUnit::plain};
}

std::string format_rho_component(const Rational& c, RhoUnit unit) {
    if (unit == RhoUnit::plain) return to_string(c);
    return to_string(c) + "pi";
}

ProblemSpec parse_problem(const json& j) {
    if (!j.is_object()) throw ParseError("spec", "expected a JSON object");
    ProblemSpec spec;

    if (j.contains("topology")) {
        const json& t = j.at("topology");
        const std::string kind = require(t, "kind", "topology").get<std::string>();
        if (kind == "closed_surface") {
            const long g = require(t, "genus", "topology").get<long>();
            if (g < 0) throw ParseError("topology.genus", "must be nonnegative");
            spec.topology = Topology::closed_surface(g);
        } else if (kind == "planar_domain") {
            const long h = require(t, "holes", "topology").get<long>();
            if (h < 0) throw ParseError("topology.holes", "must be nonnegative");
            spec.topology = Topology::planar_domain(h);
        } else {
            throw ParseError("topology.kind", "expected closed_surface or planar_domain");
        }
    }

    if (j.contains("profile")) {
        const json& p = j.at("profile");
        if (p.contains("strengths")) {
            for (const auto& s : p.at("strengths")) {
                spec.profile.strengths.push_back(rational_field(s, "profile.strengths"));
            }
        }
        if (p.contains("points")) {
            for (const auto& pt : p.at("points")) {
                if (!pt.is_array() || pt.size() != 2 || !pt[0].is_number() || !pt[1].is_number()) {
                    throw ParseError("profile.points", "expected [x1, x2] number pairs");
                }
                spec.profile.points.push_back({pt[0].get<double>(), pt[1].get<double>()});
            }
        }
        try {
            spec.profile.validate();
        } catch (const Error& e) {
            throw ParseError("profile", e.what());
        }
    }

    if (j.contains("matrix")) {
        const json& m = j.at("matrix");
        if (!m.is_array() || m.size() != 2 || !m[0].is_array() || !m[1].is_array() || m[0].size() != 2 ||
            m[1].size() != 2) {
            throw ParseError("matrix", "expected [[a11, a12], [a21, a22]]");
        }
        spec.matrix = CouplingMatrix{rational_field(m[0][0], "matrix.a11"), rational_field(m[0][1], "matrix.a12"),
                                     rational_field(m[1][0], "matrix.a21"), rational_field(m[1][1], "matrix.a22")};
    }

    if (j.contains("rho")) spec.rho = parse_rho(j.at("rho"), "rho");

    if (j.contains("hstar")) {
        const json& h = j.at("hstar");
        if (!h.is_array() || h.size() != 2) throw ParseError("hstar", "expected two profiles");
        for (int i = 0; i < 2; ++i) {
            const std::string f = "hstar[" + std::to_string(i) + "]";
            spec.hstar[i].constant = number_field(h[i], "constant", f, 1.0);
            spec.hstar[i].amplitude = number_field(h[i], "amplitude", f, 0.0);
            spec.hstar[i].k1 = number_field(h[i], "k1", f, 1);
            spec.hstar[i].k2 = number_field(h[i], "k2", f, 0);
            if (!(spec.hstar[i].constant > std::abs(spec.hstar[i].amplitude))) {
                throw ParseError(f, "h* must stay positive (constant > |amplitude|)");
            }
        }
    }

    if (j.contains("solver")) {
        const json& s = j.at("solver");
        SolveConfig& c = spec.solver;
        c.grid = number_field(s, "grid", "solver", c.grid);
        c.damping = number_field(s, "damping", "solver", c.damping);
        c.max_iterations = number_field(s, "max_iterations", "solver", c.max_iterations);
        c.tolerance = number_field(s, "tolerance", "solver", c.tolerance);
        c.newton_threshold = number_field(s, "newton_threshold", "solver", c.newton_threshold);
        c.max_newton_steps = number_field(s, "max_newton_steps", "solver", c.max_newton_steps);
        c.green_truncation = number_field(s, "green_truncation", "solver", c.green_truncation);
        c.delta = number_field(s, "delta", "solver", c.delta);
        try {
            c.validate();
        } catch (const Error& e) {
            throw ParseError("solver", e.what());
        }
    }

    if (j.contains("cutoff")) spec.cutoff = rational_field(j.at("cutoff"), "cutoff");

    if (j.contains("path")) {
        const json& p = j.at("path");
        SweepSpec sw;
        sw.path.from = parse_rho(require(p, "from", "path"), "path.from");
        sw.path.to = parse_rho(require(p, "to", "path"), "path.to");
        if (sw.path.from.unit != sw.path.to.unit) {
            // A zero endpoint has no unit of its own.
            auto& zero_end = (sw.path.from.c1 == 0 && sw.path.from.c2 == 0) ? sw.path.from : sw.path.to;
            const auto& other = (&zero_end == &sw.path.from) ? sw.path.to : sw.path.from;
            if (zero_end.c1 != 0 || zero_end.c2 != 0) throw ParseError("path", "endpoints use different units");
            zero_end.unit = other.unit;
        }
        if (p.contains("t")) {
            for (const auto& t : p.at("t")) sw.ts.push_back(rational_field(t, "path.t"));
        } else {
            const long steps = require(p, "steps", "path").get<long>();
            if (steps < 1) throw ParseError("path.steps", "must be >= 1");
            for (long i = 0; i < steps; ++i) {
                sw.ts.push_back(steps == 1 ? Rational(0) : Rational(i, steps - 1));
            }
        }
        spec.sweep = std::move(sw);
    }
    return spec;
}

ProblemSpec parse_problem_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError("spec", e.what());
    }
    try {
        return parse_problem(j);
    } catch (const json::exception& e) {
        throw ParseError("spec", e.what());
    }
}

nlohmann::ordered_json problem_to_json(const ProblemSpec& spec) {
    using ojson = nlohmann::ordered_json;
    ojson j;
    if (spec.topology.kind == Topology::Kind::closed_surface) {
        j["topology"] = {{"kind", "closed_surface"}, {"genus", spec.topology.count}};
    } else {
        j["topology"] = {{"kind", "planar_domain"}, {"holes", spec.topology.count}};
    }
    ojson strengths = ojson::array();
    for (const auto& s : spec.profile.strengths) strengths.push_back(to_string(s));
    ojson points = ojson::array();
    for (const auto& p : spec.profile.points) points.push_back(ojson::array({p[0], p[1]}));
    j["profile"] = {{"strengths", strengths}, {"points", points}};
    if (spec.matrix) {
        const auto& A = *spec.matrix;
        // explicit arrays: a braced list of string pairs would be read as an object
        j["matrix"] = ojson::array({ojson::array({to_string(A.a11), to_string(A.a12)}),
                                    ojson::array({to_string(A.a21), to_string(A.a22)})});
    }
    auto rho_json = [](const RhoVector& r) {
        return ojson::array({format_rho_component(r.c1, r.unit), format_rho_component(r.c2, r.unit)});
    };
    if (spec.rho) j["rho"] = rho_json(*spec.rho);
    ojson h = ojson::array();
    for (const auto& p : spec.hstar) {
        h.push_back({{"constant", p.constant}, {"amplitude", p.amplitude}, {"k1", p.k1}, {"k2", p.k2}});
    }
    j["hstar"] = h;
    const SolveConfig& c = spec.solver;
    j["solver"] = {{"grid", c.grid},
                   {"damping", c.damping},
                   {"max_iterations", c.max_iterations},
                   {"tolerance", c.tolerance},
                   {"newton_threshold", c.newton_threshold},
                   {"max_newton_steps", c.max_newton_steps},
                   {"green_truncation", c.green_truncation},
                   {"delta", c.delta}};
    if (spec.cutoff) j["cutoff"] = to_string(*spec.cutoff);
    if (spec.sweep) {
        ojson ts = ojson::array();
        for (const auto& t : spec.sweep->ts) ts.push_back(to_string(t));
        j["path"] = {{"from", rho_json(spec.sweep->path.from)},
                     {"to", rho_json(spec.sweep->path.to)},
                     {"t", ts}};
    }
    return j;
}

}  // namespace liouville
