#include "liouville/commands.hpp"
#include "liouville/errors.hpp"
#include "liouville/solver.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace liouville;

namespace {

// Rationals cross the boundary as fractions.Fraction; inputs may be Fraction, int or "p/q" strings.
py::object to_fraction(const Rational& r) {
    static py::object fraction = py::module_::import("fractions").attr("Fraction");
    return fraction(to_string(r));
}

Rational from_py(const py::handle& h) {
    if (py::isinstance<py::float_>(h)) return parse_rational(py::str(py::repr(h)).cast<std::string>());
    return parse_rational(py::str(h).cast<std::string>());
}

std::vector<Rational> rationals(const py::iterable& xs) {
    std::vector<Rational> out;
    for (const auto& x : xs) out.push_back(from_py(x));
    return out;
}

CouplingMatrix matrix(const py::sequence& rows) {
    if (py::len(rows) != 2) throw InvalidArgument("matrix must be 2x2");
    const py::sequence r0 = rows[0], r1 = rows[1];
    if (py::len(r0) != 2 || py::len(r1) != 2) throw InvalidArgument("matrix must be 2x2");
    return {from_py(r0[0]), from_py(r0[1]), from_py(r1[0]), from_py(r1[1])};
}

RhoVector rho_vector(const py::sequence& rho, bool pi_units) {
    if (py::len(rho) != 2) throw InvalidArgument("rho must have two components");
    return {from_py(rho[0]), from_py(rho[1]), pi_units ? RhoUnit::pi : RhoUnit::plain};
}

SingularProfile profile(const py::iterable& strengths, const py::object& points) {
    SingularProfile p;
    p.strengths = rationals(strengths);
    if (!points.is_none()) p.points = points.cast<std::vector<TorusPoint>>();
    p.validate();
    return p;
}

Topology topology(const std::string& kind, long count) {
    if (kind == "closed_surface") return Topology::closed_surface(count);
    if (kind == "planar_domain") return Topology::planar_domain(count);
    throw InvalidArgument("topology kind must be closed_surface or planar_domain");
}

py::array_t<double> to_array(const ScalarField& f) {
    const int n = f.grid.n();
    py::array_t<double> out({n, n});
    std::copy(f.values.begin(), f.values.end(), out.mutable_data());
    return out;
}

py::dict region_dict(const RegionClassification& r) {
    py::dict d;
    d["k"] = r.k;
    d["Q"] = r.q;
    d["L"] = r.l;
    d["ratio"] = r.ratio;
    d["ratio_over_8pi"] = r.ratio_over_8pi ? to_fraction(*r.ratio_over_8pi) : py::none();
    d["lower_over_8pi"] = to_fraction(r.lower);
    d["upper_over_8pi"] = to_fraction(r.upper);
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Degree counting and torus solver for 2x2 singular Liouville systems";

    auto make_exception = [&](const char* name, PyObject* parent) {
        const std::string qualified = std::string("liouville._core.") + name;
        py::object cls = py::reinterpret_steal<py::object>(PyErr_NewException(qualified.c_str(), parent, nullptr));
        m.attr(name) = cls;
        return cls;
    };
    py::object base = make_exception("LiouvilleError", PyExc_ValueError);
    make_exception("OnCriticalSet", base.ptr());
    make_exception("NonConvergence", base.ptr());
    py::register_exception_translator([](std::exception_ptr p) {
        auto raise = [](const char* name, const Error& e, const char* attr, py::object value) {
            py::object cls = py::module_::import("liouville._core").attr(name);
            py::object exc = cls(e.what());
            exc.attr("kind") = e.kind();
            if (attr) exc.attr(attr) = value;
            PyErr_SetObject(cls.ptr(), exc.ptr());
        };
        try {
            if (p) std::rethrow_exception(p);
        } catch (const OnCriticalSet& e) {
            raise("OnCriticalSet", e, "k", py::int_(e.k()));
        } catch (const NonConvergence& e) {
            raise("NonConvergence", e, "history", py::cast(e.history()));
        } catch (const Error& e) {
            raise("LiouvilleError", e, nullptr, py::none());
        }
    });

    m.def("validate_hypothesis", [](const py::sequence& A) { return validate_hypothesis(matrix(A)).violations; },
          py::arg("matrix"), "Names of the violated sign/order conditions (empty when admissible).");

    m.def("symmetrize", [](const py::sequence& A) {
        const auto s = symmetrize(matrix(A));
        py::dict d;
        d["b11"] = to_fraction(s.b11);
        d["b12"] = to_fraction(s.b12);
        d["b22"] = to_fraction(s.b22);
        d["shift_ratio"] = to_fraction(s.shift_ratio);
        d["shift"] = s.shift;
        return d;
    }, py::arg("matrix"));

    m.def("rank_class", [](const py::sequence& A) {
        const auto r = rank_class(matrix(A));
        return py::make_tuple(to_string(r.kind), to_fraction(r.ratio));
    }, py::arg("matrix"));

    m.def("intrinsic_rho", [](const py::sequence& A, const py::object& gamma_sum) {
        const auto r = intrinsic_rho(matrix(A), from_py(gamma_sum));
        return py::make_tuple(to_fraction(r.c1), to_fraction(r.c2));
    }, py::arg("matrix"), py::arg("gamma_sum"), "Intrinsic rho as multiples of pi.");

    m.def("spectrum", [](const py::iterable& strengths, const py::object& cutoff) {
        py::list out;
        for (const auto& v : enumerate_spectrum(profile(strengths, py::none()), from_py(cutoff)).values) {
            out.append(to_fraction(v));
        }
        return out;
    }, py::arg("strengths"), py::arg("cutoff"));

    m.def("series", [](const py::iterable& strengths, const py::object& cutoff, const std::string& kind, long count) {
        py::dict out;
        const auto g = expand_series(topology(kind, count), profile(strengths, py::none()), from_py(cutoff));
        for (const auto& [e, c] : g.terms) out[to_fraction(e)] = to_fraction(c);
        return out;
    }, py::arg("strengths"), py::arg("cutoff"), py::arg("kind") = "closed_surface", py::arg("count") = 1);

    m.def("classify", [](const py::sequence& A, const py::sequence& rho, const py::iterable& strengths, bool pi_units) {
        return region_dict(classify(matrix(A), rho_vector(rho, pi_units), profile(strengths, py::none())));
    }, py::arg("matrix"), py::arg("rho"), py::arg("strengths") = py::list(), py::arg("pi_units") = true);

    m.def("degree", [](const py::sequence& A, const py::sequence& rho, const py::iterable& strengths,
                       const std::string& kind, long count, bool pi_units) {
        const auto r = degree(matrix(A), rho_vector(rho, pi_units), topology(kind, count),
                              profile(strengths, py::none()));
        py::dict d = region_dict(r.region);
        py::list coeffs;
        for (const auto& b : r.coefficients) coeffs.append(to_fraction(b));
        d["coefficients"] = coeffs;
        d["degree"] = to_fraction(r.degree);
        return d;
    }, py::arg("matrix"), py::arg("rho"), py::arg("strengths") = py::list(), py::arg("kind") = "closed_surface",
       py::arg("count") = 1, py::arg("pi_units") = true);

    m.def("torus_odd_degree", [](const py::iterable& strengths) {
        return to_fraction(Rational(torus_odd_degree(profile(strengths, py::none()))));
    }, py::arg("strengths"));

    m.def("solve", [](const py::sequence& A, const py::sequence& rho, const py::iterable& strengths,
                      const py::object& points, int grid, bool pi_units) {
        const auto prof = profile(strengths, points);
        SolveConfig config;
        config.grid = grid;
        const TorusGrid g(grid);
        const FieldPair hstar{ScalarField(g, 1.0), ScalarField(g, 1.0)};
        const CouplingMatrix a = matrix(A);
        const RhoVector r = rho_vector(rho, pi_units);
        std::optional<SolutionPair> result;
        {
            py::gil_scoped_release release;
            result = solve(a, r, prof, hstar, config);
        }
        const SolutionPair& sol = *result;
        py::dict d;
        d["u1"] = to_array(sol.u[0]);
        d["u2"] = to_array(sol.u[1]);
        d["residual"] = sol.residual;
        d["picard_iterations"] = sol.picard_iterations;
        d["newton_steps"] = sol.newton_steps;
        d["normalization"] = py::make_tuple(sol.normalization[0], sol.normalization[1]);
        return d;
    }, py::arg("matrix"), py::arg("rho"), py::arg("strengths") = py::list(), py::arg("points") = py::none(),
       py::arg("grid") = 64, py::arg("pi_units") = true, "Solve on the unit torus with h* = 1.");

    m.def("run_command", [](const std::string& name, const std::string& spec_json, const std::string& format) {
        CommandOptions opt;
        if (format == "csv") opt.format = OutputFormat::csv;
        else if (format != "json") throw InvalidArgument("format must be json or csv");
        CommandResult r;
        try {
            const ProblemSpec spec = parse_problem_text(spec_json);
            py::gil_scoped_release release;
            r = run_command(name, spec, opt);
        } catch (const Error& e) {
            r = error_result(e);
        }
        return py::make_tuple(r.exit_code, r.output);
    }, py::arg("name"), py::arg("spec_json"), py::arg("format") = "json",
       "Run a CLI command on a JSON spec; returns (exit_code, output).");
}
