#include "liouville/commands.hpp"

#include "liouville/errors.hpp"

#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

namespace liouville {

namespace {

using ojson = nlohmann::ordered_json;

std::string csv_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

ojson exact_or_integer(const Rational& r) {
    if (is_integer(r)) {
        const Integer& n = boost::multiprecision::numerator(r);
        if (n >= std::numeric_limits<long long>::min() && n <= std::numeric_limits<long long>::max()) {
            return ojson(n.convert_to<long long>());
        }
    }
    return ojson(to_string(r));
}

const CouplingMatrix& need_matrix(const ProblemSpec& spec) {
    if (!spec.matrix) throw ParseError("matrix", "this command needs a coupling matrix");
    return *spec.matrix;
}

const RhoVector& need_rho(const ProblemSpec& spec) {
    if (!spec.rho) throw ParseError("rho", "this command needs rho");
    return *spec.rho;
}

ojson region_json(const RegionClassification& r) {
    ojson j;
    j["Q"] = r.q;
    j["L"] = r.l;
    j["ratio"] = r.ratio;
    j["ratio_over_8pi"] = r.ratio_over_8pi ? ojson(to_string(*r.ratio_over_8pi)) : ojson(nullptr);
    j["k"] = r.k;
    j["bounds"] = {{"lower_over_8pi", to_string(r.lower)},
                   {"upper_over_8pi", to_string(r.upper)},
                   {"lower", 8.0 * std::numbers::pi * to_double(r.lower)},
                   {"upper", 8.0 * std::numbers::pi * to_double(r.upper)}};
    return j;
}

/// Renders a flat JSON object as a one-row CSV (nested values as JSON text).
std::string flat_csv(const ojson& j) {
    std::string header, row;
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!header.empty()) {
            header += ',';
            row += ',';
        }
        header += it.key();
        const ojson& v = it.value();
        if (v.is_string()) row += v.get<std::string>();
        else if (v.is_number_float()) row += csv_number(v.get<double>());
        else if (v.is_null()) row += "";
        else {
            std::string text = v.dump();
            if (text.find(',') != std::string::npos) {
                std::string quoted = "\"";
                for (char c : text) quoted += c == '"' ? std::string("\"\"") : std::string(1, c);
                text = quoted + "\"";
            }
            row += text;
        }
    }
    return header + "\n" + row + "\n";
}

CommandResult render(const ojson& j, OutputFormat format) {
    if (format == OutputFormat::csv) return {exit_ok, flat_csv(j)};
    return {exit_ok, j.dump(2) + "\n"};
}

CommandResult guarded(const std::function<CommandResult()>& body) {
    try {
        return body();
    } catch (const Error& e) {
        return error_result(e);
    }
}

void write_field(const std::string& path, const ScalarField& f) {
    std::ofstream out(path);
    if (!out) throw InvalidArgument("cannot write " + path);
    write_csv(out, f);
}

}  // namespace

CommandResult error_result(const Error& error) {
    ojson e;
    e["kind"] = error.kind();
    e["message"] = error.what();
    int code = exit_input_error;
    if (const auto* c = dynamic_cast<const OnCriticalSet*>(&error)) {
        e["k"] = c->k();
        code = exit_on_critical_set;
    } else if (const auto* nc = dynamic_cast<const NonConvergence*>(&error)) {
        e["residual_history"] = nc->history();
        code = exit_non_convergence;
    } else if (const auto* im = dynamic_cast<const InvalidMatrix*>(&error)) {
        e["violations"] = im->violations();
    } else if (const auto* pe = dynamic_cast<const ParseError*>(&error)) {
        e["field"] = pe->field();
    } else if (const auto* nr = dynamic_cast<const NegativeIntrinsicRho*>(&error)) {
        e["row"] = nr->row();
    }
    ojson j;
    j["error"] = e;
    return {code, j.dump(2) + "\n"};
}

CommandResult cmd_degree(const ProblemSpec& spec, const CommandOptions& options) {
    return guarded([&] {
        const DegreeReport rep = degree(need_matrix(spec), need_rho(spec), spec.topology, spec.profile);
        ojson j;
        j["region"] = rep.region.k;
        j["ratio"] = rep.region.ratio;
        j["ratio_over_8pi"] =
            rep.region.ratio_over_8pi ? ojson(to_string(*rep.region.ratio_over_8pi)) : ojson(nullptr);
        j["bounds"] = {to_string(rep.region.lower), to_string(rep.region.upper)};
        ojson coeffs = ojson::array();
        for (const auto& b : rep.coefficients) coeffs.push_back(to_string(b));
        j["coefficients"] = coeffs;
        j["euler_char"] = spec.topology.euler_char();
        j["degree"] = exact_or_integer(rep.degree);
        return render(j, options.format);
    });
}

CommandResult cmd_spectrum(const ProblemSpec& spec, const CommandOptions& options) {
    return guarded([&]() -> CommandResult {
        const std::optional<Rational> cutoff = options.cutoff ? options.cutoff : spec.cutoff;
        if (!cutoff) throw ParseError("cutoff", "spectrum needs --cutoff or a spec cutoff");
        const CriticalSpectrum s = enumerate_spectrum(spec.profile, *cutoff);
        const GeneratingSeries g = expand_series(spec.topology, spec.profile, *cutoff);
        Rational partial = 1;
        ojson rows = ojson::array();
        std::string csv = "n,b,partial_sum\n";
        for (const auto& n : s.values) {
            const Rational b = g.coefficient(n);
            partial += b;
            rows.push_back({{"n", to_string(n)}, {"b", to_string(b)}, {"partial_sum", to_string(partial)}});
            csv += to_string(n) + "," + to_string(b) + "," + to_string(partial) + "\n";
        }
        if (options.format == OutputFormat::csv) return {exit_ok, csv};
        return {exit_ok, rows.dump(2) + "\n"};
    });
}

CommandResult cmd_classify(const ProblemSpec& spec, const CommandOptions& options) {
    return guarded([&] {
        return render(region_json(classify(need_matrix(spec), need_rho(spec), spec.profile)), options.format);
    });
}

CommandResult cmd_symmetrize(const ProblemSpec& spec, const CommandOptions& options) {
    return guarded([&] {
        const CouplingMatrix& A = need_matrix(spec);
        const SymmetrizedSystem s = symmetrize(A);
        const RankClass rc = rank_class(A);
        ojson j;
        j["b11"] = to_string(s.b11);
        j["b12"] = to_string(s.b12);
        j["b22"] = to_string(s.b22);
        j["shift"] = s.shift;
        j["shift_ratio"] = to_string(s.shift_ratio);
        j["rank_class"] = to_string(rc.kind);
        if (rc.kind != RankKind::full_rank) j["proportionality"] = to_string(rc.ratio);
        return render(j, options.format);
    });
}

CommandResult cmd_solve(const ProblemSpec& spec, const CommandOptions& options) {
    return guarded([&] {
        if (!(spec.topology == Topology::torus())) {
            throw InvalidArgument("the solver runs on the flat torus only (closed_surface, genus 1)");
        }
        const CouplingMatrix& A = need_matrix(spec);
        const RhoVector& rho = need_rho(spec);
        SolveConfig config = spec.solver;
        if (options.grid) config.grid = *options.grid;
        config.validate();
        const TorusGrid grid(config.grid);
        const FieldPair hstar{spec.hstar[0].sample(grid), spec.hstar[1].sample(grid)};

        const DegreeReport deg = degree(A, rho, spec.topology, spec.profile);
        const SolutionPair sol = solve(A, rho, spec.profile, hstar, config);
        const FieldPair ustar = reconstruct_original(sol, spec.profile, hstar, config.truncation());

        ojson j;
        j["converged"] = true;
        j["region"] = deg.region.k;
        j["degree"] = exact_or_integer(deg.degree);
        j["grid"] = config.grid;
        j["residual"] = sol.residual;
        j["picard_iterations"] = sol.picard_iterations;
        j["newton_steps"] = sol.newton_steps;
        j["normalization"] = {sol.normalization[0], sol.normalization[1]};
        j["max_abs_u"] = {sol.u[0].max_abs(), sol.u[1].max_abs()};
        j["energy"] = A.det() != 0 ? ojson(energy(sol.u, rho, A, sol.weights)) : ojson(nullptr);
        ojson recon = ojson::array();
        for (int i = 0; i < 2; ++i) {
            ScalarField e(grid);
            for (std::size_t k = 0; k < e.values.size(); ++k) {
                e.values[k] = hstar[i].values[k] * std::exp(ustar[i].values[k]);
            }
            recon.push_back(quadrature(e));
        }
        j["reconstructed_normalization"] = recon;
        ojson masses = ojson::array();
        if (spec.profile.size() > 0) {
            const LocalMassReport lm = local_masses(sol, rho, A, spec.profile, config.delta);
            for (const auto& m : lm.entries) {
                masses.push_back({{"point", {m.point[0], m.point[1]}},
                                  {"mu", to_string(m.mu)},
                                  {"sigma1", m.sigma1},
                                  {"sigma2", m.sigma2},
                                  {"pohozaev", m.pohozaev}});
            }
        }
        j["local_masses"] = masses;
        const RankClass rc = rank_class(A);
        j["rank_class"] = to_string(rc.kind);
        if (rc.kind != RankKind::full_rank) {
            const double a = to_double(rc.ratio);
            double dev = 0.0, mean = 0.0;
            ScalarField diff(grid);
            for (std::size_t k = 0; k < diff.values.size(); ++k) {
                diff.values[k] = sol.u[0].values[k] - a * sol.u[1].values[k];
            }
            mean = quadrature(diff);
            for (double v : diff.values) dev = std::max(dev, std::abs(v - mean));
            j["degenerate_constant"] = mean;
            j["degenerate_deviation"] = dev;
        }
        if (options.fields) {
            write_field(*options.fields + "_u1.csv", sol.u[0]);
            write_field(*options.fields + "_u2.csv", sol.u[1]);
            write_field(*options.fields + "_u1star.csv", ustar[0]);
            write_field(*options.fields + "_u2star.csv", ustar[1]);
        }
        return render(j, options.format);
    });
}

CommandResult cmd_sweep(const ProblemSpec& spec, const CommandOptions& options) {
    return guarded([&]() -> CommandResult {
        if (!(spec.topology == Topology::torus())) {
            throw InvalidArgument("the solver runs on the flat torus only (closed_surface, genus 1)");
        }
        if (!spec.sweep) throw ParseError("path", "sweep needs a path");
        const CouplingMatrix& A = need_matrix(spec);
        SolveConfig config = spec.solver;
        if (options.grid) config.grid = *options.grid;
        config.validate();
        const TorusGrid grid(config.grid);
        const FieldPair hstar{spec.hstar[0].sample(grid), spec.hstar[1].sample(grid)};
        const auto records =
            sweep(spec.sweep->path, spec.sweep->ts, A, spec.profile, hstar, config, options.parallel);

        if (options.format == OutputFormat::csv) {
            std::ostringstream out;
            write_sweep_csv(out, records, spec.profile.size());
            return {exit_ok, out.str()};
        }
        ojson rows = ojson::array();
        for (const auto& r : records) {
            ojson row;
            row["t"] = to_string(r.t);
            row["rho"] = {format_rho_component(r.rho.c1, r.rho.unit), format_rho_component(r.rho.c2, r.rho.unit)};
            row["region"] = r.region ? ojson(*r.region) : ojson(nullptr);
            row["critical_k"] = r.critical_k ? ojson(*r.critical_k) : ojson(nullptr);
            row["converged"] = r.converged;
            row["residual"] = r.region ? ojson(r.residual) : ojson(nullptr);
            row["max_u"] = {r.max_u1, r.max_u2};
            row["J"] = r.energy ? ojson(*r.energy) : ojson(nullptr);
            row["normalization_error"] = r.normalization_error ? ojson(*r.normalization_error) : ojson(nullptr);
            row["sigma"] = r.sigma;
            row["failure"] = r.failure;
            rows.push_back(row);
        }
        return {exit_ok, rows.dump(2) + "\n"};
    });
}

CommandResult run_command(const std::string& name, const ProblemSpec& spec, const CommandOptions& options) {
    if (name == "degree") return cmd_degree(spec, options);
    if (name == "spectrum") return cmd_spectrum(spec, options);
    if (name == "classify") return cmd_classify(spec, options);
    if (name == "symmetrize") return cmd_symmetrize(spec, options);
    if (name == "solve") return cmd_solve(spec, options);
    if (name == "sweep") return cmd_sweep(spec, options);
    return error_result(InvalidArgument("unknown command '" + name + "'"));
}

}  // namespace liouville
