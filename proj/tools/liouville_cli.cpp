// Command-line front end: liouville <command> --spec FILE [options]

#include "liouville/commands.hpp"
#include "liouville/errors.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

std::string read_spec(const std::string& path) {
    std::stringstream buf;
    if (path == "-") {
        buf << std::cin.rdbuf();
        return buf.str();
    }
    std::ifstream in(path);
    if (!in) throw liouville::ParseError("spec", "cannot open " + path);
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Degree counting and torus solver for 2x2 singular Liouville systems"};
    app.require_subcommand(1);

    std::string spec_path;
    std::string out_path;
    std::string format = "json";
    std::string cutoff;
    int grid = 0;
    bool parallel = false;
    std::string fields;

    const std::pair<const char*, const char*> commands[] = {
        {"degree", "Leray-Schauder degree at rho"},
        {"spectrum", "critical spectrum and generating-series coefficients up to a cutoff"},
        {"classify", "region O_k containing rho"},
        {"solve", "solve the system on the flat torus"},
        {"sweep", "warm-started solves along a rho path (CSV by default)"},
        {"symmetrize", "symmetric companion matrix and shift"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--spec", spec_path, "JSON problem spec ('-' for stdin)")->required();
        sub->add_option("--out", out_path, "write output to FILE instead of stdout");
        sub->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--cutoff", cutoff, "spectrum cutoff as a rational, e.g. 7/2");
        sub->add_option("--grid", grid, "grid points per axis (solver)");
        sub->add_flag("--parallel", parallel, "sweep: solve steps independently in parallel");
        sub->add_option("--fields", fields, "solve: prefix for u/u* field CSV snapshots");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : liouville::exit_input_error;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    if (command == "sweep" && !app.get_subcommands().front()->count("--format")) format = "csv";

    liouville::CommandResult result;
    try {
        liouville::CommandOptions options;
        options.format = format == "csv" ? liouville::OutputFormat::csv : liouville::OutputFormat::json;
        if (!cutoff.empty()) options.cutoff = liouville::parse_rational(cutoff);
        if (grid > 0) options.grid = grid;
        options.parallel = parallel;
        if (!fields.empty()) options.fields = fields;
        const liouville::ProblemSpec spec = liouville::parse_problem_text(read_spec(spec_path));
        result = liouville::run_command(command, spec, options);
    } catch (const liouville::Error& e) {
        result = liouville::error_result(e);
    }

    if (!out_path.empty() && result.exit_code == liouville::exit_ok) {
        std::ofstream out(out_path);
        if (!out) {
            std::cerr << "cannot write " << out_path << "\n";
            return liouville::exit_input_error;
        }
        out << result.output;
    } else {
        std::cout << result.output;
    }
    return result.exit_code;
}
