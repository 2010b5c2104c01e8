#pragma once

#include "liouville/problem.hpp"

#include <optional>
#include <string>

namespace liouville {

/// Stable process exit codes shared by every command.
enum ExitCode : int {
    exit_ok = 0,
    exit_input_error = 1,
    exit_on_critical_set = 2,
    exit_non_convergence = 3,
};

enum class OutputFormat { json, csv };

struct CommandResult {
    int exit_code = exit_ok;
    std::string output;
};

struct CommandOptions {
    OutputFormat format = OutputFormat::json;
    std::optional<Rational> cutoff;     // overrides spec.cutoff
    std::optional<int> grid;            // overrides spec.solver.grid
    bool parallel = false;              // sweep only
    std::optional<std::string> fields;  // solve only: prefix for field CSV snapshots
};

CommandResult cmd_degree(const ProblemSpec& spec, const CommandOptions& options = {});
CommandResult cmd_spectrum(const ProblemSpec& spec, const CommandOptions& options = {});
CommandResult cmd_classify(const ProblemSpec& spec, const CommandOptions& options = {});
CommandResult cmd_symmetrize(const ProblemSpec& spec, const CommandOptions& options = {});
CommandResult cmd_solve(const ProblemSpec& spec, const CommandOptions& options = {});
CommandResult cmd_sweep(const ProblemSpec& spec, const CommandOptions& options = {});

/// Dispatches by name ("degree", "spectrum", ...); unknown names are input errors.
CommandResult run_command(const std::string& name, const ProblemSpec& spec,
                          const CommandOptions& options = {});

/// JSON error object {"error": {"kind", "message", ...}} with the matching exit code.
CommandResult error_result(const Error& error);

}  // namespace liouville
