#pragma once

#include "liouville/coupling.hpp"
#include "liouville/degree.hpp"
#include "liouville/errors.hpp"
#include "liouville/torus_field.hpp"

#include <array>
#include <iosfwd>
#include <optional>
#include <vector>

namespace liouville {

using FieldPair = std::array<ScalarField, 2>;

struct SolveConfig {
    int grid = 128;
    double damping = 0.5;          // Picard relaxation, in (0, 1]
    int max_iterations = 400;      // Picard budget
    double tolerance = 1e-10;      // on ||u - T(u)||_inf
    /// Picard is declared stalled once the per-step residual ratio stays above
    /// this value for three consecutive steps; Newton-Krylov takes over.
    double newton_threshold = 0.9;
    int max_newton_steps = 40;
    int green_truncation = 0;      // 0 selects 2 * grid
    double delta = 0.125;          // local mass radius

    int truncation() const { return green_truncation > 0 ? green_truncation : 2 * grid; }
    void validate() const;
    bool operator==(const SolveConfig&) const = default;
};

/// Converged mean-zero solution of the regularized system together with the
/// weights it was computed against.
struct SolutionPair {
    FieldPair u;
    FieldPair weights;
    std::array<double, 2> normalization{};  // integral of h_i e^{u_i}
    double residual = 0.0;
    int picard_iterations = 0;
    int newton_steps = 0;
    std::vector<double> history;  // residual after each iteration
};

/// Solver gave up. Carries the residual history and the last iterate.
class NonConvergence : public Error {
public:
    NonConvergence(const std::string& message, std::vector<double> history, FieldPair last)
        : Error("NonConvergence", message), history_(std::move(history)), last_(std::move(last)) {}

    const std::vector<double>& history() const noexcept { return history_; }
    const FieldPair& last_iterate() const noexcept { return last_; }

private:
    std::vector<double> history_;
    FieldPair last_;
};

/// Smooth positive h*(x) = constant + amplitude cos(2 pi (k1 x1 + k2 x2)).
struct HStarProfile {
    double constant = 1.0;
    double amplitude = 0.0;
    int k1 = 1;
    int k2 = 0;

    ScalarField sample(const TorusGrid& grid) const;
    bool operator==(const HStarProfile&) const = default;
};

FieldPair zero_pair(const TorusGrid& grid);

/// T_rho(u)_i = (-Delta)^{-1} sum_j a_ij rho_j (h_j e^{u_j} / int h_j e^{u_j} - 1).
FieldPair fixed_point_map(const FieldPair& u, const RhoVector& rho, const CouplingMatrix& A,
                          const FieldPair& weights);

/// ||u - T_rho(u)||_inf over both components.
double residual(const FieldPair& u, const RhoVector& rho, const CouplingMatrix& A,
                const FieldPair& weights);

/// Solve with prebuilt weights; no classification check. `initial` warm-starts.
SolutionPair solve_weighted(const CouplingMatrix& A, const RhoVector& rho, const FieldPair& weights,
                            const SolveConfig& config, const FieldPair* initial = nullptr);

/// Full pipeline on the flat torus: validates A and rho, rejects rho on a
/// critical hypersurface (OnCriticalSet), builds the singular weights and
/// solves from u = 0 (or `initial`).
SolutionPair solve(const CouplingMatrix& A, const RhoVector& rho, const SingularProfile& profile,
                   const FieldPair& hstar, const SolveConfig& config,
                   const FieldPair* initial = nullptr);

struct LocalMass {
    TorusPoint point;
    Rational mu;
    double sigma1 = 0.0;     // (a21/a12) / (2 pi) * ball integral of rho1 w1
    double sigma2 = 0.0;     // 1 / (2 pi) * ball integral of rho2 w2
    double pohozaev = 0.0;   // sum b_ij sigma_i sigma_j - 4 mu sum sigma_i
};

struct LocalMassReport {
    std::vector<LocalMass> entries;
    /// For det A = 0: C in u1 = (a11/a21) u2 + C, and the sup deviation from it.
    std::optional<double> degenerate_constant;
    std::optional<double> degenerate_deviation;
};

LocalMassReport local_masses(const SolutionPair& solution, const RhoVector& rho,
                             const CouplingMatrix& A, const SingularProfile& profile, double delta);

/// J_rho(u) = 1/2 int sum a^{ij} grad u_i . grad u_j - sum rho_i log int h_i e^{u_i}.
double energy(const FieldPair& u, const RhoVector& rho, const CouplingMatrix& A,
              const FieldPair& weights);

/// Residual of the symmetrized system for U = (u1 + log(a21/a12), u2):
/// sup |U_i - mean U_i - (-Delta)^{-1} sum_j b_ij (H_j e^{U_j} - rho~_j)| with
/// H_j = rho_j h_j / int h_j e^{u_j} and rho~ = ((a21/a12) rho1, rho2).
double symmetrized_residual(const SolutionPair& solution, const RhoVector& rho,
                            const CouplingMatrix& A);

/// u_i^* = u_i - 4 pi sum gamma_l G(., p_l) + c_i with int h_i^* e^{u_i^*} = 1.
FieldPair reconstruct_original(const SolutionPair& solution, const SingularProfile& profile,
                               const FieldPair& hstar, int truncation);

/// Straight segment rho(t) = from + t (to - from); both ends share a unit.
struct RhoPath {
    RhoVector from;
    RhoVector to;

    RhoVector at(const Rational& t) const;
};

struct SweepRecord {
    Rational t;
    RhoVector rho;
    std::optional<int> region;       // k, when off the critical set
    std::optional<int> critical_k;   // set when rho lies on Gamma_k
    bool converged = false;
    double residual = 0.0;
    double max_u1 = 0.0;
    double max_u2 = 0.0;
    std::optional<double> energy;
    std::optional<double> normalization_error;  // max_i |int h_i^* e^{u_i^*} - 1|
    std::vector<std::array<double, 2>> sigma;   // (sigma_1l, sigma_2l) per point
    std::string failure;
};

/// Warm-started solves along the path, one record per t. Non-convergence and
/// critical-set hits are recorded, not thrown. `parallel` solves every step
/// independently from u = 0 on worker threads.
std::vector<SweepRecord> sweep(const RhoPath& path, const std::vector<Rational>& ts,
                               const CouplingMatrix& A, const SingularProfile& profile,
                               const FieldPair& hstar, const SolveConfig& config,
                               bool parallel = false);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records,
                     std::size_t point_count);

}  // namespace liouville
