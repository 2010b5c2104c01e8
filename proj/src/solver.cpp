#include "liouville/solver.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <ostream>

namespace liouville {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

using Vec = std::vector<double>;

struct Coefficients {
    double a[2][2];
    double rho[2];
};

Coefficients coefficients(const CouplingMatrix& A, const RhoVector& rho) {
    return {{{to_double(A.a11), to_double(A.a12)}, {to_double(A.a21), to_double(A.a22)}},
            {rho.value(1), rho.value(2)}};
}

/// w = h e^u / int h e^u, evaluated with the max of u factored out.
struct Density {
    ScalarField w;
    double log_z;
};

Density density(const ScalarField& u, const ScalarField& h) {
    const double shift = *std::max_element(u.values.begin(), u.values.end());
    ScalarField e(u.grid);
    for (std::size_t i = 0; i < e.values.size(); ++i) {
        e.values[i] = h.values[i] * std::exp(u.values[i] - shift);
    }
    const double z = quadrature(e);
    if (!(z > 0.0) || !std::isfinite(z)) {
        throw Error("VanishingNormalization", "integral of h e^u vanished or overflowed");
    }
    for (double& v : e.values) v /= z;
    return {std::move(e), std::log(z) + shift};
}

ScalarField combine(const Coefficients& c, int row, const std::array<ScalarField, 2>& parts,
                    double offset0, double offset1) {
    ScalarField src(parts[0].grid);
    const double c0 = c.a[row][0] * c.rho[0];
    const double c1 = c.a[row][1] * c.rho[1];
    for (std::size_t i = 0; i < src.values.size(); ++i) {
        src.values[i] = c0 * (parts[0].values[i] - offset0) + c1 * (parts[1].values[i] - offset1);
    }
    return src;
}

/// The map and the normalized densities it was built from.
struct MapEvaluation {
    FieldPair t;
    FieldPair w;
    std::array<double, 2> log_z;
};

MapEvaluation evaluate_map(const FieldPair& u, const Coefficients& c, const FieldPair& weights) {
    Density d0 = density(u[0], weights[0]);
    Density d1 = density(u[1], weights[1]);
    FieldPair w{std::move(d0.w), std::move(d1.w)};
    FieldPair t{inv_laplacian(combine(c, 0, w, 1.0, 1.0)), inv_laplacian(combine(c, 1, w, 1.0, 1.0))};
    return {std::move(t), std::move(w), {d0.log_z, d1.log_z}};
}

double sup_difference(const FieldPair& u, const FieldPair& t) {
    double r = 0.0;
    for (int i = 0; i < 2; ++i) {
        for (std::size_t k = 0; k < u[i].values.size(); ++k) {
            r = std::max(r, std::abs(u[i].values[k] - t[i].values[k]));
        }
    }
    return r;
}

Vec pack(const FieldPair& f) {
    Vec v(f[0].values);
    v.insert(v.end(), f[1].values.begin(), f[1].values.end());
    return v;
}

FieldPair unpack(const Vec& v, const TorusGrid& grid) {
    const auto half = static_cast<std::ptrdiff_t>(grid.size());
    return {ScalarField(grid, Vec(v.begin(), v.begin() + half), true),
            ScalarField(grid, Vec(v.begin() + half, v.end()), true)};
}

double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

/// Restarted GMRES for a matrix-free operator. Returns the relative residual.
template <typename Op>
double gmres(const Op& apply, const Vec& b, Vec& x, double rel_tol, int restart, int max_cycles) {
    const double bnorm = norm2(b);
    if (bnorm == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        return 0.0;
    }
    const std::size_t n = b.size();
    Vec ax(n), r(n), w(n);
    double rel = 1.0;
    for (int cycle = 0; cycle < max_cycles; ++cycle) {
        apply(x, ax);
        for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ax[i];
        const double beta = norm2(r);
        rel = beta / bnorm;
        if (rel <= rel_tol) return rel;

        std::vector<Vec> basis(1, Vec(n));
        for (std::size_t i = 0; i < n; ++i) basis[0][i] = r[i] / beta;
        std::vector<std::vector<double>> hess(restart + 1, std::vector<double>(restart, 0.0));
        std::vector<double> cs(restart), sn(restart), g(restart + 1, 0.0);
        g[0] = beta;

        int used = 0;
        for (int j = 0; j < restart; ++j) {
            apply(basis[j], w);
            for (int i = 0; i <= j; ++i) {
                hess[i][j] = dot(w, basis[i]);
                for (std::size_t k = 0; k < n; ++k) w[k] -= hess[i][j] * basis[i][k];
            }
            hess[j + 1][j] = norm2(w);
            for (int i = 0; i < j; ++i) {
                const double tmp = cs[i] * hess[i][j] + sn[i] * hess[i + 1][j];
                hess[i + 1][j] = -sn[i] * hess[i][j] + cs[i] * hess[i + 1][j];
                hess[i][j] = tmp;
            }
            const double denom = std::hypot(hess[j][j], hess[j + 1][j]);
            cs[j] = hess[j][j] / denom;
            sn[j] = hess[j + 1][j] / denom;
            const double next = hess[j + 1][j];
            hess[j][j] = denom;
            hess[j + 1][j] = 0.0;
            g[j + 1] = -sn[j] * g[j];
            g[j] = cs[j] * g[j];
            used = j + 1;
            rel = std::abs(g[j + 1]) / bnorm;
            if (rel <= rel_tol || next == 0.0) break;
            basis.emplace_back(n);
            for (std::size_t k = 0; k < n; ++k) basis[j + 1][k] = w[k] / next;
        }

        std::vector<double> y(used);
        for (int i = used - 1; i >= 0; --i) {
            double s = g[i];
            for (int k = i + 1; k < used; ++k) s -= hess[i][k] * y[k];
            y[i] = s / hess[i][i];
        }
        for (int i = 0; i < used; ++i) {
            for (std::size_t k = 0; k < n; ++k) x[k] += y[i] * basis[i][k];
        }
        if (rel <= rel_tol) return rel;
    }
    return rel;
}

void project_mean_zero(FieldPair& u) {
    for (auto& f : u) f = remove_mean(std::move(f));
}

}  // namespace

void SolveConfig::validate() const {
    if (!(damping > 0.0 && damping <= 1.0)) throw InvalidArgument("damping must lie in (0, 1]");
    if (!(tolerance > 0.0)) throw InvalidArgument("tolerance must be positive");
    if (!(delta > 0.0 && delta < 0.25)) throw InvalidArgument("delta must lie in (0, 1/4)");
    if (max_iterations < 0 || max_newton_steps < 0) throw InvalidArgument("negative iteration budget");
    if (!(newton_threshold > 0.0 && newton_threshold < 1.0)) {
        throw InvalidArgument("newton_threshold must lie in (0, 1)");
    }
    TorusGrid{grid};
    if (green_truncation != 0 && green_truncation < 8) throw InvalidArgument("Green truncation K must be >= 8");
}

ScalarField HStarProfile::sample(const TorusGrid& grid) const {
    if (!(constant > std::abs(amplitude))) throw InvalidArgument("h* profile must stay positive");
    return ScalarField::sample(grid, [this](double x1, double x2) {
        return constant + amplitude * std::cos(kTwoPi * (k1 * x1 + k2 * x2));
    });
}

FieldPair zero_pair(const TorusGrid& grid) {
    return {ScalarField(grid, Vec(grid.size(), 0.0), true), ScalarField(grid, Vec(grid.size(), 0.0), true)};
}

FieldPair fixed_point_map(const FieldPair& u, const RhoVector& rho, const CouplingMatrix& A,
                          const FieldPair& weights) {
    return evaluate_map(u, coefficients(A, rho), weights).t;
}

double residual(const FieldPair& u, const RhoVector& rho, const CouplingMatrix& A,
                const FieldPair& weights) {
    return sup_difference(u, fixed_point_map(u, rho, A, weights));
}

SolutionPair solve_weighted(const CouplingMatrix& A, const RhoVector& rho, const FieldPair& weights,
                            const SolveConfig& config, const FieldPair* initial) {
    config.validate();
    const Coefficients c = coefficients(A, rho);
    const TorusGrid grid = weights[0].grid;

    FieldPair u = initial ? *initial : zero_pair(grid);
    project_mean_zero(u);

    std::vector<double> history;
    MapEvaluation ev = evaluate_map(u, c, weights);
    double r = sup_difference(u, ev.t);
    history.push_back(r);

    FieldPair best = u;
    double best_r = r;
    int picard = 0;
    int stalled = 0;
    const double omega = config.damping;

    while (r >= config.tolerance && picard < config.max_iterations && stalled < 3) {
        for (int i = 0; i < 2; ++i) {
            for (std::size_t k = 0; k < u[i].values.size(); ++k) {
                u[i].values[k] = (1.0 - omega) * u[i].values[k] + omega * ev.t[i].values[k];
            }
        }
        ++picard;
        double next;
        try {
            ev = evaluate_map(u, c, weights);
            next = sup_difference(u, ev.t);
        } catch (const Error&) {
            next = std::numeric_limits<double>::infinity();
        }
        history.push_back(next);
        if (!std::isfinite(next)) {
            stalled = 3;
            break;
        }
        stalled = next > config.newton_threshold * r ? stalled + 1 : 0;
        r = next;
        if (r < best_r) {
            best_r = r;
            best = u;
        }
    }

    int newton = 0;
    if (!(r < config.tolerance)) {
        // Newton-Krylov on F(u) = u - T(u) over mean-zero pairs, from the best
        // Picard iterate.
        u = best;
        ev = evaluate_map(u, c, weights);
        r = sup_difference(u, ev.t);
        Vec f = pack(u);
        {
            const Vec t = pack(ev.t);
            for (std::size_t k = 0; k < f.size(); ++k) f[k] -= t[k];
        }
        while (r >= config.tolerance && newton < config.max_newton_steps) {
            const FieldPair w = ev.w;
            auto jacobian = [&](const Vec& v, Vec& out) {
                const FieldPair dv = unpack(v, grid);
                FieldPair dw{ScalarField(grid), ScalarField(grid)};
                for (int j = 0; j < 2; ++j) {
                    double mean = 0.0;
                    {
                        ScalarField prod(grid);
                        for (std::size_t k = 0; k < prod.values.size(); ++k) {
                            prod.values[k] = w[j].values[k] * dv[j].values[k];
                        }
                        mean = quadrature(prod);
                        for (std::size_t k = 0; k < prod.values.size(); ++k) {
                            dw[j].values[k] = prod.values[k] - w[j].values[k] * mean;
                        }
                    }
                }
                FieldPair dt{inv_laplacian(combine(c, 0, dw, 0.0, 0.0)),
                             inv_laplacian(combine(c, 1, dw, 0.0, 0.0))};
                const Vec packed = pack(dt);
                for (std::size_t k = 0; k < v.size(); ++k) out[k] = v[k] - packed[k];
            };

            Vec rhs(f.size());
            for (std::size_t k = 0; k < f.size(); ++k) rhs[k] = -f[k];
            Vec step(f.size(), 0.0);
            const double eta = std::clamp(norm2(f), 1e-12, 1e-3);
            gmres(jacobian, rhs, step, eta, 60, 5);

            const double f_norm = norm2(f);
            double lambda = 1.0;
            bool accepted = false;
            for (int attempt = 0; attempt < 12 && !accepted; ++attempt, lambda *= 0.5) {
                FieldPair trial = u;
                const auto half = grid.size();
                for (std::size_t k = 0; k < half; ++k) {
                    trial[0].values[k] += lambda * step[k];
                    trial[1].values[k] += lambda * step[half + k];
                }
                project_mean_zero(trial);
                std::optional<MapEvaluation> trial_ev;
                try {
                    trial_ev = evaluate_map(trial, c, weights);
                } catch (const Error&) {
                    continue;
                }
                Vec trial_f = pack(trial);
                const Vec t = pack(trial_ev->t);
                for (std::size_t k = 0; k < trial_f.size(); ++k) trial_f[k] -= t[k];
                if (norm2(trial_f) <= (1.0 - 1e-4 * lambda) * f_norm) {
                    u = std::move(trial);
                    ev = std::move(*trial_ev);
                    f = std::move(trial_f);
                    accepted = true;
                }
            }
            ++newton;
            r = sup_difference(u, ev.t);
            history.push_back(r);
            if (!accepted) break;
        }
    }

    if (!(r < config.tolerance)) {
        throw NonConvergence("solver stopped at residual " + std::to_string(r) + " after " +
                                 std::to_string(picard) + " Picard and " + std::to_string(newton) +
                                 " Newton steps",
                             std::move(history), std::move(u));
    }

    SolutionPair sol{std::move(u), weights, {}, r, picard, newton, std::move(history)};
    for (int i = 0; i < 2; ++i) sol.normalization[i] = std::exp(ev.log_z[i]);
    return sol;
}

SolutionPair solve(const CouplingMatrix& A, const RhoVector& rho, const SingularProfile& profile,
                   const FieldPair& hstar, const SolveConfig& config, const FieldPair* initial) {
    config.validate();
    classify(A, rho, profile);  // throws on Gamma_k and validates A, rho, profile
    if (hstar[0].grid.n() != config.grid || hstar[1].grid.n() != config.grid) {
        throw InvalidArgument("h* fields are not sampled on the configured grid");
    }
    const FieldPair weights = build_weights(hstar, profile, config.truncation());
    return solve_weighted(A, rho, weights, config, initial);
}

LocalMassReport local_masses(const SolutionPair& solution, const RhoVector& rho,
                             const CouplingMatrix& A, const SingularProfile& profile, double delta) {
    if (!(delta > 0.0 && delta < 0.25)) throw InvalidArgument("delta must lie in (0, 1/4)");
    profile.validate();
    const TorusGrid grid = solution.u[0].grid;
    std::vector<TorusPoint> points;
    for (const auto& p : profile.points) points.push_back(snap_to_grid(grid, p));
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            if (periodic_distance(points[i], points[j]) < 2.0 * delta) {
                throw InvalidArgument("local-mass balls of radius delta overlap two singular points");
            }
        }
    }

    const SymmetrizedSystem sym = symmetrize(A);
    const double scale = to_double(sym.shift_ratio);
    const double b11 = to_double(sym.b11), b12 = to_double(sym.b12), b22 = to_double(sym.b22);
    const Density d1 = density(solution.u[0], solution.weights[0]);
    const Density d2 = density(solution.u[1], solution.weights[1]);

    LocalMassReport report;
    const auto mu = profile.masses();
    for (std::size_t l = 0; l < points.size(); ++l) {
        LocalMass m;
        m.point = points[l];
        m.mu = mu[l];
        m.sigma1 = scale * rho.value(1) * ball_integral(d1.w, points[l], delta) / kTwoPi;
        m.sigma2 = rho.value(2) * ball_integral(d2.w, points[l], delta) / kTwoPi;
        const double s1 = m.sigma1, s2 = m.sigma2;
        m.pohozaev = b11 * s1 * s1 + 2.0 * b12 * s1 * s2 + b22 * s2 * s2 - 4.0 * to_double(m.mu) * (s1 + s2);
        report.entries.push_back(m);
    }

    const RankClass rc = rank_class(A);
    if (rc.kind != RankKind::full_rank) {
        const double a = to_double(rc.ratio);
        ScalarField diff(grid);
        for (std::size_t k = 0; k < diff.values.size(); ++k) {
            diff.values[k] = solution.u[0].values[k] - a * solution.u[1].values[k];
        }
        const double constant = quadrature(diff);
        double dev = 0.0;
        for (double v : diff.values) dev = std::max(dev, std::abs(v - constant));
        report.degenerate_constant = constant;
        report.degenerate_deviation = dev;
    }
    return report;
}

double energy(const FieldPair& u, const RhoVector& rho, const CouplingMatrix& A,
              const FieldPair& weights) {
    const CouplingMatrix inv = inverse(A);
    const double i11 = to_double(inv.a11), i12 = to_double(inv.a12);
    const double i21 = to_double(inv.a21), i22 = to_double(inv.a22);
    const double g11 = gradient_inner(u[0], u[0]);
    const double g12 = gradient_inner(u[0], u[1]);
    const double g22 = gradient_inner(u[1], u[1]);
    double j = 0.5 * (i11 * g11 + (i12 + i21) * g12 + i22 * g22);
    for (int i = 0; i < 2; ++i) {
        const double r = rho.value(i + 1);
        if (r != 0.0) j -= r * density(u[i], weights[i]).log_z;
    }
    return j;
}

double symmetrized_residual(const SolutionPair& solution, const RhoVector& rho,
                            const CouplingMatrix& A) {
    const SymmetrizedSystem sym = symmetrize(A);
    const double ratio = to_double(sym.shift_ratio);
    const double b[2][2] = {{to_double(sym.b11), to_double(sym.b12)},
                            {to_double(sym.b12), to_double(sym.b22)}};
    const double rho_tilde[2] = {ratio * rho.value(1), rho.value(2)};
    const TorusGrid grid = solution.u[0].grid;

    FieldPair big_u{solution.u[0], solution.u[1]};
    for (double& v : big_u[0].values) v += sym.shift;

    // H_j e^{U_j} with H_j = rho_j h_j / int h_j e^{u_j}.
    FieldPair mass{ScalarField(grid), ScalarField(grid)};
    for (int j = 0; j < 2; ++j) {
        const double log_z = density(solution.u[j], solution.weights[j]).log_z;
        for (std::size_t k = 0; k < grid.size(); ++k) {
            mass[j].values[k] = rho.value(j + 1) * solution.weights[j].values[k] *
                                std::exp(big_u[j].values[k] - log_z);
        }
    }

    double r = 0.0;
    for (int i = 0; i < 2; ++i) {
        ScalarField src(grid);
        for (std::size_t k = 0; k < grid.size(); ++k) {
            src.values[k] = b[i][0] * (mass[0].values[k] - rho_tilde[0]) +
                            b[i][1] * (mass[1].values[k] - rho_tilde[1]);
        }
        const ScalarField t = inv_laplacian(src);
        const double mean = quadrature(big_u[i]);
        for (std::size_t k = 0; k < grid.size(); ++k) {
            r = std::max(r, std::abs(big_u[i].values[k] - mean - t.values[k]));
        }
    }
    return r;
}

FieldPair reconstruct_original(const SolutionPair& solution, const SingularProfile& profile,
                               const FieldPair& hstar, int truncation) {
    const TorusGrid grid = solution.u[0].grid;
    const ScalarField s = singular_potential(profile, grid, truncation);
    FieldPair out{ScalarField(grid), ScalarField(grid)};
    for (int i = 0; i < 2; ++i) {
        for (std::size_t k = 0; k < grid.size(); ++k) {
            out[i].values[k] = solution.u[i].values[k] - s.values[k];
        }
        const double shift = *std::max_element(out[i].values.begin(), out[i].values.end());
        ScalarField e(grid);
        for (std::size_t k = 0; k < grid.size(); ++k) {
            e.values[k] = hstar[i].values[k] * std::exp(out[i].values[k] - shift);
        }
        const double c = -(std::log(quadrature(e)) + shift);
        for (double& v : out[i].values) v += c;
    }
    return out;
}

RhoVector RhoPath::at(const Rational& t) const {
    if (from.unit != to.unit) throw InvalidArgument("rho path endpoints use different units");
    return {from.c1 + t * (to.c1 - from.c1), from.c2 + t * (to.c2 - from.c2), from.unit};
}

namespace {

SweepRecord sweep_step(const Rational& t, const RhoPath& path, const CouplingMatrix& A,
                       const SingularProfile& profile, const FieldPair& hstar,
                       const FieldPair& weights, const SolveConfig& config,
                       const FieldPair* initial, FieldPair* solution_out) {
    SweepRecord rec;
    rec.t = t;
    rec.rho = path.at(t);
    try {
        rec.region = classify(A, rec.rho, profile).k;
    } catch (const OnCriticalSet& e) {
        rec.critical_k = e.k();
        rec.failure = "OnCriticalSet";
        return rec;
    } catch (const Error& e) {
        rec.failure = e.kind();
        return rec;
    }

    try {
        SolutionPair sol = solve_weighted(A, rec.rho, weights, config, initial);
        rec.converged = true;
        rec.residual = sol.residual;
        rec.max_u1 = sol.u[0].max_abs();
        rec.max_u2 = sol.u[1].max_abs();
        if (A.det() != 0) rec.energy = energy(sol.u, rec.rho, A, weights);
        const FieldPair ustar = reconstruct_original(sol, profile, hstar, config.truncation());
        double err = 0.0;
        for (int i = 0; i < 2; ++i) {
            ScalarField e(ustar[i].grid);
            for (std::size_t k = 0; k < e.values.size(); ++k) {
                e.values[k] = hstar[i].values[k] * std::exp(ustar[i].values[k]);
            }
            err = std::max(err, std::abs(quadrature(e) - 1.0));
        }
        rec.normalization_error = err;
        if (profile.size() > 0) {
            try {
                for (const auto& m : local_masses(sol, rec.rho, A, profile, config.delta).entries) {
                    rec.sigma.push_back({m.sigma1, m.sigma2});
                }
            } catch (const InvalidArgument&) {
                // overlapping balls: leave sigma empty
            }
        }
        if (solution_out) *solution_out = std::move(sol.u);
    } catch (const NonConvergence& e) {
        rec.failure = "NonConvergence";
        rec.residual = e.history().empty() ? std::numeric_limits<double>::infinity() : e.history().back();
        rec.max_u1 = e.last_iterate()[0].max_abs();
        rec.max_u2 = e.last_iterate()[1].max_abs();
    } catch (const Error& e) {
        rec.failure = e.kind();
    }
    return rec;
}

}  // namespace

std::vector<SweepRecord> sweep(const RhoPath& path, const std::vector<Rational>& ts,
                               const CouplingMatrix& A, const SingularProfile& profile,
                               const FieldPair& hstar, const SolveConfig& config, bool parallel) {
    config.validate();
    require_hypothesis(A);
    const FieldPair weights = build_weights(hstar, profile, config.truncation());

    std::vector<SweepRecord> records;
    if (parallel) {
        std::vector<std::future<SweepRecord>> jobs;
        for (const auto& t : ts) {
            jobs.push_back(std::async(std::launch::async, [&, t] {
                return sweep_step(t, path, A, profile, hstar, weights, config, nullptr, nullptr);
            }));
        }
        for (auto& job : jobs) records.push_back(job.get());
        return records;
    }

    std::optional<FieldPair> warm;
    for (const auto& t : ts) {
        FieldPair next = zero_pair(weights[0].grid);
        SweepRecord rec = sweep_step(t, path, A, profile, hstar, weights, config,
                                     warm ? &*warm : nullptr, &next);
        if (rec.converged) warm = std::move(next);
        records.push_back(std::move(rec));
    }
    return records;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records,
                     std::size_t point_count) {
    out << "t,rho1,rho2,region,converged,residual,max_u1,max_u2,J";
    for (std::size_t l = 1; l <= point_count; ++l) out << ",sigma_1" << l << ",sigma_2" << l;
    out << '\n';
    char buf[64];
    auto num = [&buf](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    for (const auto& r : records) {
        out << num(to_double(r.t)) << ',' << num(r.rho.rho1()) << ',' << num(r.rho.rho2()) << ',';
        if (r.region) out << *r.region;
        else if (r.critical_k) out << "critical_" << *r.critical_k;
        out << ',' << (r.converged ? "true" : "false") << ',';
        if (r.region) out << num(r.residual);
        out << ',' << num(r.max_u1) << ',' << num(r.max_u2) << ',';
        if (r.energy) out << num(*r.energy);
        for (std::size_t l = 0; l < point_count; ++l) {
            out << ',';
            if (l < r.sigma.size()) out << num(r.sigma[l][0]);
            out << ',';
            if (l < r.sigma.size()) out << num(r.sigma[l][1]);
        }
        out << '\n';
    }
}

}  // namespace liouville
