#include "liouville/torus_field.hpp"

#include "liouville/errors.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <ostream>

namespace liouville {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kFourPi2 = 4.0 * std::numbers::pi * std::numbers::pi;

using Complex = std::complex<double>;

fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }

/// FFTW plans for one grid size. Plans are created once under a lock and
/// executed through the new-array interface, which is thread-safe.
class Plans {
public:
    explicit Plans(int n) {
        std::vector<double> real(static_cast<std::size_t>(n) * n);
        std::vector<Complex> half(static_cast<std::size_t>(n) * (n / 2 + 1));
        std::vector<Complex> full(static_cast<std::size_t>(n) * n);
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        r2c_ = fftw_plan_dft_r2c_2d(n, n, real.data(), as_fftw(half.data()), flags);
        c2r_ = fftw_plan_dft_c2r_2d(n, n, as_fftw(half.data()), real.data(), flags);
        forward_ = fftw_plan_dft_2d(n, n, as_fftw(full.data()), as_fftw(full.data()), FFTW_FORWARD,
                                    flags);
        backward_ = fftw_plan_dft_2d(n, n, as_fftw(full.data()), as_fftw(full.data()),
                                     FFTW_BACKWARD, flags);
    }
    ~Plans() {
        fftw_destroy_plan(r2c_);
        fftw_destroy_plan(c2r_);
        fftw_destroy_plan(forward_);
        fftw_destroy_plan(backward_);
    }
    Plans(const Plans&) = delete;
    Plans& operator=(const Plans&) = delete;

    void r2c(const double* in, Complex* out) const {
        fftw_execute_dft_r2c(r2c_, const_cast<double*>(in), as_fftw(out));
    }
    // Destroys `in`.
    void c2r(Complex* in, double* out) const { fftw_execute_dft_c2r(c2r_, as_fftw(in), out); }
    void forward(Complex* data) const { fftw_execute_dft(forward_, as_fftw(data), as_fftw(data)); }
    void backward(Complex* data) const {
        fftw_execute_dft(backward_, as_fftw(data), as_fftw(data));
    }

    static const Plans& get(int n) {
        static std::mutex mutex;
        static std::map<int, std::unique_ptr<Plans>> cache;
        std::lock_guard lock(mutex);
        auto& slot = cache[n];
        if (!slot) slot = std::make_unique<Plans>(n);
        return *slot;
    }

private:
    fftw_plan r2c_ = nullptr;
    fftw_plan c2r_ = nullptr;
    fftw_plan forward_ = nullptr;
    fftw_plan backward_ = nullptr;
};

/// Applies a real radial symbol s(|k|^2) in Fourier space.
template <typename Symbol>
ScalarField apply_symbol(const ScalarField& f, Symbol symbol) {
    const int n = f.grid.n();
    const int nh = n / 2 + 1;
    const Plans& plans = Plans::get(n);
    std::vector<Complex> spec(static_cast<std::size_t>(n) * nh);
    plans.r2c(f.values.data(), spec.data());
    const double norm = 1.0 / (double(n) * n);
    for (int i = 0; i < n; ++i) {
        const double kx = wavenumber(i, n);
        for (int j = 0; j < nh; ++j) {
            const double k2 = kx * kx + double(j) * j;
            spec[static_cast<std::size_t>(i) * nh + j] *= symbol(k2) * norm;
        }
    }
    ScalarField out(f.grid);
    plans.c2r(spec.data(), out.values.data());
    return out;
}

double wrap_delta(double d) { return d - std::round(d); }

}  // namespace

TorusGrid::TorusGrid(int n) : n_(n) {
    if (n < 16) throw InvalidArgument("torus grid needs n >= 16, got " + std::to_string(n));
    if (n % 2 != 0) throw InvalidArgument("torus grid size must be even, got " + std::to_string(n));
}

ScalarField::ScalarField(TorusGrid g, std::vector<double> v, bool zero_mean)
    : grid(g), values(std::move(v)), mean_zero(zero_mean) {
    if (values.size() != grid.size()) throw InvalidArgument("field size does not match grid");
}

double ScalarField::max_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

ScalarField ScalarField::sample(TorusGrid g, const std::function<double(double, double)>& f) {
    ScalarField out(g);
    for (int i = 0; i < g.n(); ++i) {
        for (int j = 0; j < g.n(); ++j) {
            const auto x = g.node(i, j);
            out.at(i, j) = f(x[0], x[1]);
        }
    }
    return out;
}

double quadrature(const ScalarField& f) {
    // Row sums first keeps the accumulation error near the 1e-16 level.
    const int n = f.grid.n();
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int j = 0; j < n; ++j) row += f.at(i, j);
        total += row;
    }
    return total / (double(n) * n);
}

double periodic_distance(const TorusPoint& a, const TorusPoint& b) {
    return std::hypot(wrap_delta(a[0] - b[0]), wrap_delta(a[1] - b[1]));
}

double ball_integral(const ScalarField& f, const TorusPoint& p, double delta) {
    if (!(delta > 0.0 && delta < 0.25)) throw InvalidArgument("ball radius must lie in (0, 1/4)");
    const int n = f.grid.n();
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (periodic_distance(f.grid.node(i, j), p) < delta) total += f.at(i, j);
        }
    }
    return total / (double(n) * n);
}

ScalarField inv_laplacian(const ScalarField& f) {
    const double mean = quadrature(f);
    if (std::abs(mean) > 1e-10 * std::max(1.0, f.max_abs())) {
        throw InvalidArgument("inv_laplacian needs a mean-zero source (mean = " +
                              std::to_string(mean) + ")");
    }
    ScalarField w = apply_symbol(f, [](double k2) { return k2 == 0.0 ? 0.0 : 1.0 / (kFourPi2 * k2); });
    w.mean_zero = true;
    return w;
}

ScalarField neg_laplacian(const ScalarField& f) {
    ScalarField w = apply_symbol(f, [](double k2) { return kFourPi2 * k2; });
    w.mean_zero = true;
    return w;
}

ScalarField remove_mean(ScalarField f) {
    const double mean = quadrature(f);
    for (double& v : f.values) v -= mean;
    f.mean_zero = true;
    return f;
}

std::vector<Complex> fourier_coefficients(const ScalarField& f) {
    const int n = f.grid.n();
    std::vector<Complex> data(f.values.begin(), f.values.end());
    Plans::get(n).forward(data.data());
    const double norm = 1.0 / (double(n) * n);
    for (auto& c : data) c *= norm;
    return data;
}

double gradient_inner(const ScalarField& a, const ScalarField& b) {
    const int n = a.grid.n();
    const auto ca = fourier_coefficients(a);
    const auto cb = fourier_coefficients(b);
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        const double kx = wavenumber(i, n);
        for (int j = 0; j < n; ++j) {
            const double ky = wavenumber(j, n);
            const std::size_t idx = static_cast<std::size_t>(i) * n + j;
            total += kFourPi2 * (kx * kx + ky * ky) * (ca[idx] * std::conj(cb[idx])).real();
        }
    }
    return total;
}

GreenField green(const TorusGrid& grid, const TorusPoint& q, int truncation) {
    if (truncation < 8) throw InvalidArgument("Green truncation K must be >= 8");
    const int n = grid.n();
    const int K = truncation;

    std::vector<Complex> phase1(2 * K + 1), phase2(2 * K + 1);
    for (int k = -K; k <= K; ++k) {
        phase1[k + K] = std::polar(1.0, -kTwoPi * k * q[0]);
        phase2[k + K] = std::polar(1.0, -kTwoPi * k * q[1]);
    }

    // Fold every lattice mode onto the grid index it aliases to.
    std::vector<Complex> coeff(grid.size(), Complex(0.0, 0.0));
    const long K2 = long(K) * K;
    for (int kx = -K; kx <= K; ++kx) {
        const int ix = ((kx % n) + n) % n;
        const int ky_max = static_cast<int>(std::floor(std::sqrt(double(K2 - long(kx) * kx))));
        for (int ky = -ky_max; ky <= ky_max; ++ky) {
            if (kx == 0 && ky == 0) continue;
            const int iy = ((ky % n) + n) % n;
            const double weight = 1.0 / (kFourPi2 * (double(kx) * kx + double(ky) * ky));
            coeff[static_cast<std::size_t>(ix) * n + iy] += weight * phase1[kx + K] * phase2[ky + K];
        }
    }
    coeff[0] = 0.0;

    Plans::get(n).backward(coeff.data());
    ScalarField values(grid);
    for (std::size_t i = 0; i < values.values.size(); ++i) values.values[i] = coeff[i].real();
    values.mean_zero = true;
    return {q, truncation, std::move(values)};
}

double green_value(const TorusPoint& x, const TorusPoint& q, int truncation) {
    if (truncation < 8) throw InvalidArgument("Green truncation K must be >= 8");
    const int K = truncation;
    const double d1 = wrap_delta(x[0] - q[0]);
    const double d2 = wrap_delta(x[1] - q[1]);
    std::vector<Complex> e1(K + 1), e2(2 * K + 1);
    for (int k = 0; k <= K; ++k) e1[k] = std::polar(1.0, kTwoPi * k * d1);
    for (int k = -K; k <= K; ++k) e2[k + K] = std::polar(1.0, kTwoPi * k * d2);

    // Pair k with -k: each term contributes 2 cos(2 pi k.d) for kx > 0, and the
    // kx = 0 column is folded the same way over ky > 0.
    const long K2 = long(K) * K;
    double total = 0.0;
    for (int kx = 1; kx <= K; ++kx) {
        const int ky_max = static_cast<int>(std::floor(std::sqrt(double(K2 - long(kx) * kx))));
        double column = 0.0;
        for (int ky = -ky_max; ky <= ky_max; ++ky) {
            column += (e1[kx] * e2[ky + K]).real() / (double(kx) * kx + double(ky) * ky);
        }
        total += 2.0 * column;
    }
    for (int ky = 1; ky <= K; ++ky) total += 2.0 * e2[ky + K].real() / (double(ky) * ky);
    return total / kFourPi2;
}

std::array<int, 2> nearest_node(const TorusGrid& grid, const TorusPoint& p) {
    const int n = grid.n();
    auto snap = [n](double x) {
        long i = std::lround(x * n);
        return static_cast<int>(((i % n) + n) % n);
    };
    return {snap(p[0]), snap(p[1])};
}

TorusPoint snap_to_grid(const TorusGrid& grid, const TorusPoint& p) {
    const auto [i, j] = nearest_node(grid, p);
    return grid.node(i, j);
}

ScalarField singular_potential(const SingularProfile& profile, const TorusGrid& grid,
                               int truncation) {
    profile.validate();
    if (profile.size() > 0 && profile.points.size() != profile.size()) {
        throw InvalidArgument("singular profile has no point coordinates");
    }
    ScalarField s(grid);
    s.mean_zero = true;
    for (std::size_t l = 0; l < profile.size(); ++l) {
        const double gamma = to_double(profile.strengths[l]);
        if (gamma == 0.0) continue;
        const GreenField g = green(grid, snap_to_grid(grid, profile.points[l]), truncation);
        for (std::size_t i = 0; i < s.values.size(); ++i) {
            s.values[i] += 4.0 * kPi * gamma * g.values.values[i];
        }
    }
    return s;
}

double cell_power_average(double gamma) {
    if (!(gamma > -1.0)) throw InvalidArgument("cell_power_average needs gamma > -1");
    // Eight congruent triangles; along angle t the cell edge is at 1/(2 cos t).
    const double p = 2.0 * gamma + 2.0;
    auto radial = [p](double t) { return std::pow(0.5 / std::cos(t), p) / p; };
    return 8.0 * boost::math::quadrature::gauss<double, 30>::integrate(radial, 0.0, kPi / 4.0);
}

std::array<ScalarField, 2> build_weights(const std::array<ScalarField, 2>& hstar,
                                         const SingularProfile& profile, int truncation) {
    const TorusGrid grid = hstar[0].grid;
    if (!(hstar[1].grid == grid)) throw InvalidArgument("h* fields live on different grids");
    for (const auto& h : hstar) {
        for (double v : h.values) {
            if (!(v > 0.0)) throw InvalidArgument("h* must be positive at every node");
        }
    }
    profile.validate();

    std::vector<std::array<int, 2>> nodes;
    for (const auto& p : profile.points) {
        const auto node = nearest_node(grid, p);
        if (std::find(nodes.begin(), nodes.end(), node) != nodes.end()) {
            throw InvalidArgument("two singular points snap to the same grid node");
        }
        nodes.push_back(node);
    }

    const ScalarField s = singular_potential(profile, grid, truncation);
    std::array<ScalarField, 2> h{hstar[0], hstar[1]};
    for (auto& field : h) {
        field.mean_zero = false;
        for (std::size_t i = 0; i < field.values.size(); ++i) {
            field.values[i] *= std::exp(-s.values[i]);
        }
    }

    const int n = grid.n();
    for (std::size_t l = 0; l < profile.size(); ++l) {
        const double gamma = to_double(profile.strengths[l]);
        const auto [i, j] = nodes[l];
        for (auto& field : h) {
            if (gamma > 0.0) {
                field.at(i, j) = 0.0;
            } else if (gamma < 0.0) {
                const double neighbours = 0.25 * (field.at((i + 1) % n, j) + field.at((i + n - 1) % n, j) +
                                                  field.at(i, (j + 1) % n) + field.at(i, (j + n - 1) % n));
                field.at(i, j) = neighbours * cell_power_average(gamma);
            }
        }
    }
    return h;
}

void write_csv(std::ostream& out, const ScalarField& f) {
    out << "x1,x2,value\n";
    char buf[96];
    for (int i = 0; i < f.grid.n(); ++i) {
        for (int j = 0; j < f.grid.n(); ++j) {
            const auto x = f.grid.node(i, j);
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", x[0], x[1], f.at(i, j));
            out << buf;
        }
    }
}

}  // namespace liouville
