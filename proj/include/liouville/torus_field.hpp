#pragma once

#include "liouville/degree.hpp"

#include <array>
#include <complex>
#include <functional>
#include <iosfwd>
#include <vector>

namespace liouville {

/// Uniform n x n periodic grid on the unit flat torus; node (i, j) sits at
/// (i/n, j/n) and the represented volume is 1.
class TorusGrid {
public:
    explicit TorusGrid(int n);

    int n() const { return n_; }
    double spacing() const { return 1.0 / n_; }
    std::size_t size() const { return static_cast<std::size_t>(n_) * n_; }
    std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * n_ + j; }
    TorusPoint node(int i, int j) const { return {double(i) / n_, double(j) / n_}; }

    bool operator==(const TorusGrid&) const = default;

private:
    int n_;
};

/// Node values of a real field, row-major with x1 as the slow index.
struct ScalarField {
    TorusGrid grid;
    std::vector<double> values;
    bool mean_zero = false;

    explicit ScalarField(TorusGrid g, double fill = 0.0)
        : grid(g), values(g.size(), fill) {}
    ScalarField(TorusGrid g, std::vector<double> v, bool zero_mean = false);

    double& at(int i, int j) { return values[grid.index(i, j)]; }
    double at(int i, int j) const { return values[grid.index(i, j)]; }
    double max_abs() const;

    static ScalarField sample(TorusGrid g, const std::function<double(double, double)>& f);
};

/// Rectangle rule (1/n^2) sum f; spectrally accurate for smooth periodic f.
double quadrature(const ScalarField& f);

/// Shortest distance between two points on the unit torus.
double periodic_distance(const TorusPoint& a, const TorusPoint& b);

/// Rectangle rule restricted to nodes with periodic distance < delta from p.
double ball_integral(const ScalarField& f, const TorusPoint& p, double delta);

/// Unique mean-zero w with -Delta w = f spectrally. Throws InvalidArgument
/// when f is not mean-zero to within 1e-10 of its max-norm.
ScalarField inv_laplacian(const ScalarField& f);

/// Forward spectral operator f -> -Delta f (symbol 4 pi^2 |k|^2).
ScalarField neg_laplacian(const ScalarField& f);

/// Subtracts the quadrature mean and marks the field mean-zero.
ScalarField remove_mean(ScalarField f);

/// Discrete Fourier coefficients c_k = (1/n^2) sum f(x) exp(-2 pi i k.x),
/// stored row-major on the n x n index grid (index j <-> wavenumber j or j-n).
std::vector<std::complex<double>> fourier_coefficients(const ScalarField& f);

/// Signed wavenumber of FFT index j on an n-point axis.
inline int wavenumber(int j, int n) { return j <= n / 2 ? j : j - n; }

/// Sum over grid-resolved modes of a_k b_k^* 4 pi^2 |k|^2, i.e. the
/// quadrature of grad a . grad b.
double gradient_inner(const ScalarField& a, const ScalarField& b);

/// Green's function G(., q) of -Delta G = delta_q - 1, mean zero.
struct GreenField {
    TorusPoint source;
    int truncation;
    ScalarField values;
};

/// Truncated lattice sum over 0 < |k| <= K of exp(2 pi i k.(x - q)) / (4 pi^2 |k|^2)
/// evaluated at the grid nodes. Modes aliasing onto the grid's constant mode
/// are dropped, so the field is exactly mean-zero on the grid.
GreenField green(const TorusGrid& grid, const TorusPoint& q, int truncation);

/// The same truncated sum evaluated directly at an arbitrary point.
double green_value(const TorusPoint& x, const TorusPoint& q, int truncation);

/// Default truncation, 2n.
inline int default_truncation(const TorusGrid& grid) { return 2 * grid.n(); }

/// Nearest grid node to p.
TorusPoint snap_to_grid(const TorusGrid& grid, const TorusPoint& p);
std::array<int, 2> nearest_node(const TorusGrid& grid, const TorusPoint& p);

/// S = 4 pi sum_l gamma_l G(., p_l) with every p_l snapped to the grid.
ScalarField singular_potential(const SingularProfile& profile, const TorusGrid& grid,
                               int truncation);

/// Mean of |y|^{2 gamma} over the unit cell [-1/2, 1/2]^2 (for gamma > -1).
double cell_power_average(double gamma);

/// h_i = h_i^* exp(-S). At a source node the weight takes its limit 0 when
/// gamma_l > 0; for -1 < gamma_l < 0 it takes the cell average of the local
/// model C |x - p_l|^{2 gamma_l}, with C fitted to the four neighbours.
std::array<ScalarField, 2> build_weights(const std::array<ScalarField, 2>& hstar,
                                         const SingularProfile& profile, int truncation);

/// CSV with header "x1,x2,value", one row per node in row-major order.
void write_csv(std::ostream& out, const ScalarField& f);

}  // namespace liouville
