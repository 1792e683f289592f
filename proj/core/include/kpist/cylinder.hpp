#ifndef KPIST_CYLINDER_HPP
#define KPIST_CYLINDER_HPP

#include "kpist/common.hpp"

namespace kpist {

// Uniform discretization of the cylinder Omega = [-ell, ell] x [-Ly, Ly]
// (x periodic, y truncated) and of its dual lattice Z x R.
//
//   x_j  = -ell + j * 2*ell/Nx,  j = 0 .. Nx-1
//   y_k  = -Ly  + k * 2*Ly/Ny,   k = 0 .. Ny-1
//   m    in {-Nx/2, ..., Nx/2 - 1}
//   xi_k = (k - Ny/2) * pi/Ly
struct CylinderGrid {
    double ell = 0.0;   // x half-period
    double omega = 0.0; // pi / ell
    int Nx = 0;
    int Ny = 0;
    double Ly = 0.0;    // y half-width

    double dx() const { return 2.0 * ell / Nx; }
    double dy() const { return 2.0 * Ly / Ny; }
    double dxi() const;                       // pi / Ly
    double x(int j) const { return -ell + j * dx(); }
    double y(int k) const { return -Ly + k * dy(); }
    double xi(int k) const { return (k - Ny / 2) * dxi(); }
    double xi_max() const { return (Ny / 2) * dxi(); }
    int mode(int mi) const { return mi - Nx / 2; }      // storage index -> m
    int mode_index(int m) const { return m + Nx / 2; }  // m -> storage index
    std::size_t size() const { return static_cast<std::size_t>(Nx) * Ny; }

    bool operator==(const CylinderGrid&) const = default;
};

CylinderGrid make_grid(double ell, int Nx, int Ny, double Ly);

// Sampled complex function on the grid, row-major with k (y) outer and j (x)
// inner: values[k*Nx + j] = u(x_j, y_k).
struct Field {
    CylinderGrid grid;
    std::vector<Complex> values;

    Field() = default;
    explicit Field(const CylinderGrid& g) : grid(g), values(g.size(), Complex(0.0)) {}

    Complex& at(int j, int k) { return values[static_cast<std::size_t>(k) * grid.Nx + j]; }
    const Complex& at(int j, int k) const { return values[static_cast<std::size_t>(k) * grid.Nx + j]; }

    // max_j |u(x_j, y)| over the outermost y rows; decay bookkeeping for the
    // truncation of R to [-Ly, Ly].
    double boundary_residual() const;
    double max_abs() const;
    double max_abs_imag() const;
};

// Fourier coefficients u^(m, xi_k); same memory layout, indexed by
// values[k*Nx + mode_index(m)].
struct SpectralCoeffs {
    CylinderGrid grid;
    std::vector<Complex> values;

    SpectralCoeffs() = default;
    explicit SpectralCoeffs(const CylinderGrid& g) : grid(g), values(g.size(), Complex(0.0)) {}

    Complex& at_mode(int m, int k) { return values[static_cast<std::size_t>(k) * grid.Nx + grid.mode_index(m)]; }
    const Complex& at_mode(int m, int k) const {
        return values[static_cast<std::size_t>(k) * grid.Nx + grid.mode_index(m)];
    }
    double max_abs() const;
};

// u^(m, xi) = (1/2l) Int Int u e^{-i om m x - i xi y} dx dy with trapezoid (=DFT)
// weights; synthesize is its exact on-grid inverse.
SpectralCoeffs analyze(const Field& u);
Field synthesize(const SpectralCoeffs& c);

// Removes the x-mean of every y row, i.e. zeroes the m = 0 coefficient row.
// Idempotent linear projector onto the zero-mass constraint.
Field zero_mass_project(const Field& u);

// Discrete realization of (a*b)(m,xi) = sum_{m'} int a(m-m', xi-xi') b(m', xi') dxi',
// normalized so that analyze(u*h) = (1/2pi) convolve(analyze u, analyze h) on-grid.
SpectralCoeffs convolve(const SpectralCoeffs& a, const SpectralCoeffs& b);

struct NormReport {
    double l1 = 0.0;
    double l2 = 0.0;
    double linf = 0.0;
    double trinorm = 0.0;              // max{ omega*l1, sqrt(omega)*l2 }
    double plancherel_residual = 0.0;  // | ||u^||_2 - sqrt(omega)||u||_2 | / ||u^||_2
};

NormReport norms(const Field& u);
NormReport norms(const SpectralCoeffs& c);

// C(omega) = 4 pi^2 / (3 omega^2) + (pi/omega) sqrt(pi/3); the L^1 bound constant
// for f/P_z over the dual lattice.
double basic_lemma_constant(double omega);

// P_z(m, xi) = (om m)^2 + 2 om m z + i xi.
Complex pz(int m, double xi, Complex z, double omega);

struct BasicLemmaReport {
    double lhs = 0.0;        // sum_{m != 0} sum_k dxi |f/P_z|
    double rhs = 0.0;        // C * max{ ||f||_2, ||f||_inf }
    double C = 0.0;
    double tail_slack = 0.05;
    bool satisfied = false;  // lhs <= rhs * (1 + tail_slack)
};

// Checks ||f/P_z||_{L1} <= C max{||f||_2, ||f||_inf} for a coefficient function
// with vanishing m = 0 row and z off the lines 2 Re z in omega*Z^*.
BasicLemmaReport basic_lemma_report(const SpectralCoeffs& f, Complex z, double tail_slack = 0.05);

// Distance from Re z to the nearest line Re z = (omega/2) k, k != 0.
double line_margin(Complex z, double omega);

} // namespace kpist

#endif
