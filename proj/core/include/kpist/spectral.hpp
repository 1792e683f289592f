#ifndef KPIST_SPECTRAL_HPP
#define KPIST_SPECTRAL_HPP

#include "kpist/heatjost.hpp"

namespace kpist {

// Nontrivial root of P_z: r0(z) = (-2 Re z / omega, 4 Re z Im z).
std::pair<double, double> r0(Complex z, double omega);

// zeta(n, xi) = -(omega/2) n - i xi/(2 omega n); inverse of r0 on Z* x R.
Complex zeta(int n, double xi, double omega);

// Contour family {L_n : 1 <= |n| <= n_max} sampled at the xi grid of the
// cylinder, so every kernel the inverse problem needs lands on grid points.
struct ContourGrid {
    CylinderGrid grid;
    int n_max = 0;

    // contours ordered n = -n_max..-1, 1..n_max
    int num_contours() const { return 2 * n_max; }
    int contour_n(int ci) const { return ci < n_max ? ci - n_max : ci - n_max + 1; }
    int contour_index(int n) const { return n < 0 ? n + n_max : n + n_max - 1; }
    std::size_t samples() const { return static_cast<std::size_t>(num_contours()) * grid.Ny; }
};

ContourGrid make_contour_grid(const CylinderGrid& grid, int n_max);

enum class SpectralProvenance { forward_computed, evolved, loaded };

// F sampled on the contours: G[n, xi_k] = F(zeta(n, xi_k)).
struct SpectralData {
    ContourGrid contours;
    std::vector<Complex> G; // indexed [contour_index(n) * Ny + k]
    double time = 0.0;
    SpectralProvenance provenance = SpectralProvenance::forward_computed;

    Complex& at(int n, int k) {
        return G[static_cast<std::size_t>(contours.contour_index(n)) * contours.grid.Ny + k];
    }
    const Complex& at(int n, int k) const {
        return G[static_cast<std::size_t>(contours.contour_index(n)) * contours.grid.Ny + k];
    }
    double max_abs() const;
};

SpectralData zero_spectral_data(const ContourGrid& cg);

struct ForwardOptions {
    BoundaryMethod method = BoundaryMethod::halfplane;
    double tol = 1e-12;
    int max_iter = 300;
    // samples whose |u^(n, xi)| row bound falls below this relative threshold
    // carry only numerically-zero data and are stored as exact zeros
    double active_rel_tol = 1e-14;
};

// F(zeta(n, xi_k)) = sgn(n) (u mu+)^(n, xi_k) with mu+ the plus-side boundary
// trace at zeta(n, xi_k).
SpectralData forward_transform(const Field& u, const ContourGrid& cg, ForwardOptions opt = {});

// Relative defect of mu+ - mu- = G e^{i om n x + i xi y} mu-(.,.;zeta(-n,-xi))
// at the stored samples (n, k).
struct JumpSample {
    int n = 0;
    int k = 0;
    double residual = 0.0;
};
std::vector<JumpSample> jump_residual(const Field& u, const SpectralData& F,
                                      const std::vector<std::pair<int, int>>& samples,
                                      BoundaryMethod method = BoundaryMethod::halfplane,
                                      double tol = 1e-12);

struct DecayReport {
    std::vector<double> sup_bound; // n^2 sup_xi |G[n,.]| per contour (order of ContourGrid)
    std::vector<double> l2_bound;  // n^4 int |G[n,.]|^2 dIm z per contour
    double lambda_norm = 0.0;      // C max{ 2||F||_{L2(|Re z|)}, ||F||_{L inf} }
    double gamma_c = 0.0;          // (pi^2/3) max_n n^2 sup |G[n,.]|
    double forward_margin = 0.0;   // lambda_norm / (2 pi); < 1 required for the inverse
    double wzeta2 = 0.0;           // max_{j<=2} || <q>^j G ||_inf
    double linf = 0.0;
    double l2_rez = 0.0;           // ||F||_{L2(|Re z|)}
};

DecayReport decay_report(const SpectralData& F);

// F(z,t) = F(z,0) e^{-4 i (z^3 + zbar^3) t}; |F| is preserved pointwise and
// the phase 2(sigma^3 - 3 sigma tau^2) is formed in real arithmetic.
SpectralData evolve(const SpectralData& F, double t);

} // namespace kpist

#endif
