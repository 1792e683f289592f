#ifndef KPIST_HEATJOST_HPP
#define KPIST_HEATJOST_HPP

#include "kpist/cylinder.hpp"

#include <optional>

namespace kpist {

enum class Side { plus, minus };
enum class BoundaryMethod { offset, halfplane };

// A point of the spectral plane, either inside a strip of holomorphy (margin
// to the nearest line Re z = (omega/2)k recorded) or tagged as a one-sided
// contour point on L_n = { Re z = -(omega/2) n }.
struct SpectralPoint {
    Complex z;
    int strip_index = 0;
    double margin = 0.0;                 // > 0 for strip points
    std::optional<int> contour_n;        // set for contour-tagged points
    std::optional<Side> contour_side;

    static SpectralPoint in_strip(Complex z, double omega);
    static SpectralPoint on_contour(int n, Side side, double tau, double omega);
    bool on_line() const { return contour_n.has_value(); }
};

struct SmallnessReport {
    double C = 0.0;
    double trinorm = 0.0;
    double ratio = 0.0; // C * |||u||| / (2 pi); also the contraction bound for N_u
    bool ok = false;
};

// Requires u real-valued and zero-mass; ratio < 1 puts u inside the
// contraction regime of the Jost fixed point.
SmallnessReport smallness_report(const Field& u);

struct JostSolution {
    SpectralPoint z;
    Field mu;
    int iterations = 0;
    double residual = 0.0;              // || mu - 1 - N_u mu ||_inf
    std::vector<double> contraction_estimates;
    bool converged = false;
    bool outside_theory = false;        // smallness hypothesis violated
    BoundaryMethod method = BoundaryMethod::halfplane; // for boundary solves
};

// Minimum admissible distance to a forbidden line for off-contour work.
double margin_min(double omega);

// (N_u h)(x,y;z) = (1/2pi) sum_{m != 0} sum_k dxi [ (u h)^ (m,xi_k) / P_z(m,xi_k) ]
//                  e^{i om m x + i xi_k y}.
// Rows whose pole in xi falls near the sampled window are integrated in y with
// exponentially weighted half-line scans instead of the DFT division; this
// keeps the operator accurate arbitrarily close to the contours.
Field neumann_apply(const Field& u, const Field& h, const SpectralPoint& z);

// Fixed point of mu = 1 + N_u mu at an off-contour z.
JostSolution solve_jost(const Field& u, const SpectralPoint& z, double tol = 1e-10,
                        int max_iter = 200);

// One-sided limit mu^side at z = -(omega/2) n + i tau on L_n.
//   offset:    solve at Re z shifted into the adjacent strip by delta and
//              delta/2, Richardson-extrapolate to the line.
//   halfplane: iterate the on-contour equation whose y-kernels integrate over
//              y' < y or y' > y according to the side's index split.
JostSolution jost_boundary(const Field& u, int n, Side side, double tau,
                           BoundaryMethod method = BoundaryMethod::halfplane,
                           double tol = 1e-10, int max_iter = 200);

struct JostDiagnostics {
    double y_decay = 0.0;            // trend of |y| sup_x |mu - 1| over outer shells
    double strip_l2 = 0.0;           // int |mu(x0,y0;.) - 1|^2 dIm z along a strip line
    double cr_residual = 0.0;        // finite-difference d/dz-bar residual in a strip
    double zero_row_residual = 0.0;  // || (u mu)^ (0, .) ||_inf
    Field m1_field;                  // leading 1/z coefficient of mu - 1
    double u_from_m1_error = 0.0;    // || u + 2 i d_x m1 ||_2 / ||u||_2
};

JostDiagnostics jost_diagnostics(const Field& u, const JostSolution& sol);

} // namespace kpist

#endif
