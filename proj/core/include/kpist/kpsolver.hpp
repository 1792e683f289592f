#ifndef KPIST_KPSOLVER_HPP
#define KPIST_KPSOLVER_HPP

#include "kpist/inverse.hpp"

namespace kpist {

// Linear symbol of u_t = -u_xxx - 3 d_x^{-1} u_yy on the m != 0 modes:
// modes evolve as e^{i w t} with w(m, xi) = (om m)^3 - 3 xi^2 / (om m).
double dispersion(int m, double xi, double omega);

struct PdeConfig {
    double dt = 1e-3;
    double t_end = 0.0;
    bool dealias = true; // 2/3 rule on the quadratic term
};

struct PdeRunInfo {
    int steps = 0;
    double zero_mass_residual_max = 0.0; // max |u^(0,.)| seen before re-projection
    double linf_max = 0.0;
};

// Strang split-step integrator for (u_t + 6 u u_x + u_xxx)_x = -3 u_yy on the
// zero-mass subspace: half step of u_t = -3 (u^2)_x (explicit midpoint, 2/3
// dealiased), exact linear phase, half nonlinear step.
Field pde_solve(const Field& u0, const PdeConfig& cfg, PdeRunInfo* info = nullptr,
                const std::vector<double>& snapshot_times = {},
                std::vector<Field>* snapshots = nullptr);

struct IstOptions {
    int n_max = 3;
    ForwardOptions forward;
    InverseConfig inverse;
};

struct IstResult {
    SpectralData F0;
    std::vector<double> times;
    std::vector<Field> u;
    std::vector<double> imag_residuals;
};

// Full transform pipeline: F0 = forward(u0); for each t, evolve, solve the
// trace family, reconstruct.
IstResult ist_solve(const Field& u0, const std::vector<double>& times, const IstOptions& opt = {});

struct CompareReport {
    double l2_rel = 0.0;
    double linf_rel = 0.0;
    double spectral_l2_rel = 0.0;
};

// Relative discrepancies normalized by the larger of the two norms.
CompareReport compare(const Field& a, const Field& b);

struct RunManifest {
    CylinderGrid grid;
    int n_max = 0;
    InverseConfig inverse;
    PdeConfig pde;
    std::vector<double> times;
    unsigned long seed = 0;
    std::string version = "kpist 0.1.0";
    std::string potential_spec; // builtin family or source file
};

} // namespace kpist

#endif
