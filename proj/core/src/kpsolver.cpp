#include "kpist/kpsolver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace kpist {

double dispersion(int m, double xi, double omega) {
    if (m == 0) throw ConfigError("dispersion: m = 0 carries no mode under zero mass");
    double om = omega * m;
    return om * om * om - 3.0 * xi * xi / om;
}

namespace {

// -3 d_x (u^2), derivative spectral, optional 2/3-rule dealiasing of u^2
Field nonlinear_rhs(const Field& u, bool dealias) {
    const CylinderGrid& g = u.grid;
    Field sq = u;
    for (Complex& v : sq.values) v *= v;
    SpectralCoeffs c = analyze(sq);
    int mcut = g.Nx / 3;
    for (int k = 0; k < g.Ny; ++k) {
        for (int mi = 0; mi < g.Nx; ++mi) {
            int m = g.mode(mi);
            Complex& v = c.values[static_cast<std::size_t>(k) * g.Nx + mi];
            if (dealias && std::abs(m) > mcut)
                v = Complex(0.0);
            else
                v *= Complex(0.0, -3.0 * g.omega * m);
        }
    }
    return synthesize(c);
}

} // namespace

Field pde_solve(const Field& u0, const PdeConfig& cfg, PdeRunInfo* info,
                const std::vector<double>& snapshot_times, std::vector<Field>* snapshots) {
    const CylinderGrid& g = u0.grid;
    if (!(cfg.dt > 0.0)) throw ConfigError("pde_solve: dt must be positive");
    if (cfg.t_end < 0.0) throw ConfigError("pde_solve: t_end must be nonnegative");
    double u0max = u0.max_abs();
    if (cfg.dt * u0max >= 0.5) throw ConfigError("pde_solve: dt * |u|_inf must stay below 0.5");

    int steps = cfg.t_end > 0.0 ? static_cast<int>(std::ceil(cfg.t_end / cfg.dt - 1e-12)) : 0;
    double dt = steps > 0 ? cfg.t_end / steps : cfg.dt;

    PdeRunInfo run;
    Field u = zero_mass_project(u0);
    run.linf_max = u0max;

    // exact phase of the linear flow over one step
    std::vector<Complex> phase(g.size(), Complex(1.0));
    for (int k = 0; k < g.Ny; ++k) {
        double xi = g.xi(k);
        for (int mi = 0; mi < g.Nx; ++mi) {
            int m = g.mode(mi);
            if (m == 0) continue;
            phase[static_cast<std::size_t>(k) * g.Nx + mi] =
                std::exp(Complex(0.0, dispersion(m, xi, g.omega) * dt));
        }
    }

    auto half_nonlinear = [&](Field& w) {
        Field k1 = nonlinear_rhs(w, cfg.dealias);
        Field mid = w;
        for (std::size_t i = 0; i < mid.values.size(); ++i) mid.values[i] += 0.25 * dt * k1.values[i];
        Field k2 = nonlinear_rhs(mid, cfg.dealias);
        for (std::size_t i = 0; i < w.values.size(); ++i) w.values[i] += 0.5 * dt * k2.values[i];
    };

    std::size_t next_snap = 0;
    auto maybe_snapshot = [&](double t) {
        while (snapshots && next_snap < snapshot_times.size() &&
               snapshot_times[next_snap] <= t + 1e-12) {
            snapshots->push_back(u);
            ++next_snap;
        }
    };
    maybe_snapshot(0.0);

    for (int s = 0; s < steps; ++s) {
        half_nonlinear(u);
        SpectralCoeffs c = analyze(u);
        double zr = 0.0;
        for (int k = 0; k < g.Ny; ++k) {
            zr = std::max(zr, std::abs(c.at_mode(0, k)));
            c.at_mode(0, k) = Complex(0.0);
        }
        run.zero_mass_residual_max = std::max(run.zero_mass_residual_max, zr);
        for (std::size_t i = 0; i < c.values.size(); ++i) c.values[i] *= phase[i];
        u = synthesize(c);
        half_nonlinear(u);

        double umax = u.max_abs();
        run.linf_max = std::max(run.linf_max, umax);
        if (u0max > 0.0 && umax > 100.0 * u0max) {
            std::ostringstream msg;
            msg << "pde_solve: |u|_inf grew by " << umax / u0max << "x at step " << s + 1;
            throw ConvergenceError(msg.str());
        }
        run.steps = s + 1;
        maybe_snapshot((s + 1) * dt);
    }
    if (info) *info = run;
    return u;
}

IstResult ist_solve(const Field& u0, const std::vector<double>& times, const IstOptions& opt) {
    IstResult res;
    ContourGrid cg = make_contour_grid(u0.grid, opt.n_max);
    res.F0 = forward_transform(u0, cg, opt.forward);
    res.times = times;
    for (double t : times) {
        if (t < 0.0) throw ConfigError("ist_solve: times must be nonnegative");
        SpectralData Ft = t == 0.0 ? res.F0 : evolve(res.F0, t);
        BoundaryTraceSet W = solve_boundary_traces(Ft, opt.inverse);
        Reconstruction rec = reconstruct_potential(Ft, W, opt.inverse);
        res.u.push_back(std::move(rec.u));
        res.imag_residuals.push_back(rec.imag_residual);
    }
    return res;
}

CompareReport compare(const Field& a, const Field& b) {
    if (!(a.grid == b.grid)) throw ConfigError("compare: grid mismatch");
    CompareReport r;
    std::vector<double> d2(a.values.size()), a2(a.values.size()), b2(a.values.size());
    double dinf = 0.0, ainf = 0.0, binf = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        double dd = std::abs(a.values[i] - b.values[i]);
        d2[i] = dd * dd;
        a2[i] = std::norm(a.values[i]);
        b2[i] = std::norm(b.values[i]);
        dinf = std::max(dinf, dd);
        ainf = std::max(ainf, std::abs(a.values[i]));
        binf = std::max(binf, std::abs(b.values[i]));
    }
    double dn = std::sqrt(pairwise_sum(std::span<const double>(d2)));
    double an = std::sqrt(pairwise_sum(std::span<const double>(a2)));
    double bn = std::sqrt(pairwise_sum(std::span<const double>(b2)));
    double den2 = std::max(an, bn);
    double deninf = std::max(ainf, binf);
    r.l2_rel = den2 > 0.0 ? dn / den2 : 0.0;
    r.linf_rel = deninf > 0.0 ? dinf / deninf : 0.0;

    SpectralCoeffs ca = analyze(a), cb = analyze(b);
    std::vector<double> sd(ca.values.size()), sa(ca.values.size()), sb(ca.values.size());
    for (std::size_t i = 0; i < ca.values.size(); ++i) {
        sd[i] = std::norm(ca.values[i] - cb.values[i]);
        sa[i] = std::norm(ca.values[i]);
        sb[i] = std::norm(cb.values[i]);
    }
    double sdn = std::sqrt(pairwise_sum(std::span<const double>(sd)));
    double sden = std::max(std::sqrt(pairwise_sum(std::span<const double>(sa))),
                           std::sqrt(pairwise_sum(std::span<const double>(sb))));
    r.spectral_l2_rel = sden > 0.0 ? sdn / sden : 0.0;
    return r;
}

} // namespace kpist
