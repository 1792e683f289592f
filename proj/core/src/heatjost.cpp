#include "kpist/heatjost.hpp"

#include "kpist/fft.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace kpist {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Moments of the exponential cell weight against monomials on [0,1]:
//   prefix  I_p(h) = int_0^1 e^{-h(1-t)} t^p dt
//   suffix  N_p(h) = int_0^1 e^{-h t}    t^p dt
// Series for small |h| (the closed forms cancel), stable low-order recurrences
// otherwise. Re h >= 0 in both uses, so all values are bounded by 1.
void exp_moments_prefix(Complex h, Complex M[4]) {
    if (std::abs(h) < 0.9) {
        for (int p = 0; p < 4; ++p) {
            // I_p = p! sum_q (-h)^q / (p+q+1)!
            double fact = 1.0;
            for (int i = 2; i <= p + 1; ++i) fact *= i; // (p+1)!
            Complex term = 1.0 / fact, sum = term, hk(1.0);
            for (int q = 1; q <= 18; ++q) {
                hk *= -h;
                fact *= (p + q + 1);
                sum += hk / fact;
            }
            double pf = 1.0;
            for (int i = 2; i <= p; ++i) pf *= i;
            M[p] = pf * sum;
        }
    } else {
        Complex eh = std::exp(-h);
        M[0] = (1.0 - eh) / h;
        for (int p = 1; p < 4; ++p) M[p] = (1.0 - static_cast<double>(p) * M[p - 1]) / h;
    }
}

void exp_moments_suffix(Complex h, Complex M[4]) {
    if (std::abs(h) < 0.9) {
        for (int p = 0; p < 4; ++p) {
            // N_p = sum_q (-h)^q / (q! (p+q+1))
            Complex hk(1.0), sum = Complex(1.0 / (p + 1));
            double qf = 1.0;
            for (int q = 1; q <= 18; ++q) {
                hk *= -h;
                qf *= q;
                sum += hk / (qf * (p + q + 1));
            }
            M[p] = sum;
        }
    } else {
        Complex eh = std::exp(-h);
        M[0] = (1.0 - eh) / h;
        for (int p = 1; p < 4; ++p) M[p] = (-eh + static_cast<double>(p) * M[p - 1]) / h;
    }
}

// Four-point weights turning nodal values at t-offsets into the exponential
// cell integral: w_i = sum_p M_p (V^{-1})_{p,i} with V the cubic Vandermonde.
void cell_weights(const Complex M[4], const int off[4], Complex w[4]) {
    double V[4][4];
    for (int i = 0; i < 4; ++i) {
        double t = off[i];
        V[0][i] = 1.0;
        V[1][i] = t;
        V[2][i] = t * t;
        V[3][i] = t * t * t;
    }
    // solve V c = e_i for the interpolation-to-monomial map by elimination
    double A[4][8];
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) A[r][c] = V[r][c];
        for (int c = 0; c < 4; ++c) A[r][4 + c] = (r == c) ? 1.0 : 0.0;
    }
    for (int col = 0; col < 4; ++col) {
        int piv = col;
        for (int r = col + 1; r < 4; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        for (int c = 0; c < 8; ++c) std::swap(A[col][c], A[piv][c]);
        double d = A[col][col];
        for (int c = 0; c < 8; ++c) A[col][c] /= d;
        for (int r = 0; r < 4; ++r) {
            if (r == col) continue;
            double f = A[r][col];
            for (int c = 0; c < 8; ++c) A[r][c] -= f * A[col][c];
        }
    }
    // the nodal constraints read V^T c = v, so c_p = sum_i (V^{-1})_{i,p} v_i
    // and w_i = sum_p M_p (V^{-1})_{i,p}
    for (int i = 0; i < 4; ++i) {
        w[i] = Complex(0.0);
        for (int p = 0; p < 4; ++p) w[i] += M[p] * A[i][4 + p];
    }
}

// Exponential half-line scans with a cubic interpolant: integrates
// int v(y') e^{-K(y-y')} dy' over y' < y (forward) or y' > y to O(dy^4),
// exactly in the kernel, so strongly oscillatory K costs nothing.
void scan_prefix(const std::vector<Complex>& v, Complex K, double dy, std::vector<Complex>& s) {
    int N = static_cast<int>(v.size());
    Complex h = K * dy;
    Complex M[4];
    exp_moments_prefix(h, M);
    const int first[4] = {0, 1, 2, 3}, mid[4] = {-1, 0, 1, 2}, last[4] = {-2, -1, 0, 1};
    Complex wf[4], wm[4], wl[4];
    cell_weights(M, first, wf);
    cell_weights(M, mid, wm);
    cell_weights(M, last, wl);
    Complex decay = std::exp(-h);
    s[0] = Complex(0.0);
    for (int k = 0; k + 1 < N; ++k) {
        const int* off = (k == 0) ? first : (k == N - 2 ? last : mid);
        const Complex* w = (k == 0) ? wf : (k == N - 2 ? wl : wm);
        Complex cell(0.0);
        for (int i = 0; i < 4; ++i) cell += w[i] * v[k + off[i]];
        s[k + 1] = decay * s[k] + dy * cell;
    }
}

void scan_suffix(const std::vector<Complex>& v, Complex K, double dy, std::vector<Complex>& s) {
    int N = static_cast<int>(v.size());
    Complex h = -K * dy; // Re h >= 0 by the routing choice
    Complex M[4];
    exp_moments_suffix(h, M);
    const int first[4] = {0, 1, 2, 3}, mid[4] = {-1, 0, 1, 2}, last[4] = {-2, -1, 0, 1};
    Complex wf[4], wm[4], wl[4];
    cell_weights(M, first, wf);
    cell_weights(M, mid, wm);
    cell_weights(M, last, wl);
    Complex decay = std::exp(-h);
    s[N - 1] = Complex(0.0);
    for (int k = N - 2; k >= 0; --k) {
        const int* off = (k == 0) ? first : (k == N - 2 ? last : mid);
        const Complex* w = (k == 0) ? wf : (k == N - 2 ? wl : wm);
        Complex cell(0.0);
        for (int i = 0; i < 4; ++i) cell += w[i] * v[k + off[i]];
        s[k] = decay * s[k + 1] + dy * cell;
    }
}

struct RowRoute {
    bool scan = false;
    bool forward = true; // scan direction: true = prefix over y' < y
};

// P_z(m, .) has its xi-space pole at xi = -Im K + i Re K, K = om*m(om*m + 2z).
// If the pole sits close to the sampled xi window the DFT division would wrap
// the slowly decaying y-kernel around the periodic box, so the row switches to
// the half-line scans. side resolves the marginal row Re K = 0 on a contour.
RowRoute route_row(const CylinderGrid& g, int m, Complex K, std::optional<bool> marginal_forward) {
    double a = K.real();
    double pole_re = -K.imag();
    RowRoute r;
    double wrap = std::abs(a) * 2.0 * g.Ly;
    bool pole_outside = std::abs(pole_re) > g.xi_max() + 2.0 * g.dxi();
    if (wrap >= 34.0 || pole_outside) {
        r.scan = false;
    } else {
        r.scan = true;
        if (marginal_forward)
            r.forward = *marginal_forward;
        else if (a > 0.0)
            r.forward = true;
        else if (a < 0.0)
            r.forward = false;
        else
            throw ConfigError("heat resolvent: marginal row without a side");
    }
    (void)m;
    return r;
}

// m = 0 handling: the off-contour equation drops the row (primed sum over the
// zero-mass subspace); the one-sided contour equations keep it as a half-line
// integral with the constant kernel K_0 = 0, integrated over y' < y on the
// left half-plane and y' > y on the right (the index-set form of the zero-mass
// rewriting). The choice matters at the size of (u mu)^(0,.), which is where
// the two representations part ways.
enum class ZeroRowMode { drop, prefix, suffix };

// Applies the heat resolvent: w with w^(m,.) = v^(m,.)/P_z(m,.) for every
// m != 0. marginal_forward fixes the direction of a row with Re K = 0
// (one-sided boundary values).
Field apply_resolvent(const Field& v, Complex z, std::optional<int> marginal_m,
                      std::optional<bool> marginal_forward, ZeroRowMode zr = ZeroRowMode::drop) {
    const CylinderGrid& g = v.grid;
    SpectralCoeffs c = analyze(v);

    std::vector<int> scan_modes;
    for (int mi = 0; mi < g.Nx; ++mi) {
        int m = g.mode(mi);
        if (m == 0) {
            for (int k = 0; k < g.Ny; ++k) c.at_mode(0, k) = Complex(0.0);
            if (zr != ZeroRowMode::drop) scan_modes.push_back(0);
            continue;
        }
        Complex K = 2.0 * (g.omega * m) * z + (g.omega * m) * (g.omega * m);
        std::optional<bool> mf;
        if (marginal_m && m == *marginal_m) mf = marginal_forward;
        RowRoute route = route_row(g, m, K, mf);
        if (route.scan) {
            scan_modes.push_back(m);
            for (int k = 0; k < g.Ny; ++k) c.at_mode(m, k) = Complex(0.0);
        } else {
            for (int k = 0; k < g.Ny; ++k) c.at_mode(m, k) /= (K + Complex(0.0, g.xi(k)));
        }
    }
    Field w = synthesize(c);

    if (!scan_modes.empty()) {
        std::vector<Complex> xrows(g.size());
        fft::dft_x(g.Nx, g.Ny, v.values.data(), xrows.data(), false);
        const double dy = g.dy();
        std::vector<Complex> vm(g.Ny), s(g.Ny), phase(g.Nx);
        for (int m : scan_modes) {
            Complex K = 2.0 * (g.omega * m) * z + (g.omega * m) * (g.omega * m);
            int jb = (m % g.Nx + g.Nx) % g.Nx;
            double sx = (m % 2 == 0) ? 1.0 : -1.0;
            for (int k = 0; k < g.Ny; ++k)
                vm[k] = sx / g.Nx * xrows[static_cast<std::size_t>(k) * g.Nx + jb];

            bool fwd;
            if (m == 0) {
                fwd = zr == ZeroRowMode::prefix;
            } else {
                std::optional<bool> mf;
                if (marginal_m && m == *marginal_m) mf = marginal_forward;
                fwd = route_row(g, m, K, mf).forward;
            }
            if (fwd) {
                scan_prefix(vm, K, dy, s);
            } else {
                scan_suffix(vm, K, dy, s);
                for (int k = 0; k < g.Ny; ++k) s[k] = -s[k];
            }
            for (int j = 0; j < g.Nx; ++j)
                phase[j] = sx * std::exp(Complex(0.0, 2.0 * kPi * j * m / g.Nx));
            for (int k = 0; k < g.Ny; ++k)
                for (int j = 0; j < g.Nx; ++j) w.at(j, k) += s[k] * phase[j];
        }
    }
    return w;
}

Field multiply(const Field& a, const Field& b) {
    Field out = a;
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] *= b.values[i];
    return out;
}

double sup_diff(const Field& a, const Field& b) {
    double r = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) r = std::max(r, std::abs(a.values[i] - b.values[i]));
    return r;
}

Field ones(const CylinderGrid& g) {
    Field f(g);
    std::fill(f.values.begin(), f.values.end(), Complex(1.0));
    return f;
}

// Shared fixed-point driver for mu = 1 + T[u mu].
JostSolution iterate_jost(const Field& u, const SpectralPoint& zp,
                          const std::function<Field(const Field&)>& apply, double tol,
                          int max_iter, bool outside_theory) {
    JostSolution sol;
    sol.z = zp;
    sol.outside_theory = outside_theory;
    Field mu = ones(u.grid);
    double prev_diff = -1.0;
    int stagnant = 0;
    for (int it = 1; it <= max_iter; ++it) {
        Field v = multiply(u, mu);
        Field nu = apply(v);
        for (Complex& x : nu.values) x += 1.0;
        double diff = sup_diff(nu, mu);
        if (prev_diff > 0.0) sol.contraction_estimates.push_back(diff / prev_diff);
        mu = std::move(nu);
        sol.iterations = it;
        if (diff <= tol) {
            sol.converged = true;
            break;
        }
        if (outside_theory && prev_diff > 0.0 && diff > 0.999 * prev_diff) {
            if (++stagnant >= 3) break;
        }
        prev_diff = diff;
    }
    {
        Field v = multiply(u, mu);
        Field nu = apply(v);
        for (Complex& x : nu.values) x += 1.0;
        sol.residual = sup_diff(nu, mu);
    }
    sol.mu = std::move(mu);
    if (!sol.converged && !outside_theory) {
        std::ostringstream msg;
        msg << "jost iteration did not reach tol=" << tol << " in " << max_iter
            << " iterations (last ratio "
            << (sol.contraction_estimates.empty() ? 0.0 : sol.contraction_estimates.back()) << ")";
        throw ConvergenceError(msg.str());
    }
    return sol;
}

} // namespace

SpectralPoint SpectralPoint::in_strip(Complex z, double omega) {
    SpectralPoint p;
    p.z = z;
    double s = 2.0 * z.real() / omega;
    int idx;
    if (std::abs(s) < 1.0)
        idx = 0;
    else
        idx = static_cast<int>(s > 0 ? std::floor(s) : -std::floor(-s));
    p.strip_index = idx;
    p.margin = line_margin(z, omega);
    if (p.margin < margin_min(omega))
        throw ConfigError("SpectralPoint: z too close to a forbidden line Re z = (omega/2) k");
    return p;
}

SpectralPoint SpectralPoint::on_contour(int n, Side side, double tau, double omega) {
    if (n == 0) throw ConfigError("SpectralPoint: contour index n must be nonzero");
    SpectralPoint p;
    p.z = Complex(-0.5 * omega * n, tau);
    p.strip_index = side == Side::plus ? -n : -n - 1;
    p.margin = 0.0;
    p.contour_n = n;
    p.contour_side = side;
    return p;
}

double margin_min(double omega) { return 1e-6 * omega; }

SmallnessReport smallness_report(const Field& u) {
    SpectralCoeffs c = analyze(u);
    double zr = 0.0;
    for (int k = 0; k < u.grid.Ny; ++k) zr = std::max(zr, std::abs(c.at_mode(0, k)));
    if (zr > 1e-10 * std::max(1.0, c.max_abs()))
        throw ConfigError("smallness_report: u violates the zero mass constraint");
    SmallnessReport rep;
    rep.C = basic_lemma_constant(u.grid.omega);
    rep.trinorm = norms(u).trinorm;
    rep.ratio = rep.C * rep.trinorm / (2.0 * kPi);
    rep.ok = rep.ratio < 1.0;
    return rep;
}

Field neumann_apply(const Field& u, const Field& h, const SpectralPoint& z) {
    if (!(u.grid == h.grid)) throw ConfigError("neumann_apply: grid mismatch");
    if (!z.on_line() && z.margin < margin_min(u.grid.omega))
        throw ConfigError("neumann_apply: margin below margin_min");
    std::optional<int> mm;
    std::optional<bool> mf;
    if (z.on_line()) {
        int n = *z.contour_n;
        mm = n;
        bool plus = *z.contour_side == Side::plus;
        mf = (n > 0) == plus; // plus side of L_n keeps the marginal kernel decaying forward for n > 0
    }
    return apply_resolvent(multiply(u, h), z.z, mm, mf);
}

JostSolution solve_jost(const Field& u, const SpectralPoint& z, double tol, int max_iter) {
    if (z.on_line()) throw ConfigError("solve_jost: z must be off-contour; use jost_boundary");
    bool outside = !smallness_report(u).ok;
    auto apply = [&](const Field& v) { return apply_resolvent(v, z.z, std::nullopt, std::nullopt); };
    return iterate_jost(u, z, apply, tol, max_iter, outside);
}

JostSolution jost_boundary(const Field& u, int n, Side side, double tau, BoundaryMethod method,
                           double tol, int max_iter) {
    if (n == 0) throw ConfigError("jost_boundary: n must be nonzero");
    const double omega = u.grid.omega;
    SpectralPoint tag = SpectralPoint::on_contour(n, side, tau, omega);

    if (method == BoundaryMethod::halfplane) {
        bool outside = !smallness_report(u).ok;
        bool fwd = (n > 0) == (side == Side::plus);
        // Re z = -(omega/2) n: the m = 0 half-line row integrates over y' < y on
        // the left half-plane (n > 0) and over y' > y on the right. This exact
        // assignment is what makes mu+ - mu- = F e^d mu-(.,.;-zbar) close.
        ZeroRowMode zr = n > 0 ? ZeroRowMode::prefix : ZeroRowMode::suffix;
        auto apply = [&](const Field& v) { return apply_resolvent(v, tag.z, n, fwd, zr); };
        JostSolution sol = iterate_jost(u, tag, apply, tol, max_iter, outside);
        sol.method = BoundaryMethod::halfplane;
        return sol;
    }

    // offset: one-sided values extend analytically into the adjacent strip, so
    // two shifted solves extrapolate linearly to the line.
    double delta = omega / 64.0;
    double s = side == Side::plus ? 1.0 : -1.0;
    JostSolution far = solve_jost(u, SpectralPoint::in_strip(tag.z + s * delta, omega), tol, max_iter);
    JostSolution near = solve_jost(u, SpectralPoint::in_strip(tag.z + s * delta * 0.5, omega), tol, max_iter);
    JostSolution sol;
    sol.z = tag;
    sol.method = BoundaryMethod::offset;
    sol.mu = near.mu;
    for (std::size_t i = 0; i < sol.mu.values.size(); ++i)
        sol.mu.values[i] = 2.0 * near.mu.values[i] - far.mu.values[i];
    sol.iterations = far.iterations + near.iterations;
    sol.residual = std::max(far.residual, near.residual);
    sol.contraction_estimates = near.contraction_estimates;
    sol.converged = far.converged && near.converged;
    sol.outside_theory = far.outside_theory || near.outside_theory;
    return sol;
}

JostDiagnostics jost_diagnostics(const Field& u, const JostSolution& sol) {
    const CylinderGrid& g = u.grid;
    const double omega = g.omega;
    JostDiagnostics d;

    // |y| sup_x |mu - 1| over outer shells versus mid shells
    auto shell_max = [&](int k) {
        double r = 0.0;
        for (int j = 0; j < g.Nx; ++j) r = std::max(r, std::abs(sol.mu.at(j, k) - 1.0));
        return r;
    };
    double outer = 0.0, mid = 0.0;
    for (int k = 0; k < g.Ny; ++k) {
        double ay = std::abs(g.y(k));
        double t = ay * shell_max(k);
        if (ay >= 0.9 * g.Ly) outer = std::max(outer, t);
        if (ay >= 0.5 * g.Ly && ay < 0.7 * g.Ly) mid = std::max(mid, t);
    }
    d.y_decay = mid > 0.0 ? outer / mid : 0.0;

    // || (u mu)^ (0,.) ||_inf
    {
        Field v = u;
        for (std::size_t i = 0; i < v.values.size(); ++i) v.values[i] *= sol.mu.values[i];
        SpectralCoeffs c = analyze(v);
        for (int k = 0; k < g.Ny; ++k) d.zero_row_residual = std::max(d.zero_row_residual, std::abs(c.at_mode(0, k)));
    }

    bool vacuum = u.max_abs() == 0.0;
    if (vacuum) {
        d.m1_field = Field(g);
        return d;
    }

    // int |mu - 1|^2 dIm z along Re z = omega/4 (trapezoid, |Im z| <= 20)
    {
        int j0 = g.Nx / 4, k0 = g.Ny / 2;
        double sum = 0.0, dt = 2.5;
        for (int i = -8; i <= 8; ++i) {
            Complex z(omega / 4.0, dt * i);
            JostSolution s = solve_jost(u, SpectralPoint::in_strip(z, omega));
            double a = std::abs(s.mu.at(j0, k0) - 1.0);
            sum += (std::abs(i) == 8 ? 0.5 : 1.0) * a * a * dt;
        }
        d.strip_l2 = sum;
    }

    // centered d/dz-bar at a strip point: (d_sigma + i d_tau) mu / 2
    {
        int j0 = g.Nx / 4, k0 = g.Ny / 2;
        Complex z0(omega / 4.0, 0.3);
        double h = omega / 32.0;
        auto mu_at = [&](Complex z) {
            return solve_jost(u, SpectralPoint::in_strip(z, omega)).mu.at(j0, k0);
        };
        Complex ds = (mu_at(z0 + h) - mu_at(z0 - h)) / (2.0 * h);
        Complex dt = (mu_at(z0 + Complex(0.0, h)) - mu_at(z0 - Complex(0.0, h))) / (2.0 * h);
        d.cr_residual = 0.5 * std::abs(ds + Complex(0.0, 1.0) * dt);
    }

    // m1 from mu ~ 1 + m1/z: two large-|Im z| solves, linear in 1/z
    {
        Complex za(omega / 4.0, 25.0), zb(omega / 4.0, 50.0);
        JostSolution sa = solve_jost(u, SpectralPoint::in_strip(za, omega));
        JostSolution sb = solve_jost(u, SpectralPoint::in_strip(zb, omega));
        d.m1_field = Field(g);
        for (std::size_t i = 0; i < d.m1_field.values.size(); ++i) {
            Complex fa = za * (sa.mu.values[i] - 1.0);
            Complex fb = zb * (sb.mu.values[i] - 1.0);
            d.m1_field.values[i] = (fb * zb - fa * za) / (zb - za);
        }
        SpectralCoeffs c = analyze(d.m1_field);
        for (int k = 0; k < g.Ny; ++k)
            for (int mi = 0; mi < g.Nx; ++mi)
                c.values[static_cast<std::size_t>(k) * g.Nx + mi] *= Complex(0.0, omega * g.mode(mi));
        Field dxm1 = synthesize(c);
        std::vector<double> num(g.size()), den(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) {
            num[i] = std::norm(u.values[i] + 2.0 * Complex(0.0, 1.0) * dxm1.values[i]);
            den[i] = std::norm(u.values[i]);
        }
        double nn = pairwise_sum(std::span<const double>(num));
        double dd = pairwise_sum(std::span<const double>(den));
        d.u_from_m1_error = dd > 0.0 ? std::sqrt(nn / dd) : 0.0;
    }
    return d;
}

} // namespace kpist
