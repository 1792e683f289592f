#include "kpist/spectral.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

namespace kpist {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

std::pair<double, double> r0(Complex z, double omega) {
    return {-2.0 * z.real() / omega, 4.0 * z.real() * z.imag()};
}

Complex zeta(int n, double xi, double omega) {
    if (n == 0) throw ConfigError("zeta: n must be nonzero");
    return Complex(-0.5 * omega * n, -xi / (2.0 * omega * n));
}

ContourGrid make_contour_grid(const CylinderGrid& grid, int n_max) {
    if (n_max < 1) throw ConfigError("make_contour_grid: n_max must be >= 1");
    if (n_max >= grid.Nx / 2) throw ConfigError("make_contour_grid: n_max exceeds resolved x modes");
    ContourGrid cg;
    cg.grid = grid;
    cg.n_max = n_max;
    return cg;
}

double SpectralData::max_abs() const {
    double r = 0.0;
    for (const Complex& v : G) r = std::max(r, std::abs(v));
    return r;
}

SpectralData zero_spectral_data(const ContourGrid& cg) {
    SpectralData F;
    F.contours = cg;
    F.G.assign(cg.samples(), Complex(0.0));
    return F;
}

namespace {

// Single Fourier coefficient (1/2l) sum u(x_j,y_k) e^{-i om n x_j - i xi y_k} dx dy,
// fixed-order reduction.
Complex coefficient_at(const Field& v, int n, double xi) {
    const CylinderGrid& g = v.grid;
    std::vector<Complex> terms(g.size());
    for (int k = 0; k < g.Ny; ++k) {
        Complex py = std::exp(Complex(0.0, -xi * g.y(k)));
        for (int j = 0; j < g.Nx; ++j) {
            Complex px = std::exp(Complex(0.0, -g.omega * n * g.x(j)));
            terms[static_cast<std::size_t>(k) * g.Nx + j] =
                v.values[static_cast<std::size_t>(k) * g.Nx + j] * px * py;
        }
    }
    return pairwise_sum(std::span<const Complex>(terms)) * (g.dx() * g.dy() / (2.0 * g.ell));
}

} // namespace

SpectralData forward_transform(const Field& u, const ContourGrid& cg, ForwardOptions opt) {
    if (!(u.grid == cg.grid)) throw ConfigError("forward_transform: grid mismatch");
    SpectralData F = zero_spectral_data(cg);
    if (u.max_abs() == 0.0) return F;

    smallness_report(u); // validates zero-mass; ratio >= 1 is flagged per sample downstream

    // Rows of u^ bound |G| to leading order; skip xi columns that cannot carry
    // data above active_rel_tol (stored as exact zeros).
    SpectralCoeffs uhat = analyze(u);
    const CylinderGrid& g = cg.grid;
    std::vector<double> colmax(g.Ny, 0.0);
    double totmax = 0.0;
    for (int k = 0; k < g.Ny; ++k) {
        for (int mi = 0; mi < g.Nx; ++mi)
            colmax[k] = std::max(colmax[k], std::abs(uhat.values[static_cast<std::size_t>(k) * g.Nx + mi]));
        totmax = std::max(totmax, colmax[k]);
    }
    std::vector<int> active_k;
    for (int k = 0; k < g.Ny; ++k)
        if (colmax[k] > opt.active_rel_tol * totmax) active_k.push_back(k);
    // pad a few columns on each side of the active window
    if (!active_k.empty()) {
        int lo = std::max(0, active_k.front() - 4);
        int hi = std::min(g.Ny - 1, active_k.back() + 4);
        active_k.clear();
        for (int k = lo; k <= hi; ++k) active_k.push_back(k);
    }

    struct Job {
        int n, k;
    };
    std::vector<Job> jobs;
    for (int ci = 0; ci < cg.num_contours(); ++ci)
        for (int k : active_k) jobs.push_back({cg.contour_n(ci), k});

    std::atomic<int> failures{0};
    std::vector<Complex> out(jobs.size(), Complex(0.0));
    parallel_for(jobs.size(), [&](std::size_t i) {
        int n = jobs[i].n, k = jobs[i].k;
        double xi = g.xi(k);
        double tau = -xi / (2.0 * g.omega * n); // Im zeta(n, xi)
        try {
            JostSolution mu_plus = jost_boundary(u, n, Side::plus, tau, opt.method, opt.tol, opt.max_iter);
            Field v = u;
            for (std::size_t p = 0; p < v.values.size(); ++p) v.values[p] *= mu_plus.mu.values[p];
            double sgn_n = n > 0 ? 1.0 : -1.0;
            out[i] = sgn_n * coefficient_at(v, n, xi);
        } catch (const ConvergenceError&) {
            failures.fetch_add(1);
        }
    });
    for (std::size_t i = 0; i < jobs.size(); ++i) F.at(jobs[i].n, jobs[i].k) = out[i];
    if (failures.load() > 0)
        throw ConvergenceError("forward_transform: " + std::to_string(failures.load()) +
                               " contour samples failed to converge");
    F.time = 0.0;
    F.provenance = SpectralProvenance::forward_computed;
    return F;
}

std::vector<JumpSample> jump_residual(const Field& u, const SpectralData& F,
                                      const std::vector<std::pair<int, int>>& samples,
                                      BoundaryMethod method, double tol) {
    const CylinderGrid& g = F.contours.grid;
    std::vector<JumpSample> out(samples.size());
    parallel_for(samples.size(), [&](std::size_t i) {
        int n = samples[i].first, k = samples[i].second;
        double xi = g.xi(k);
        double tau = -xi / (2.0 * g.omega * n);
        JostSolution mp = jost_boundary(u, n, Side::plus, tau, method, tol);
        JostSolution mm = jost_boundary(u, n, Side::minus, tau, method, tol);
        // shifted trace at -zbar = zeta(-n, -xi)
        JostSolution ms = jost_boundary(u, -n, Side::minus, tau, method, tol);
        Complex Gv = F.at(n, k);
        double num = 0.0, den = 0.0;
        for (int kk = 0; kk < g.Ny; ++kk) {
            Complex ph_y = std::exp(Complex(0.0, xi * g.y(kk)));
            for (int j = 0; j < g.Nx; ++j) {
                Complex ph = std::exp(Complex(0.0, g.omega * n * g.x(j))) * ph_y;
                Complex jump = mp.mu.at(j, kk) - mm.mu.at(j, kk);
                Complex rhs = Gv * ph * ms.mu.at(j, kk);
                num = std::max(num, std::abs(jump - rhs));
                den = std::max(den, std::abs(jump));
            }
        }
        out[i] = {n, k, num / (den + 1e-30)};
    });
    return out;
}

DecayReport decay_report(const SpectralData& F) {
    const ContourGrid& cg = F.contours;
    const CylinderGrid& g = cg.grid;
    DecayReport r;
    r.sup_bound.assign(cg.num_contours(), 0.0);
    r.l2_bound.assign(cg.num_contours(), 0.0);
    double c_sup = 0.0;
    std::vector<double> l2_terms;
    for (int ci = 0; ci < cg.num_contours(); ++ci) {
        int n = cg.contour_n(ci);
        double dimz = g.dxi() / (2.0 * g.omega * std::abs(n));
        double sup = 0.0;
        std::vector<double> sq(g.Ny);
        for (int k = 0; k < g.Ny; ++k) {
            double a = std::abs(F.at(n, k));
            sup = std::max(sup, a);
            sq[k] = a * a;
            r.linf = std::max(r.linf, a);
            // weighted sup over q = (n, xi)
            double q = 1.0 + std::hypot(static_cast<double>(n), g.xi(k));
            r.wzeta2 = std::max(r.wzeta2, std::max(a, std::max(q * a, q * q * a)));
        }
        double l2c = dimz * pairwise_sum(std::span<const double>(sq));
        r.sup_bound[ci] = n * n * sup;
        r.l2_bound[ci] = std::pow(static_cast<double>(n), 4) * l2c;
        c_sup = std::max(c_sup, static_cast<double>(n) * n * sup);
        l2_terms.push_back(l2c * std::abs(-0.5 * g.omega * n)); // |Re zeta| weight
    }
    r.l2_rez = std::sqrt(pairwise_sum(std::span<const double>(l2_terms)));
    double C = basic_lemma_constant(g.omega);
    r.lambda_norm = C * std::max(2.0 * r.l2_rez, r.linf);
    r.gamma_c = c_sup * kPi * kPi / 3.0;
    r.forward_margin = r.lambda_norm / (2.0 * kPi);
    return r;
}

SpectralData evolve(const SpectralData& F, double t) {
    if (t < 0.0) throw ConfigError("evolve: t must be nonnegative");
    SpectralData out = F;
    const ContourGrid& cg = F.contours;
    const CylinderGrid& g = cg.grid;
    for (int ci = 0; ci < cg.num_contours(); ++ci) {
        int n = cg.contour_n(ci);
        double sigma = -0.5 * g.omega * n;
        for (int k = 0; k < g.Ny; ++k) {
            double tau = -g.xi(k) / (2.0 * g.omega * n);
            double re_z3 = 2.0 * (sigma * sigma * sigma - 3.0 * sigma * tau * tau); // z^3 + zbar^3
            out.at(n, k) = F.at(n, k) * std::exp(Complex(0.0, -4.0 * re_z3 * t));
        }
    }
    out.time = F.time + t;
    out.provenance = SpectralProvenance::evolved;
    return out;
}

} // namespace kpist
