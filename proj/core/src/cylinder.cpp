#include "kpist/cylinder.hpp"

#include "kpist/fft.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kpist {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double CylinderGrid::dxi() const { return kPi / Ly; }

CylinderGrid make_grid(double ell, int Nx, int Ny, double Ly) {
    if (!(ell > 0.0) || !(Ly > 0.0)) throw ConfigError("make_grid: ell and Ly must be positive");
    if (Nx < 4 || Ny < 4) throw ConfigError("make_grid: Nx and Ny must be >= 4");
    if (Nx % 2 != 0 || Ny % 2 != 0) throw ConfigError("make_grid: Nx and Ny must be even");
    CylinderGrid g;
    g.ell = ell;
    g.omega = kPi / ell;
    g.Nx = Nx;
    g.Ny = Ny;
    g.Ly = Ly;
    return g;
}

double Field::boundary_residual() const {
    double r = 0.0;
    for (int j = 0; j < grid.Nx; ++j) {
        r = std::max(r, std::abs(at(j, 0)));
        r = std::max(r, std::abs(at(j, grid.Ny - 1)));
    }
    return r;
}

double Field::max_abs() const {
    double r = 0.0;
    for (const Complex& v : values) r = std::max(r, std::abs(v));
    return r;
}

double Field::max_abs_imag() const {
    double r = 0.0;
    for (const Complex& v : values) r = std::max(r, std::abs(v.imag()));
    return r;
}

double SpectralCoeffs::max_abs() const {
    double r = 0.0;
    for (const Complex& v : values) r = std::max(r, std::abs(v));
    return r;
}

// The sample phases e^{-i om m x_j} and e^{-i xi_k y_k'} reduce to (-1)^m and
// (-1)^(k - Ny/2) times pure DFT twiddles because x_0 = -ell and y_0 = -Ly.
// Both transforms are exact mutual inverses on the grid.
SpectralCoeffs analyze(const Field& u) {
    const CylinderGrid& g = u.grid;
    SpectralCoeffs c(g);
    std::vector<Complex> work(g.size());
    fft::dft2d(g.Nx, g.Ny, u.values.data(), work.data(), false);
    const double scale = g.dx() * g.dy() / (2.0 * g.ell);
    for (int k = 0; k < g.Ny; ++k) {
        int kb = ((k - g.Ny / 2) % g.Ny + g.Ny) % g.Ny;
        double sy = ((k - g.Ny / 2) % 2 == 0) ? 1.0 : -1.0;
        for (int mi = 0; mi < g.Nx; ++mi) {
            int m = g.mode(mi);
            int jb = (m % g.Nx + g.Nx) % g.Nx;
            double sx = (m % 2 == 0) ? 1.0 : -1.0;
            c.values[static_cast<std::size_t>(k) * g.Nx + mi] =
                scale * sx * sy * work[static_cast<std::size_t>(kb) * g.Nx + jb];
        }
    }
    return c;
}

Field synthesize(const SpectralCoeffs& c) {
    const CylinderGrid& g = c.grid;
    std::vector<Complex> packed(g.size());
    for (int k = 0; k < g.Ny; ++k) {
        int kb = ((k - g.Ny / 2) % g.Ny + g.Ny) % g.Ny;
        double sy = ((k - g.Ny / 2) % 2 == 0) ? 1.0 : -1.0;
        for (int mi = 0; mi < g.Nx; ++mi) {
            int m = g.mode(mi);
            int jb = (m % g.Nx + g.Nx) % g.Nx;
            double sx = (m % 2 == 0) ? 1.0 : -1.0;
            packed[static_cast<std::size_t>(kb) * g.Nx + jb] =
                sx * sy * c.values[static_cast<std::size_t>(k) * g.Nx + mi];
        }
    }
    Field u(g);
    fft::dft2d(g.Nx, g.Ny, packed.data(), u.values.data(), true);
    const double scale = g.dxi() / (2.0 * kPi);
    for (Complex& v : u.values) v *= scale;
    return u;
}

Field zero_mass_project(const Field& u) {
    const CylinderGrid& g = u.grid;
    Field out = u;
    for (int k = 0; k < g.Ny; ++k) {
        Complex mean = pairwise_sum(std::span<const Complex>(u.values).subspan(
                           static_cast<std::size_t>(k) * g.Nx, g.Nx)) /
                       static_cast<double>(g.Nx);
        for (int j = 0; j < g.Nx; ++j) out.at(j, k) -= mean;
    }
    return out;
}

SpectralCoeffs convolve(const SpectralCoeffs& a, const SpectralCoeffs& b) {
    if (!(a.grid == b.grid)) throw ConfigError("convolve: grid mismatch");
    Field fa = synthesize(a);
    Field fb = synthesize(b);
    for (std::size_t i = 0; i < fa.values.size(); ++i) fa.values[i] *= fb.values[i];
    SpectralCoeffs c = analyze(fa);
    for (Complex& v : c.values) v *= 2.0 * kPi;
    return c;
}

namespace {

NormReport grid_norms(std::span<const Complex> vals, double w1, double w2) {
    // w1: measure weight for the L1 sum, w2: for the squared L2 sum
    std::vector<double> abs1(vals.size()), abs2(vals.size());
    double linf = 0.0;
    for (std::size_t i = 0; i < vals.size(); ++i) {
        double a = std::abs(vals[i]);
        abs1[i] = a;
        abs2[i] = a * a;
        linf = std::max(linf, a);
    }
    NormReport r;
    r.l1 = w1 * pairwise_sum(std::span<const double>(abs1));
    r.l2 = std::sqrt(w2 * pairwise_sum(std::span<const double>(abs2)));
    r.linf = linf;
    return r;
}

} // namespace

NormReport norms(const Field& u) {
    const CylinderGrid& g = u.grid;
    double cell = g.dx() * g.dy();
    NormReport r = grid_norms(u.values, cell, cell);
    r.trinorm = std::max(g.omega * r.l1, std::sqrt(g.omega) * r.l2);
    SpectralCoeffs c = analyze(u);
    NormReport rc = grid_norms(c.values, g.dxi(), g.dxi());
    r.plancherel_residual =
        rc.l2 > 0.0 ? std::abs(rc.l2 - std::sqrt(g.omega) * r.l2) / rc.l2 : 0.0;
    return r;
}

NormReport norms(const SpectralCoeffs& c) {
    const CylinderGrid& g = c.grid;
    NormReport r = grid_norms(c.values, g.dxi(), g.dxi());
    r.trinorm = std::max(g.omega * r.l1, std::sqrt(g.omega) * r.l2);
    Field u = synthesize(c);
    double cell = g.dx() * g.dy();
    NormReport ru = grid_norms(u.values, cell, cell);
    r.plancherel_residual = r.l2 > 0.0 ? std::abs(r.l2 - std::sqrt(g.omega) * ru.l2) / r.l2 : 0.0;
    return r;
}

double basic_lemma_constant(double omega) {
    return 4.0 * kPi * kPi / (3.0 * omega * omega) + (kPi / omega) * std::sqrt(kPi / 3.0);
}

Complex pz(int m, double xi, Complex z, double omega) {
    double om = omega * m;
    return Complex(om * om, xi) + 2.0 * om * z;
}

double line_margin(Complex z, double omega) {
    double s = 2.0 * z.real() / omega; // forbidden lines sit at integer s != 0
    double best = std::numeric_limits<double>::infinity();
    long base = std::lround(s);
    for (long k = base - 2; k <= base + 2; ++k) {
        if (k == 0) continue;
        best = std::min(best, std::abs(s - static_cast<double>(k)));
    }
    return best * omega / 2.0;
}

BasicLemmaReport basic_lemma_report(const SpectralCoeffs& f, Complex z, double tail_slack) {
    const CylinderGrid& g = f.grid;
    if (line_margin(z, g.omega) <= 0.0)
        throw ConfigError("basic_lemma_report: z lies on a line 2 Re z in omega*Z^*");
    double fmax = f.max_abs();
    for (int k = 0; k < g.Ny; ++k) {
        if (std::abs(f.at_mode(0, k)) > 1e-13 * std::max(1.0, fmax))
            throw ConfigError("basic_lemma_report: f(0, xi) must vanish");
    }

    std::vector<double> terms;
    terms.reserve(g.size());
    for (int k = 0; k < g.Ny; ++k) {
        double xi = g.xi(k);
        for (int mi = 0; mi < g.Nx; ++mi) {
            int m = g.mode(mi);
            if (m == 0) continue;
            double a = std::abs(f.values[static_cast<std::size_t>(k) * g.Nx + mi]);
            if (a == 0.0) continue;
            terms.push_back(a / std::abs(pz(m, xi, z, g.omega)));
        }
    }
    BasicLemmaReport rep;
    rep.C = basic_lemma_constant(g.omega);
    rep.tail_slack = tail_slack;
    rep.lhs = g.dxi() * pairwise_sum(std::span<const double>(terms));
    NormReport n = norms(f);
    rep.rhs = rep.C * std::max(n.l2, n.linf);
    rep.satisfied = rep.lhs <= rep.rhs * (1.0 + tail_slack) || rep.rhs == 0.0;
    if (rep.rhs == 0.0) rep.satisfied = rep.lhs == 0.0;
    return rep;
}

} // namespace kpist
