#include "kpist/cylinder.hpp"

#include "test_helpers.hpp"

#include <doctest.h>

#include <random>

using namespace kpist;
using namespace kpist::testing;

namespace {
constexpr double kPi = 3.14159265358979323846;

Field random_complex_field(const CylinderGrid& g, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    Field u(g);
    for (auto& v : u.values) v = Complex(U(rng), U(rng));
    // kill unresolved tails so round trips probe smooth content
    SpectralCoeffs c = analyze(u);
    for (int k = 0; k < g.Ny; ++k)
        for (int mi = 0; mi < g.Nx; ++mi) {
            int m = g.mode(mi);
            double damp = std::exp(-0.1 * m * m - 0.02 * g.xi(k) * g.xi(k));
            c.values[static_cast<std::size_t>(k) * g.Nx + mi] *= damp;
        }
    return synthesize(c);
}
} // namespace

TEST_CASE("make_grid derives omega and validates") {
    CylinderGrid g = make_grid(kPi, 8, 8, 10.0);
    CHECK(g.omega == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(g.x(0) == doctest::Approx(-kPi));
    CHECK(g.dxi() == doctest::Approx(kPi / 10.0));

    CHECK(make_grid(1.0, 4, 4, 5.0).omega == doctest::Approx(kPi));

    CHECK_THROWS_AS(make_grid(kPi, 7, 8, 10.0), ConfigError);
    CHECK_THROWS_AS(make_grid(kPi, 8, 9, 10.0), ConfigError);
    CHECK_THROWS_AS(make_grid(-1.0, 8, 8, 10.0), ConfigError);
    CHECK_THROWS_AS(make_grid(kPi, 2, 8, 10.0), ConfigError);
}

TEST_CASE("analyze matches the closed-form transform of cos(x) exp(-y^2)") {
    CylinderGrid g = make_grid(kPi, 16, 128, 10.0);
    Field u = cosine_gaussian(g, 1.0);
    SpectralCoeffs c = analyze(u);

    // y-line transform of exp(-y^2) is sqrt(pi) exp(-xi^2/4); the x factor
    // cos(x) splits into (1/2) at m = +-1. Cross-checked by Simpson quadrature.
    for (int k = 0; k < g.Ny; ++k) {
        double xi = g.xi(k);
        double expected = 0.5 * std::sqrt(kPi) * std::exp(-xi * xi / 4.0);
        double quad = 0.5 * simpson([xi](double y) { return std::exp(-y * y) * std::cos(xi * y); },
                                    -10.0, 10.0, 4000);
        CHECK(std::abs(c.at_mode(1, k) - expected) < 1e-12 + 1e-10 * expected);
        CHECK(std::abs(c.at_mode(-1, k) - expected) < 1e-12 + 1e-10 * expected);
        CHECK(expected == doctest::Approx(quad).epsilon(1e-9));
        for (int m : {-3, -2, 0, 2, 3})
            CHECK(std::abs(c.at_mode(m, k)) < 1e-13);
    }
}

TEST_CASE("zero field transforms to zero") {
    CylinderGrid g = make_grid(kPi, 8, 16, 6.0);
    SpectralCoeffs c = analyze(Field(g));
    CHECK(c.max_abs() == 0.0);
    CHECK(synthesize(SpectralCoeffs(g)).max_abs() == 0.0);
}

TEST_CASE("single coefficient synthesizes the bare harmonic") {
    CylinderGrid g = make_grid(kPi, 8, 16, 6.0);
    SpectralCoeffs c(g);
    int k0 = g.Ny / 2; // xi = 0
    c.at_mode(1, k0) = 2.0 * kPi / g.dxi();
    Field u = synthesize(c);
    for (int k = 0; k < g.Ny; ++k)
        for (int j = 0; j < g.Nx; ++j)
            CHECK(std::abs(u.at(j, k) - std::exp(Complex(0.0, g.x(j)))) < 1e-12);
}

TEST_CASE("analyze / synthesize round trip") {
    CylinderGrid g = make_grid(2.0, 16, 64, 8.0);
    Field u = random_complex_field(g, 17);
    Field v = synthesize(analyze(u));
    CHECK(rel_l2(v, u) < 1e-12);

    SpectralCoeffs c = analyze(u);
    SpectralCoeffs c2 = analyze(synthesize(c));
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < c.values.size(); ++i) {
        num += std::norm(c.values[i] - c2.values[i]);
        den += std::norm(c.values[i]);
    }
    CHECK(std::sqrt(num / den) < 1e-12);
}

TEST_CASE("Plancherel identity on smooth fields") {
    CylinderGrid g = make_grid(kPi, 32, 128, 10.0);
    Field u = random_complex_field(g, 5);
    CHECK(norms(u).plancherel_residual < 1e-10);
    CHECK(norms(analyze(u)).plancherel_residual < 1e-10);
}

TEST_CASE("zero mass projection") {
    CylinderGrid g = make_grid(kPi, 16, 32, 6.0);
    Field a = sample(g, [](double x, double y) { return std::cos(x) * std::exp(-y * y); });
    CHECK(rel_l2(zero_mass_project(a), a) < 1e-14);

    Field b = sample(g, [](double x, double) { return 1.0 + std::cos(x); });
    Field pb = zero_mass_project(b);
    Field expect = sample(g, [](double x, double) { return std::cos(x); });
    CHECK(rel_l2(pb, expect) < 1e-14);
    CHECK(rel_l2(zero_mass_project(pb), pb) < 1e-14);

    SpectralCoeffs c = analyze(pb);
    for (int k = 0; k < g.Ny; ++k) CHECK(std::abs(c.at_mode(0, k)) < 1e-14);
}

TEST_CASE("convolution theorem against the direct lattice sum") {
    CylinderGrid g = make_grid(kPi, 8, 24, 5.0);
    Field u = random_complex_field(g, 11);
    Field h = random_complex_field(g, 13);
    SpectralCoeffs cu = analyze(u), ch = analyze(h);

    Field prod = u;
    for (std::size_t i = 0; i < prod.values.size(); ++i) prod.values[i] *= h.values[i];
    SpectralCoeffs lhs = analyze(prod);
    SpectralCoeffs conv = convolve(cu, ch);

    double scale = conv.max_abs();
    for (std::size_t i = 0; i < lhs.values.size(); ++i)
        CHECK(std::abs(lhs.values[i] - conv.values[i] / (2.0 * kPi)) < 1e-10 * scale);

    // direct wrapped double sum oracle at a handful of outputs
    auto direct = [&](int m, int k) {
        Complex s(0.0);
        for (int mp = -g.Nx / 2; mp < g.Nx / 2; ++mp)
            for (int kp = 0; kp < g.Ny; ++kp) {
                int md = m - mp;
                md = ((md + g.Nx / 2) % g.Nx + g.Nx) % g.Nx - g.Nx / 2;
                int kd = ((k - (kp - g.Ny / 2)) % g.Ny + g.Ny) % g.Ny;
                s += cu.at_mode(md, kd) * ch.at_mode(mp, kp);
            }
        return s * g.dxi();
    };
    for (auto [m, k] : {std::pair{0, 12}, {1, 10}, {-2, 15}, {3, 3}}) {
        Complex d = direct(m, k);
        CHECK(std::abs(conv.at_mode(m, k) - d) <= 1e-10 * scale);
    }
}

TEST_CASE("convolution identity element and zero") {
    CylinderGrid g = make_grid(kPi, 8, 16, 5.0);
    Field h = random_complex_field(g, 3);
    SpectralCoeffs ch = analyze(h);
    SpectralCoeffs zero(g);
    CHECK(convolve(zero, ch).max_abs() == 0.0);

    SpectralCoeffs delta(g);
    delta.at_mode(0, g.Ny / 2) = 1.0 / g.dxi();
    SpectralCoeffs out = convolve(delta, ch);
    double scale = ch.max_abs();
    for (std::size_t i = 0; i < out.values.size(); ++i)
        CHECK(std::abs(out.values[i] - ch.values[i]) < 1e-12 * scale);

    CylinderGrid g2 = make_grid(kPi, 8, 32, 5.0);
    CHECK_THROWS_AS(convolve(ch, SpectralCoeffs(g2)), ConfigError);
}

TEST_CASE("norms of the reference profile match closed forms") {
    CylinderGrid g = make_grid(kPi, 32, 256, 12.0);
    Field u = cosine_gaussian(g, 1.0);
    NormReport r = norms(u);
    // ||u||_1 = int |cos| int e^{-y^2} = 4 sqrt(pi) = 7.0898154036220635
    // ||u||_2^2 = pi sqrt(pi/2)       => ||u||_2 = 1.9842889120364011
    // |cos| has kinks, so the trapezoid L1 value converges at O(dx^2) only
    CHECK(r.l1 == doctest::Approx(7.0898154036220635).epsilon(5e-3));
    CHECK(r.l2 == doctest::Approx(1.9842889120364011).epsilon(1e-10));
    CHECK(r.trinorm == doctest::Approx(std::max(r.l1 * g.omega, std::sqrt(g.omega) * r.l2)));
    CHECK(norms(Field(g)).l1 == 0.0);
    CHECK(norms(Field(g)).linf == 0.0);
}

TEST_CASE("basic lemma constant and report") {
    CHECK(basic_lemma_constant(1.0) == doctest::Approx(16.374348202692726).epsilon(1e-12));

    CylinderGrid g = make_grid(kPi, 16, 64, 8.0);
    SpectralCoeffs zero(g);
    BasicLemmaReport r0 = basic_lemma_report(zero, Complex(0.26, 0.4));
    CHECK(r0.satisfied);
    CHECK(r0.lhs == 0.0);

    // property: holds for random band-limited data with zeroed m = 0 row
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        SpectralCoeffs f(g);
        for (int k = g.Ny / 4; k < 3 * g.Ny / 4; ++k)
            for (int m = -4; m <= 4; ++m) {
                if (m == 0) continue;
                f.at_mode(m, k) = Complex(U(rng), U(rng));
            }
        int strip = static_cast<int>(rng() % 7) - 3; // strips -3..3
        double frac = 0.25 + 0.5 * (U(rng) * 0.5 + 0.5); // stay >= 0.25 from the lines
        Complex z((strip + frac) * g.omega / 2.0, 3.0 * U(rng));
        BasicLemmaReport r = basic_lemma_report(f, z);
        CHECK(r.satisfied);
        CHECK(r.lhs > 0.0);
        CHECK(r.lhs <= r.rhs * (1.0 + r.tail_slack));
    }

    // forbidden line and nonzero m = 0 row are rejected
    SpectralCoeffs f(g);
    f.at_mode(1, g.Ny / 2) = 1.0;
    CHECK_THROWS_AS(basic_lemma_report(f, Complex(g.omega / 2.0, 0.0)), ConfigError);
    f.at_mode(0, g.Ny / 2) = 1.0;
    CHECK_THROWS_AS(basic_lemma_report(f, Complex(0.26, 0.0)), ConfigError);
}

TEST_CASE("pz arithmetic") {
    CHECK(pz(1, 0.0, Complex(1.0, 0.0), 1.0) == Complex(3.0, 0.0));
    CHECK(pz(1, 2.0, Complex(0.0, 1.0), 1.0) == Complex(1.0, 4.0));
    // root on the contour: z = -(omega/2) n + i tau, m = n, xi = -2 omega n tau
    CHECK(std::abs(pz(2, -12.0, Complex(-1.0, 3.0), 1.0)) < 1e-14);
}

TEST_CASE("boundary residual reflects y decay") {
    CylinderGrid g = make_grid(kPi, 8, 64, 12.0);
    Field u = cosine_gaussian(g, 1.0);
    CHECK(u.boundary_residual() < 1e-10 * u.max_abs());
    CylinderGrid tight = make_grid(kPi, 8, 64, 2.0);
    CHECK(cosine_gaussian(tight, 1.0).boundary_residual() > 1e-3);
}
