#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "crflow/fields.hpp"
#include "crflow/sphere_grid.hpp"

using namespace crflow;

namespace {

SpherePoint random_point(std::mt19937& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    return SpherePoint::project(cplx(g(rng), g(rng)), cplx(g(rng), g(rng)));
}

}  // namespace

TEST_CASE("SpherePoint validates the unit-sphere constraint") {
    CHECK_NOTHROW(SpherePoint(cplx(1.0, 0.0), cplx(0.0, 0.0)));
    CHECK_THROWS_AS(SpherePoint(cplx(1.0, 0.0), cplx(0.5, 0.0)), DataError);
    CHECK_THROWS_AS(SpherePoint::project(cplx(0.0, 0.0), cplx(0.0, 0.0)), DataError);

    SpherePoint p = SpherePoint::project(cplx(3.0, 4.0), cplx(0.0, 12.0));
    CHECK(std::abs(std::norm(p.z1) + std::norm(p.z2) - 1.0) < 1e-15);
}

TEST_CASE("Hopf coordinates round-trip") {
    std::mt19937 rng(11);
    for (int i = 0; i < 50; ++i) {
        SpherePoint p = random_point(rng);
        const double eta = p.eta(), xi1 = p.xi1(), xi2 = p.xi2();
        CHECK(eta >= 0.0);
        CHECK(eta <= kPi / 2.0);
        SpherePoint q(std::polar(std::cos(eta), xi1), std::polar(std::sin(eta), xi2));
        CHECK(std::abs(q.z1 - p.z1) < 1e-12);
        CHECK(std::abs(q.z2 - p.z2) < 1e-12);
    }
}

TEST_CASE("contact form evaluates to 1 on the Reeb field and 0 on the CR frame") {
    std::mt19937 rng(23);
    for (int i = 0; i < 50; ++i) {
        SpherePoint p = random_point(rng);
        FrameCoefficients f = frame_at(p);
        CHECK(theta_of(p, f.t_dz1, f.t_dz2) == doctest::Approx(1.0).epsilon(1e-14));
        // The real and imaginary parts of Z1 are horizontal directions.
        CHECK(std::abs(theta_of(p, f.z1_dz1, f.z1_dz2)) < 1e-14);
        CHECK(std::abs(theta_of(p, kI * f.z1_dz1, kI * f.z1_dz2)) < 1e-14);
        // Z1 is tangent to the sphere: Re(conj(z) . v) = 0.
        CHECK(std::abs(std::real(std::conj(p.z1) * f.z1_dz1 + std::conj(p.z2) * f.z1_dz2)) <
              1e-14);
    }
}

TEST_CASE("build_grid rejects invalid dimensions") {
    CHECK_THROWS_AS(build_grid(3, 8, 8), ConfigError);
    CHECK_THROWS_AS(build_grid(8, 7, 8), ConfigError);
    CHECK_THROWS_AS(build_grid(8, 8, 9), ConfigError);
    CHECK_NOTHROW(build_grid(4, 4, 4));
}

TEST_CASE("quadrature weights integrate the volume form exactly") {
    for (int n : {8, 16}) {
        GridPtr g = build_grid(n, n, n);
        CHECK(g->weight.sum() == doctest::Approx(16.0 * kPi * kPi).epsilon(1e-13));
        // A mean-zero spherical harmonic integrates to zero: Re(z1 conj(z2)).
        ScalarField f = sample(g, [](const SpherePoint& p) {
            return std::real(p.z1 * std::conj(p.z2));
        });
        CHECK(std::abs(integrate(f)) < 1e-10);
        // |z1|^2 integrates to half the volume by symmetry.
        ScalarField h = sample(g, [](const SpherePoint& p) { return std::norm(p.z1); });
        CHECK(integrate(h) == doctest::Approx(8.0 * kPi * kPi).epsilon(1e-12));
    }
}

TEST_CASE("parity permutations implement the exact reflection identities") {
    GridPtr g = build_grid(8, 12, 12);
    auto f = [](double eta, double xi1, double xi2) {
        // Any function of (z, conj z): built from cos(eta), sin(eta) and phases.
        const cplx z1 = std::polar(std::cos(eta), xi1), z2 = std::polar(std::sin(eta), xi2);
        return std::real(z1 * std::conj(z2)) + std::norm(z1) - 0.3 * std::imag(z2 * z2);
    };
    for (int i = 0; i < g->n_xi1; ++i) {
        for (int j = 0; j < g->n_xi2; ++j) {
            const int s = i * g->n_xi2 + j;
            const double x1 = g->xi1[i], x2 = g->xi2[j];
            // Bottom: f(-eta, xi1, xi2) = f(eta, xi1, xi2 + pi).
            const int sb = g->perm_bottom[s];
            const int jb = sb % g->n_xi2;
            CHECK(f(-g->eta[0], x1, x2) ==
                  doctest::Approx(f(g->eta[0], x1, g->xi2[jb])).epsilon(1e-13));
            // Top: f(pi/2 + d, xi1, xi2) = f(pi/2 - d, xi1 + pi, xi2).
            const int st = g->perm_top[s];
            const int it = st / g->n_xi2;
            const double d = 0.5 * g->h_eta;
            CHECK(f(kPi / 2.0 + d, x1, x2) ==
                  doctest::Approx(f(kPi / 2.0 - d, g->xi1[it], x2)).epsilon(1e-13));
        }
    }
}

TEST_CASE("node bookkeeping is consistent") {
    GridPtr g = build_grid(6, 8, 10);
    CHECK(g->n_nodes() == 6 * 8 * 10);
    for (int k = 0; k < g->n_eta; k += 2)
        for (int i = 0; i < g->n_xi1; i += 3)
            for (int j = 0; j < g->n_xi2; j += 3) {
                const long n = g->index(k, i, j);
                CHECK(g->node_eta[n] == g->eta[k]);
                CHECK(g->node_xi1[n] == g->xi1[i]);
                CHECK(g->node_xi2[n] == g->xi2[j]);
                SpherePoint p = g->point(n);
                CHECK(std::abs(p.z1 - std::polar(std::cos(g->eta[k]), g->xi1[i])) < 1e-14);
            }
}
