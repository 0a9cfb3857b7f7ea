#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "crflow/conformal.hpp"
#include "crflow/initial_data.hpp"

using namespace crflow;

namespace {

const Section5Params kRef{cplx(0.1, 0.0), cplx(0.05, 0.0), cplx(1.0, 0.0)};

SpherePoint random_point(std::mt19937& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    return SpherePoint::project(cplx(g(rng), g(rng)), cplx(g(rng), g(rng)));
}

}  // namespace

TEST_CASE("admissibility bound on the parameters") {
    CHECK_NOTHROW(kRef.validate());
    CHECK_NOTHROW(Section5Params{cplx(0.3, 0.4), cplx(0.0, 0.5), cplx(1.0, 0.0)}.validate());
    CHECK_THROWS_AS(Section5Params({cplx(1.0, 0.0), cplx(0.0, 0.0), cplx(1.0, 0.0)}).validate(),
                    ConfigError);
    CHECK_THROWS_AS(section5_lambda({cplx(2.0, 0.0), 0.0, cplx(1.0, 0.0)}, build_grid(4, 4, 4)),
                    ConfigError);
}

TEST_CASE("curvature oracle is the expected constant") {
    GridPtr g = build_grid(8, 8, 8);
    ScalarField w = section5_W_oracle(kRef, g);
    const double expect = std::norm(kRef.c) - std::norm(kRef.a) - std::norm(kRef.b);
    CHECK((w.v - expect).abs().maxCoeff() < 1e-14);
}

TEST_CASE("closed-form derivatives satisfy the torsion-free identity exactly") {
    std::mt19937 rng(17);
    Section5Params p{cplx(0.2, -0.1), cplx(0.0, 0.15), cplx(1.1, 0.2)};
    for (int i = 0; i < 50; ++i) {
        SpherePoint x = random_point(rng);
        const cplx l1 = section5_lambda1(p, x);
        const cplx l11 = section5_lambda11(p, x);
        CHECK(std::abs(l11 - 2.0 * l1 * l1) < 1e-15);
    }
}

TEST_CASE("closed-form first derivative matches the discrete frame derivative") {
    GridPtr g = build_grid(24, 16, 16);
    ScalarField lam = section5_lambda(kRef, g);
    ComplexField l1 = frame_derivative(lam, Dir::Z1);
    double worst = 0.0;
    for (long n = 0; n < g->n_nodes(); ++n)
        worst = std::max(worst, std::abs(l1.v[n] - section5_lambda1(kRef, g->point(n))));
    CHECK(worst < 1e-8);
}

TEST_CASE("verify_torsion_free reports near-zero residuals") {
    GridPtr g = build_grid(16, 16, 16);
    TorsionFreeReport r = verify_torsion_free(kRef, g);
    CHECK(r.max_exact_residual < 1e-14);
    CHECK(r.max_identity_residual < 1e-7);
    CHECK(r.max_torsion < 1e-6);
}

TEST_CASE("discrete curvature matches the oracle") {
    GridPtr g = build_grid(24, 16, 16);
    ScalarField lam = section5_lambda(kRef, g);
    ScalarField w = webster_curvature(lam);
    ScalarField wo = section5_W_oracle(kRef, g);
    const double scale = wo.v.abs().maxCoeff();
    CHECK(((w.v - wo.v).abs() / scale).maxCoeff() < 1e-6);
}

TEST_CASE("extended conformal family: curvature against an exact polynomial oracle") {
    // For any smooth positive g with theta = g^{-1} theta_hat (lambda =
    // -0.5 ln g), the curvature is W = g + 2 Delta_b g - 6 |g_{,1}|^2 / g.
    // With polynomial g both Delta_b g and g_{,1} are exact, giving an
    // independent nonconstant oracle.
    GridPtr grid = build_grid(24, 16, 16);

    auto check_g = [&](const PolyField& gp, double tol) {
        ComplexField gs = sample_poly(gp, grid);
        REQUIRE(gs.v.imag().abs().maxCoeff() < 1e-13);
        Eigen::ArrayXd gv = gs.v.real();
        REQUIRE(gv.minCoeff() > 0.0);

        ScalarField lam{grid, -0.5 * gv.log()};
        ScalarField w = webster_curvature(lam);

        PolyField lap = poly_frame_derivative(poly_frame_derivative(gp, Dir::Z1), Dir::Z1bar) +
                        poly_frame_derivative(poly_frame_derivative(gp, Dir::Z1bar), Dir::Z1);
        PolyField g1 = poly_frame_derivative(gp, Dir::Z1);
        Eigen::ArrayXd oracle(grid->n_nodes());
        for (long n = 0; n < grid->n_nodes(); ++n) {
            const SpherePoint x = grid->point(n);
            oracle[n] = gv[n] + 2.0 * std::real(lap.eval(x)) -
                        6.0 * std::norm(g1.eval(x)) / gv[n];
        }
        CHECK((w.v - oracle).abs().maxCoeff() < tol);
    };

    // The torsion-free family |a z1 + b z2 + c|^2 + d |z1|^2 with d > 0.
    PolyField u = PolyField::monomial(1, 0, 0, 0, kRef.a) +
                  PolyField::monomial(0, 1, 0, 0, kRef.b) + PolyField::constant(kRef.c);
    PolyField fam = u * u.conjugate() + 0.3 * PolyField::monomial(1, 0, 1, 0);
    check_g(fam, 1e-6);

    // A generic positive polynomial (no special structure at all).
    PolyField generic = PolyField::constant(2.0) +
                        0.2 * (PolyField::monomial(1, 0, 0, 1) +
                               PolyField::monomial(0, 1, 1, 0)) +
                        0.15 * (PolyField::monomial(2, 0, 2, 0) +
                                PolyField::monomial(1, 1, 1, 1));
    PolyField generic_real = 0.5 * (generic + generic.conjugate());
    check_g(generic_real, 1e-5);
}

TEST_CASE("extended family with d > 0 stays torsion-free") {
    GridPtr grid = build_grid(16, 16, 16);
    PolyField u = PolyField::monomial(1, 0, 0, 0, kRef.a) +
                  PolyField::monomial(0, 1, 0, 0, kRef.b) + PolyField::constant(kRef.c);
    PolyField gp = u * u.conjugate() + 0.3 * PolyField::monomial(1, 0, 1, 0);
    Eigen::ArrayXd gv = sample_poly(gp, grid).v.real();
    ScalarField lam{grid, -0.5 * gv.log()};
    ComplexField a11 = torsion(lam);
    CHECK(a11.v.abs().maxCoeff() < 1e-6);
}
