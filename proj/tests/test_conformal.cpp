#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "crflow/conformal.hpp"
#include "crflow/initial_data.hpp"

using namespace crflow;

namespace {

const Section5Params kRef{cplx(0.1, 0.0), cplx(0.05, 0.0), cplx(1.0, 0.0)};

}  // namespace

TEST_CASE("standard structure: W = 1 and A11 = 0 exactly") {
    GridPtr g = build_grid(12, 12, 12);
    ScalarField zero(g);
    // The differentiation matrices have exact zero row sums, so constants
    // differentiate to exactly zero and the curvature is bitwise 1.
    CHECK((webster_curvature(zero).v - 1.0).abs().maxCoeff() == 0.0);
    CHECK(torsion(zero).v.abs().maxCoeff() == 0.0);
}

TEST_CASE("constant conformal shift rescales the curvature") {
    GridPtr g = build_grid(16, 12, 12);
    ScalarField lam = section5_lambda(kRef, g);
    ScalarField shifted{g, lam.v + 0.37};
    Eigen::ArrayXd w = webster_curvature(lam).v;
    Eigen::ArrayXd ws = webster_curvature(shifted).v;
    CHECK((ws - std::exp(-2.0 * 0.37) * w).abs().maxCoeff() < 1e-12);
    // The torsion rescales the same way.
    CHECK((torsion(shifted).v - std::exp(-2.0 * 0.37) * torsion(lam).v).abs().maxCoeff() <
          1e-12);
}

TEST_CASE("flowed operators reduce to hatted ones at lambda = 0") {
    GridPtr g = build_grid(16, 12, 12);
    ScalarField zero(g);
    auto [f, p] = random_smooth_field(g, 5u, 3);
    CHECK((flowed_sublaplacian(zero, f).v - sublaplacian(f).v).abs().maxCoeff() < 1e-12);
    SecondDerivs sd = covariant_second(f);
    CHECK((flowed_hessian11(zero, f).v - sd.f11.v).abs().maxCoeff() < 1e-12);
    // f_{,0} = T f at lambda = 0.
    ScalarField f0 = reeb_derivative(zero, f);
    ComplexField tf = sample_poly(poly_frame_derivative(p, Dir::T), g);
    CHECK((f0.v - tf.v.real()).abs().maxCoeff() < 1e-4);  // second-derivative truncation
}

TEST_CASE("flowed sublaplacian against the conformal identity on exact data") {
    // Delta_b f = e^{-2 lambda} (Delta_bhat f + 2 <grad_hat lambda, grad_hat f>),
    // with every piece evaluated through the exact polynomial oracle.
    GridPtr g = build_grid(24, 16, 16);
    auto [f, p] = random_smooth_field(g, 21u, 3);
    ScalarField lam = section5_lambda(kRef, g);

    PolyField lap_p = poly_frame_derivative(poly_frame_derivative(p, Dir::Z1), Dir::Z1bar) +
                      poly_frame_derivative(poly_frame_derivative(p, Dir::Z1bar), Dir::Z1);
    PolyField f1 = poly_frame_derivative(p, Dir::Z1);
    Eigen::ArrayXd oracle(g->n_nodes());
    for (long n = 0; n < g->n_nodes(); ++n) {
        const SpherePoint x = g->point(n);
        const cplx l1 = section5_lambda1(kRef, x);
        const double cross = 2.0 * 2.0 * std::real(std::conj(l1) * f1.eval(x));
        oracle[n] = std::exp(2.0 * std::log(std::abs(kRef.a * x.z1 + kRef.b * x.z2 + kRef.c))) *
                    (std::real(lap_p.eval(x)) + cross);
    }
    CHECK((flowed_sublaplacian(lam, f).v - oracle).abs().maxCoeff() < 1e-5);
}

TEST_CASE("section-5 state: flat curvature makes the derived fields vanish") {
    GridPtr g = build_grid(16, 16, 16);
    ScalarField lam = section5_lambda(kRef, g);
    PseudohermitianState s = PseudohermitianState::make(g, lam, 0.0);
    const double expect = std::norm(kRef.c) - std::norm(kRef.a) - std::norm(kRef.b);
    CHECK(std::abs(s.min_W - expect) < 1e-6);
    CHECK(std::abs(s.max_W - expect) < 1e-6);
    // W is constant, so its flowed derivatives are pure discretization noise.
    CHECK(s.W1.abs().maxCoeff() < 1e-5);
    CHECK(s.lapW.abs().maxCoeff() < 1e-4);
    CHECK(s.W0.abs().maxCoeff() < 1e-4);
    CHECK(s.W11.abs().maxCoeff() < 1e-4);
    CHECK(s.A11.abs().maxCoeff() < 1e-6);
    CHECK(s.Q11.abs().maxCoeff() < 1e-4);
    CHECK((s.em2l * s.e2l - 1.0).abs().maxCoeff() < 1e-14);
}

TEST_CASE("curvature evolution identity at t = 0 on nonconstant curvature") {
    // Central difference of W along lambda -> lambda -+ dt W against
    // dW/dt = 4 Delta_b W + 2 W^2; torsion-free data with d > 0 so that the
    // curvature is genuinely nonconstant.
    GridPtr g = build_grid(24, 16, 16);
    PolyField u = PolyField::monomial(1, 0, 0, 0, kRef.a) +
                  PolyField::monomial(0, 1, 0, 0, kRef.b) + PolyField::constant(kRef.c);
    PolyField gp = u * u.conjugate() + 0.4 * PolyField::monomial(1, 0, 1, 0);
    Eigen::ArrayXd gv = sample_poly(gp, g).v.real();
    ScalarField lam{g, -0.5 * gv.log()};

    ScalarField W = webster_curvature(lam);
    const double dt = 1e-5;
    Eigen::ArrayXd wp = webster_curvature({g, lam.v - dt * W.v}).v;
    Eigen::ArrayXd wm = webster_curvature({g, lam.v + dt * W.v}).v;
    Eigen::ArrayXd wdot = (wp - wm) / (2.0 * dt);
    Eigen::ArrayXd rhs = 4.0 * flowed_sublaplacian(lam, W).v + 2.0 * W.v.square();
    CHECK((wdot - rhs).abs().maxCoeff() < 1e-3);
    CHECK(wdot.abs().maxCoeff() > 1.0);  // the identity is not vacuous here
}

TEST_CASE("torsion evolution identity at t = 0 on torsion-free data is consistent") {
    // d A11 / dt = 2 W A11 - 2i W_{,11}; at torsion-free data both sides are
    // discretization-level small for the d > 0 family as well.
    GridPtr g = build_grid(16, 16, 16);
    ScalarField lam = section5_lambda(kRef, g);
    PseudohermitianState s = PseudohermitianState::make(g, lam, 0.0);
    const double dt = 1e-5;
    Eigen::ArrayXcd ap = torsion({g, lam.v - dt * s.W}).v;
    Eigen::ArrayXcd am = torsion({g, lam.v + dt * s.W}).v;
    Eigen::ArrayXcd adot = (ap - am) / (2.0 * dt);
    Eigen::ArrayXcd rhs = 2.0 * s.W * s.A11 - 2.0 * kI * s.W11;
    CHECK((adot - rhs).abs().maxCoeff() < 1e-3);
}

TEST_CASE("state diagnostics collect max norms") {
    GridPtr g = build_grid(8, 8, 8);
    ScalarField lam = section5_lambda(kRef, g);
    PseudohermitianState s = PseudohermitianState::make(g, lam, 0.0);
    DiagnosticsRecord d = state_diagnostics(s);
    CHECK(d.max_A11 == s.A11.abs().maxCoeff());
    CHECK(d.max_W0 == s.W0.abs().maxCoeff());
    CHECK(d.max_W11 == s.W11.abs().maxCoeff());
    CHECK(d.max_Q11 == s.Q11.abs().maxCoeff());
}

TEST_CASE("non-finite conformal factors are rejected") {
    GridPtr g = build_grid(8, 8, 8);
    ScalarField lam(g);
    lam.v[3] = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(webster_curvature(lam), DataError);
    CHECK_THROWS_AS(PseudohermitianState::make(g, lam, 0.0), DataError);
}
