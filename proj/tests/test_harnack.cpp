#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "crflow/harnack.hpp"
#include "crflow/initial_data.hpp"

using namespace crflow;

namespace {

const Section5Params kRef{cplx(0.1, 0.0), cplx(0.05, 0.0), cplx(1.0, 0.0)};

PseudohermitianState nonconstant_state(const GridPtr& g, double t) {
    // Torsion-free family with d > 0: genuinely nonconstant positive curvature.
    PolyField u = PolyField::monomial(1, 0, 0, 0, kRef.a) +
                  PolyField::monomial(0, 1, 0, 0, kRef.b) + PolyField::constant(kRef.c);
    PolyField gp = u * u.conjugate() + 0.3 * PolyField::monomial(1, 0, 1, 0);
    Eigen::ArrayXd gv = sample_poly(gp, g).v.real();
    return PseudohermitianState::make(g, ScalarField{g, -0.5 * gv.log()}, t);
}

}  // namespace

TEST_CASE("Z with eta = 0 equals the base quantity") {
    GridPtr g = build_grid(12, 12, 12);
    PseudohermitianState s = nonconstant_state(g, 0.1);
    LegendrianField zero{ComplexField(g)};
    ScalarField z = harnack_Z(s, zero, 0.1);
    Eigen::ArrayXd base = 2.0 * s.lapW + s.W.square() + s.W / 0.1;
    CHECK((z.v - base).abs().maxCoeff() == 0.0);
}

TEST_CASE("Y is the exact minimum of Z over Legendrian fields") {
    GridPtr g = build_grid(12, 12, 12);
    PseudohermitianState s = nonconstant_state(g, 0.05);
    Eigen::ArrayXd y = harnack_Y(s, 0.05).v;

    // Substituting the optimal field recovers Y to rounding.
    LegendrianField opt = optimal_eta(s);
    Eigen::ArrayXd z_opt = harnack_Z(s, opt, 0.05).v;
    const double scale = y.abs().maxCoeff();
    CHECK((z_opt - y).abs().maxCoeff() < 1e-12 * scale);

    // Any other field does no better: Z - Y = (W/4) |eta_1 + 4 W_1 / W|^2 >= 0.
    for (std::uint32_t seed : {1u, 2u, 3u, 17u, 101u}) {
        LegendrianField eta = random_legendrian(g, seed);
        Eigen::ArrayXd z = harnack_Z(s, eta, 0.05).v;
        CHECK((z - y).minCoeff() >= -1e-12 * scale);
        // And the completed square is the exact gap.
        Eigen::ArrayXd gap = 0.25 * s.W * (eta.eta1.v + 4.0 * s.W1 / s.W).abs2();
        CHECK((z - y - gap).abs().maxCoeff() < 1e-11 * scale);
    }
}

TEST_CASE("random Legendrian fields are reproducible and order one") {
    GridPtr g = build_grid(8, 8, 8);
    LegendrianField a = random_legendrian(g, 42u);
    LegendrianField b = random_legendrian(g, 42u);
    CHECK((a.eta1.v == b.eta1.v).all());
    LegendrianField c = random_legendrian(g, 43u);
    CHECK((a.eta1.v - c.eta1.v).abs().maxCoeff() > 0.0);
    CHECK(a.eta1.v.abs().maxCoeff() <= std::sqrt(2.0));
    CHECK(a.eta1.v.abs().mean() > 0.3);
}

TEST_CASE("constant curvature gives the analytic Y = W^2 + W/t") {
    GridPtr g = build_grid(12, 12, 12);
    ScalarField lam = section5_lambda(kRef, g);
    PseudohermitianState s = PseudohermitianState::make(g, lam, 0.02);
    const double w = std::norm(kRef.c) - std::norm(kRef.a) - std::norm(kRef.b);
    Eigen::ArrayXd y = harnack_Y(s, 0.02).v;
    CHECK((y - (w * w + w / 0.02)).abs().maxCoeff() < 5e-3);
}

TEST_CASE("hypothesis and usage failures") {
    GridPtr g = build_grid(8, 8, 8);
    PseudohermitianState s = nonconstant_state(g, 0.1);
    CHECK_THROWS_AS(harnack_Y(s, 0.0), UsageError);
    CHECK_THROWS_AS(harnack_Z(s, random_legendrian(g, 1u), -0.1), UsageError);

    // lambda = 1.2 |z1|^2 has negative curvature somewhere.
    ScalarField bad = sample(g, [](const SpherePoint& p) { return 1.2 * std::norm(p.z1); });
    PseudohermitianState sb = PseudohermitianState::make(g, bad, 0.1);
    REQUIRE(sb.min_W < 0.0);
    CHECK_THROWS_AS(harnack_Y(sb, 0.1), HypothesisError);
    CHECK_THROWS_AS(optimal_eta(sb), HypothesisError);

    GridPtr g2 = build_grid(8, 8, 8);
    CHECK_THROWS_AS(harnack_Z(s, random_legendrian(g2, 1u), 0.1), UsageError);
}

TEST_CASE("monitor on the constant run matches the scalar solution") {
    FlowConfig c;
    c.n_eta = c.n_xi1 = c.n_xi2 = 8;
    c.initial_params = Section5Params{0.0, 0.0, cplx(1.0, 0.0)};
    c.t_end = 0.1;
    c.sigma = 0.25;
    c.snapshot_every = 0.005;
    RunResult r = run(c);
    std::vector<HarnackMonitorRow> rows = harnack_monitor(r, 0.01);
    REQUIRE(!rows.empty());
    for (const HarnackMonitorRow& row : rows) {
        CHECK(row.t >= 0.01 - 1e-12);
        const double w = 1.0 / (1.0 - 2.0 * row.t);
        // W is spatially constant: Y = W^2 + W/t, diff monitor = 2W^2 + 2W/t.
        CHECK(row.min_Y == doctest::Approx(w * w + w / row.t).epsilon(1e-6));
        CHECK(row.min_diff_residual ==
              doctest::Approx(2.0 * w * w + 2.0 * w / row.t).epsilon(1e-4));
        CHECK(row.min_diff_residual >= 0.0);
    }
    CHECK_THROWS_AS(harnack_monitor(r, 0.01, 0, 1), UsageError);
    RunResult bad = r;
    bad.snapshots[2].t += 1e-4;
    CHECK_THROWS_AS(harnack_monitor(bad, 0.01), UsageError);
}
