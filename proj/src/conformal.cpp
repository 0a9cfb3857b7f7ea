#include "crflow/conformal.hpp"

#include <cmath>

namespace crflow {

namespace {

struct LambdaDerivs {
    Eigen::ArrayXd em2l;
    Eigen::ArrayXcd g1;      // Z1hat lambda
    Eigen::ArrayXcd lam11;   // Z1hat Z1hat lambda
    Eigen::ArrayXd lap_hat;  // Delta_bhat lambda
};

LambdaDerivs lambda_derivs(const HopfGrid& g, const Eigen::ArrayXd& lam) {
    LambdaDerivs d;
    d.em2l = (-2.0 * lam).exp();
    PartialsR p0 = partials(g, lam);
    d.g1 = apply_z1(g, p0);
    PartialsC p1 = partials(g, d.g1);
    d.lam11 = apply_z1(g, p1);
    d.lap_hat = 2.0 * apply_z1bar(g, p1).real();
    return d;
}

Eigen::ArrayXd webster_from(const LambdaDerivs& d) {
    return d.em2l * (1.0 - 4.0 * d.lap_hat - 8.0 * d.g1.abs2());
}

Eigen::ArrayXcd torsion_from(const LambdaDerivs& d) {
    return d.em2l * (2.0 * kI * d.lam11 - 4.0 * kI * d.g1.square());
}

}  // namespace

// Fused real-arithmetic evaluation of the curvature; used inside Runge-Kutta
// stages where this is the single hot spot.  Mathematically identical to the
// generic path webster_from(lambda_derivs(...)).
Eigen::ArrayXd webster_W_array(const HopfGrid& g, const Eigen::ArrayXd& lambda) {
    const double inv2s2 = 1.0 / (2.0 * std::sqrt(2.0));
    PartialsR p0 = partials(g, lambda);
    // Z1 lambda = phase_neg (q_re + i q_im) / (2 sqrt2)
    Eigen::ArrayXd q_re = std::move(p0.e);
    Eigen::ArrayXd q_im = g.tan_eta * p0.x1 - g.cot_eta * p0.x2;
    Eigen::ArrayXd grad2 = 0.125 * (q_re.square() + q_im.square());  // |Z1 lambda|^2
    Eigen::ArrayXd g1_re = inv2s2 * (g.phase_cos * q_re + g.phase_sin * q_im);
    Eigen::ArrayXd g1_im = inv2s2 * (g.phase_cos * q_im - g.phase_sin * q_re);
    PartialsR pr = partials(g, g1_re);
    PartialsR pi = partials(g, g1_im);
    // Delta_b lambda = 2 Re(Z1bar Z1 lambda)
    Eigen::ArrayXd m_re = pr.e + g.tan_eta * pi.x1 - g.cot_eta * pi.x2;
    Eigen::ArrayXd m_im = pi.e - g.tan_eta * pr.x1 + g.cot_eta * pr.x2;
    Eigen::ArrayXd lap = (2.0 * inv2s2) * (g.phase_cos * m_re - g.phase_sin * m_im);
    return (-2.0 * lambda).exp() * (1.0 - 4.0 * lap - 8.0 * grad2);
}

ScalarField webster_curvature(const ScalarField& lambda) {
    require_finite(lambda.v, "webster_curvature");
    return {lambda.grid, webster_W_array(*lambda.grid, lambda.v)};
}

ComplexField torsion(const ScalarField& lambda) {
    require_finite(lambda.v, "torsion");
    return {lambda.grid, torsion_from(lambda_derivs(*lambda.grid, lambda.v))};
}

ScalarField flowed_sublaplacian(const ScalarField& lambda, const ScalarField& f) {
    require_same_grid(lambda.grid, f.grid, "flowed_sublaplacian");
    require_finite(lambda.v, "flowed_sublaplacian");
    require_finite(f.v, "flowed_sublaplacian");
    const HopfGrid& g = *f.grid;
    Eigen::ArrayXcd g1 = apply_z1(g, partials(g, lambda.v));
    PartialsR pf = partials(g, f.v);
    Eigen::ArrayXcd f1 = apply_z1(g, pf);
    Eigen::ArrayXd lap_hat = 2.0 * apply_z1bar(g, partials(g, f1)).real();
    Eigen::ArrayXd cross = 4.0 * (g1.conjugate() * f1).real();
    return {f.grid, (-2.0 * lambda.v).exp() * (lap_hat + cross)};
}

ComplexField flowed_hessian11(const ScalarField& lambda, const ScalarField& f) {
    require_same_grid(lambda.grid, f.grid, "flowed_hessian11");
    require_finite(lambda.v, "flowed_hessian11");
    require_finite(f.v, "flowed_hessian11");
    const HopfGrid& g = *f.grid;
    Eigen::ArrayXcd g1 = apply_z1(g, partials(g, lambda.v));
    Eigen::ArrayXcd f1 = apply_z1(g, partials(g, f.v));
    Eigen::ArrayXcd f11 = apply_z1(g, partials(g, f1));
    return {f.grid, (-2.0 * lambda.v).exp() * (f11 - 4.0 * g1 * f1)};
}

ScalarField reeb_derivative(const ScalarField& lambda, const ScalarField& f) {
    require_same_grid(lambda.grid, f.grid, "reeb_derivative");
    require_finite(lambda.v, "reeb_derivative");
    require_finite(f.v, "reeb_derivative");
    const HopfGrid& g = *f.grid;
    Eigen::ArrayXcd g1 = apply_z1(g, partials(g, lambda.v));
    PartialsR pf = partials(g, f.v);
    Eigen::ArrayXcd f1 = apply_z1(g, pf);
    Eigen::ArrayXcd f1b = apply_z1bar(g, pf);
    Eigen::ArrayXcd f11bar = apply_z1bar(g, partials(g, f1)) + 2.0 * g1.conjugate() * f1;
    Eigen::ArrayXcd f1bar1 = apply_z1(g, partials(g, f1b)) + 2.0 * g1 * f1b;
    Eigen::ArrayXd em2l = (-2.0 * lambda.v).exp();
    Eigen::ArrayXcd f0 = -kI * em2l * (f11bar - f1bar1);
    const double residue = f0.imag().abs().maxCoeff();
    const double scale = std::max(f.v.abs().maxCoeff(), 1e-300);
    if (residue > 1e-8 * scale)
        throw NumericalConsistencyError("reeb_derivative: imaginary residue " +
                                        std::to_string(residue) + " above tolerance");
    return {f.grid, f0.real()};
}

namespace {

// Everything needed for Q11 given lambda derivatives and W, A11 arrays.
Eigen::ArrayXcd cartan_from(const HopfGrid& g, const Eigen::ArrayXd& lam,
                            const LambdaDerivs& d, const Eigen::ArrayXd& W,
                            const Eigen::ArrayXcd& A11, Eigen::ArrayXcd* W11_out,
                            Eigen::ArrayXd* lapW_out, Eigen::ArrayXd* W0_out,
                            Eigen::ArrayXcd* W1_out) {
    Eigen::ArrayXd eml = (-lam).exp();

    PartialsR pW = partials(g, W);
    Eigen::ArrayXcd gW = apply_z1(g, pW);
    PartialsC pgW = partials(g, gW);
    Eigen::ArrayXcd W11 = d.em2l * (apply_z1(g, pgW) - 4.0 * d.g1 * gW);
    Eigen::ArrayXcd F = d.em2l * (apply_z1bar(g, pgW) + 2.0 * d.g1.conjugate() * gW);
    if (W11_out) *W11_out = W11;
    if (lapW_out) *lapW_out = 2.0 * F.real();
    if (W0_out) *W0_out = 2.0 * F.imag();
    if (W1_out) *W1_out = eml * gW;

    PartialsC pA = partials(g, A11);
    Eigen::ArrayXcd z1A = apply_z1(g, pA);
    Eigen::ArrayXcd z1bA = apply_z1bar(g, pA);
    Eigen::ArrayXcd tA = apply_t(g, pA);

    Eigen::ArrayXcd A1bar = eml * (z1bA + 6.0 * d.g1.conjugate() * A11);
    PartialsC pA1b = partials(g, A1bar);
    Eigen::ArrayXcd A1bar1 = eml * (apply_z1(g, pA1b) - 3.0 * d.g1 * A1bar);

    Eigen::ArrayXcd tA_flow =
        d.em2l * (tA - 2.0 * kI * d.g1.conjugate() * z1A + 2.0 * kI * d.g1 * z1bA);
    Eigen::ArrayXcd omegaT = kI * d.em2l * (d.lap_hat - 4.0 * d.g1.abs2() - 1.0);
    Eigen::ArrayXcd A0 = tA_flow - 2.0 * omegaT * A11;

    return W11 / 6.0 + 0.5 * kI * W * A11 - A0 - (2.0 / 3.0) * kI * A1bar1;
}

}  // namespace

ComplexField cartan_Q11(const ScalarField& lambda) {
    require_finite(lambda.v, "cartan_Q11");
    const HopfGrid& g = *lambda.grid;
    LambdaDerivs d = lambda_derivs(g, lambda.v);
    Eigen::ArrayXd W = webster_from(d);
    Eigen::ArrayXcd A11 = torsion_from(d);
    return {lambda.grid,
            cartan_from(g, lambda.v, d, W, A11, nullptr, nullptr, nullptr, nullptr)};
}

PseudohermitianState PseudohermitianState::make(GridPtr g, ScalarField lambda, double t) {
    require_finite(lambda.v, "PseudohermitianState");
    PseudohermitianState s;
    s.grid = g;
    s.lambda = std::move(lambda);
    s.t = t;
    const HopfGrid& gr = *g;
    LambdaDerivs d = lambda_derivs(gr, s.lambda.v);
    s.em2l = d.em2l;
    s.e2l = d.em2l.inverse();
    s.lam1 = d.g1;
    s.W = webster_from(d);
    s.A11 = torsion_from(d);
    s.Q11 = cartan_from(gr, s.lambda.v, d, s.W, s.A11, &s.W11, &s.lapW, &s.W0, &s.W1);
    s.min_W = s.W.minCoeff();
    s.max_W = s.W.maxCoeff();
    return s;
}

DiagnosticsRecord state_diagnostics(const PseudohermitianState& s) {
    DiagnosticsRecord r;
    r.max_A11 = s.A11.abs().maxCoeff();
    r.max_W0 = s.W0.abs().maxCoeff();
    r.max_W11 = s.W11.abs().maxCoeff();
    r.max_Q11 = s.Q11.abs().maxCoeff();
    return r;
}

}  // namespace crflow
