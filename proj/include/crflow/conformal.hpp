#pragma once

// Conformal-change machinery: from the conformal factor lambda of
// theta = e^{2 lambda} theta_hat compute the Tanaka-Webster curvature W, the
// pseudohermitian torsion A_11, and operators/diagnostics in the flowed frame
// Z1 = e^{-lambda} Z1_hat.
//
// All flowed-frame quantities are obtained by transforming hatted-frame
// derivatives; no flowed discrete frame is ever built.  With g1 = Z1hat lambda
// the transformation laws used are (all right-hand derivatives hatted):
//     W          = e^{-2 lambda} (1 - 4 Delta_b lambda - 8 |g1|^2)
//     A_11       = e^{-2 lambda} (2i lambda_{,11} - 4i g1^2)
//     f_{,1}     = e^{-lambda}   f_{,1hat}
//     f_{,11}    = e^{-2 lambda} (f_{,1hat 1hat} - 4 g1 f_{,1hat})
//     f_{,1 1bar}= e^{-2 lambda} (f_{,1hat 1hatbar} + 2 conj(g1) f_{,1hat})
//     f_{,1bar 1}= e^{-2 lambda} (f_{,1hatbar 1hat} + 2 g1 f_{,1hatbar})
//     Delta_b f  = e^{-2 lambda} (Delta_bhat f + 2 <grad_hat lambda, grad_hat f>)
//     f_{,0}     = -i (f_{,1 1bar} - f_{,1bar 1})
// together with the connection values on the flowed frame
//     omega(Z1) = 3 e^{-lambda} g1,  omega(Z1bar) = -3 e^{-lambda} conj(g1),
//     omega(T)  = i e^{-2 lambda} (Delta_bhat lambda - 4 |g1|^2 - 1),
//     T = e^{-2 lambda} (T_hat - 2i conj(g1) Z1hat + 2i g1 Z1hatbar).

#include "crflow/fields.hpp"
#include "crflow/frame_ops.hpp"

namespace crflow {

ScalarField webster_curvature(const ScalarField& lambda);
ComplexField torsion(const ScalarField& lambda);
ScalarField flowed_sublaplacian(const ScalarField& lambda, const ScalarField& f);
ComplexField flowed_hessian11(const ScalarField& lambda, const ScalarField& f);
ScalarField reeb_derivative(const ScalarField& lambda, const ScalarField& f);

// Cartan tensor Q_11 = W_{,11}/6 + (i/2) W A_11 - A_{11,0} - (2i/3) A_{11,1bar 1},
// with the tensor covariant derivatives of A_11 taken in the flowed frame via
// the closed-form connection values above.  Zero exactly when the structure is
// spherical, so it is a pure discretization diagnostic here.
ComplexField cartan_Q11(const ScalarField& lambda);

// Conformal factor, flow time, and all cached derived fields used by the flow
// loop and the Harnack monitors.  Immutable once built; caches are rebuilt
// from scratch by make() so they can never go stale.
struct PseudohermitianState {
    GridPtr grid;
    ScalarField lambda;
    double t = 0.0;

    Eigen::ArrayXd em2l, e2l;   // e^{-2 lambda}, e^{+2 lambda}
    Eigen::ArrayXcd lam1;       // Z1hat lambda
    Eigen::ArrayXd W;           // Tanaka-Webster curvature
    Eigen::ArrayXcd W1;         // flowed W_{,1}
    Eigen::ArrayXd lapW;        // flowed Delta_b W
    Eigen::ArrayXcd W11;        // flowed W_{,11}
    Eigen::ArrayXd W0;          // flowed W_{,0}
    Eigen::ArrayXcd A11;        // torsion
    Eigen::ArrayXcd Q11;        // Cartan tensor diagnostic
    double min_W = 0.0, max_W = 0.0;

    static PseudohermitianState make(GridPtr g, ScalarField lambda, double t);
};

// The curvature field alone, on raw arrays; the cheap path used inside
// Runge-Kutta stages.
Eigen::ArrayXd webster_W_array(const HopfGrid& g, const Eigen::ArrayXd& lambda);

struct DiagnosticsRecord {
    double max_A11 = 0, max_W0 = 0, max_W11 = 0, max_Q11 = 0;
    double res_2_7 = 0, res_2_8 = 0, res_2_12 = 0;
    double imag_residue = 0;
};

DiagnosticsRecord state_diagnostics(const PseudohermitianState& s);

}  // namespace crflow
