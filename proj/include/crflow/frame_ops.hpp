#pragma once

// Discrete differential operators in the fixed (hatted) frame of the standard
// sphere: frame derivatives, covariant second derivatives, subgradient,
// sublaplacian, and the Levi inner product.
//
// Backend: Fourier (spectral) differentiation in xi1, xi2; 8th-order centered
// finite differences in eta with ghost layers filled by the exact parity
// reflections across eta = 0 and eta = pi/2 (see sphere_grid.hpp).  In Hopf
// coordinates the frame acts on functions as
//     Z1 = e^{-i(xi1+xi2)} / (2 sqrt2) *
//          [ d/deta + i tan(eta) d/dxi1 - i cot(eta) d/dxi2 ],
//     T  = (1/2)(d/dxi1 + d/dxi2),
// and Z1bar has the conjugate coefficients.  The connection form of the
// standard sphere vanishes on Z1 and Z1bar and equals -i on T, so covariant
// second derivatives of scalars are plain compositions of frame derivatives.

#include "crflow/fields.hpp"

namespace crflow {

enum class Dir { Z1, Z1bar, T };

// Raw coordinate partial derivatives (d/deta, d/dxi1, d/dxi2).
struct PartialsR {
    Eigen::ArrayXd e, x1, x2;
};
struct PartialsC {
    Eigen::ArrayXcd e, x1, x2;
};

PartialsR partials(const HopfGrid& g, const Eigen::ArrayXd& f);
PartialsC partials(const HopfGrid& g, const Eigen::ArrayXcd& f);

Eigen::ArrayXcd apply_z1(const HopfGrid& g, const PartialsR& p);
Eigen::ArrayXcd apply_z1(const HopfGrid& g, const PartialsC& p);
Eigen::ArrayXcd apply_z1bar(const HopfGrid& g, const PartialsR& p);
Eigen::ArrayXcd apply_z1bar(const HopfGrid& g, const PartialsC& p);
Eigen::ArrayXcd apply_t(const HopfGrid& g, const PartialsR& p);
Eigen::ArrayXcd apply_t(const HopfGrid& g, const PartialsC& p);

ComplexField frame_derivative(const ScalarField& f, Dir d);
ComplexField frame_derivative(const ComplexField& f, Dir d);

// Second covariant derivatives of a scalar: f_{,11}, f_{,1 1bar}, f_{,1bar 1}
// (f_{,1 1bar} = Z1bar Z1 f etc.; no connection terms for scalars in this frame).
struct SecondDerivs {
    ComplexField f11, f11bar, f1bar1;
};
SecondDerivs covariant_second(const ScalarField& f);

// Components of the subgradient grad_b f = f_{,1bar} Z1 + f_{,1} Z1bar.
struct Subgradient {
    ComplexField f1bar, f1;
};
Subgradient subgradient(const ScalarField& f);

// Delta_b f = f_{,1 1bar} + f_{,1bar 1}.  The imaginary residue of the sum is
// recorded (query last_imag_residue) and discarded; a residue above
// 1e-8 * max|f| raises NumericalConsistencyError.
ScalarField sublaplacian(const ScalarField& f);
double last_sublaplacian_imag_residue();

// Levi inner product with respect to theta = e^{2 lambda} theta_hat for
// vectors given by hatted-frame components U = u1 Z1 + u1bar Z1bar:
//     <U, V> = e^{2 lambda} (u1 v1bar + u1bar v1).
// The imaginary part (zero for genuine real vectors) is discarded.
ScalarField levi_inner(const ComplexField& u1, const ComplexField& u1bar,
                       const ComplexField& v1, const ComplexField& v1bar,
                       const ScalarField& lambda);

}  // namespace crflow
