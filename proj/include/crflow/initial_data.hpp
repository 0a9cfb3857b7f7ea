#pragma once

// Explicit torsion-free initial data lambda = -ln|a z1 + b z2 + c| for the
// Yamabe flow on the CR sphere, its closed-form curvature oracle, and an exact
// polynomial differentiation oracle used to validate the discrete calculus.

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "crflow/fields.hpp"
#include "crflow/frame_ops.hpp"

namespace crflow {

// Parameters of the conformal factor e^{-2 lambda} = |a z1 + b z2 + c|^2.
// The admissibility bound |c| > sqrt(|a|^2 + |b|^2) guarantees the argument of
// the logarithm never vanishes on S^3.
struct Section5Params {
    cplx a{0.0}, b{0.0}, c{1.0};

    void validate() const;
};

ScalarField section5_lambda(const Section5Params& p, const GridPtr& g);

// Closed-form Tanaka-Webster curvature of e^{2 lambda} theta_hat for the data
// above.  Written in the pointwise form
//     W = |u|^2 - 2 Re((u - c) conj(u)) - |b conj(z1) - a conj(z2)|^2,
// with u = a z1 + b z2 + c; algebraically this collapses to the constant
// |c|^2 - |a|^2 - |b|^2 on S^3 (the cross terms of the two squared moduli
// cancel and |z1|^2 + |z2|^2 = 1).
ScalarField section5_W_oracle(const Section5Params& p, const GridPtr& g);

// Closed-form first and second frame derivatives of lambda: with
// u = a z1 + b z2 + c and v = b conj(z1) - a conj(z2),
//     lambda_{,1}  = -v / (2 sqrt2 u),      lambda_{,11} = v^2 / (4 u^2),
// which satisfy the torsion-free identity lambda_{,11} = 2 (lambda_{,1})^2
// exactly.
cplx section5_lambda1(const Section5Params& p, const SpherePoint& x);
cplx section5_lambda11(const Section5Params& p, const SpherePoint& x);

struct TorsionFreeReport {
    double max_identity_residual;  // max |lambda_{,11} - 2 lambda_{,1}^2| (discrete)
    double max_torsion;            // max |A_11| (discrete)
    double max_exact_residual;     // same identity from the closed forms, sampled
};
TorsionFreeReport verify_torsion_free(const Section5Params& p, const GridPtr& g);

// ---------------------------------------------------------------------------
// Exact polynomial oracle.
//
// A PolyField is a polynomial in z1, z2, conj(z1), conj(z2) together with an
// overall factor 2^{-sqrt2_pow/2}; the frame operators produce one factor of
// 1/sqrt2 (Z1, Z1bar) or 1/2 (T) per application, and tracking that power
// symbolically keeps the frame identities exact.

struct Monomial {
    std::int16_t a1, a2, b1, b2;  // z1^a1 z2^a2 conj(z1)^b1 conj(z2)^b2
    auto operator<=>(const Monomial&) const = default;
};

struct PolyField {
    int sqrt2_pow = 0;
    std::map<Monomial, cplx> terms;

    static PolyField constant(cplx c);
    static PolyField monomial(int a1, int a2, int b1, int b2, cplx coeff = 1.0);

    PolyField& add_term(const Monomial& m, cplx coeff);
    PolyField conjugate() const;
    cplx eval(const SpherePoint& x) const;
    int degree() const;
};

PolyField operator+(const PolyField& p, const PolyField& q);
PolyField operator-(const PolyField& p, const PolyField& q);
PolyField operator*(const PolyField& p, const PolyField& q);
PolyField operator*(cplx c, const PolyField& p);

// Exact frame derivative: Z1 acts as the derivation conj(z1) d/dz2 - conj(z2) d/dz1
// (with the 1/sqrt2 tracked in sqrt2_pow), Z1bar as its conjugate, and T scales
// each monomial by (i/2)(a1 + a2 - b1 - b2).
PolyField poly_frame_derivative(const PolyField& f, Dir d);

ComplexField sample_poly(const PolyField& f, const GridPtr& g);

// Reproducible random real polynomial of total degree <= max_degree (<= 4),
// returned both exactly and node-sampled.
std::pair<ScalarField, PolyField> random_smooth_field(const GridPtr& g, std::uint32_t seed,
                                                      int max_degree);

}  // namespace crflow
