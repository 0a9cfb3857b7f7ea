#pragma once

// Horizontal (Legendrian) paths on S^3 driven by controls in the hatted
// orthonormal horizontal frame
//     e1 = (Z1 + Z1bar)/sqrt2,   e2 = i (Z1 - Z1bar)/sqrt2,
// which as C^2 velocities read e1 = (-conj(z2), conj(z1))/2 and e2 = i e1.
// A control pair (u1, u2) therefore drives dz/dt = (w/2)(-conj(z2), conj(z1))
// with w = u1 + i u2, the hatted Levi speed is |gamma'|^2 = u1^2 + u2^2, and
// theta_hat(gamma') = 0 identically.  The flowed action of such a path is
//     action = integral of e^{2 lambda(gamma(t), t)} (u1^2 + u2^2) dt.

#include <cstdint>

#include "crflow/flow.hpp"

namespace crflow {

// The frame vectors at a point, as C^2 velocities.
struct HorizontalFrame {
    cplx e1_z1, e1_z2, e2_z1, e2_z2;
};
HorizontalFrame horizontal_frame(const SpherePoint& p);

struct LegendrianPath {
    double t1 = 0, t2 = 0;
    Eigen::ArrayXd u1, u2;           // piecewise-constant controls, one per segment
    int substeps = 4;                // integration substeps per segment
    std::vector<SpherePoint> fine;   // n_segments * substeps + 1 points
    std::vector<double> fine_t;      // matching times
    double defect = 0.0;             // chordal distance of fine.back() to the target

    int n_segments() const { return static_cast<int>(u1.size()); }
    const SpherePoint& start() const { return fine.front(); }
    const SpherePoint& end() const { return fine.back(); }
};

// Integrates the control system with classical RK4 plus per-substep radial
// renormalization to S^3.  Requires t2 > t1 and >= 2 segments.
LegendrianPath integrate_path(const SpherePoint& x1, const Eigen::ArrayXd& u1,
                              const Eigen::ArrayXd& u2, double t1, double t2, int substeps = 4);

// Trapezoidal quadrature of e^{2 lambda} (u1^2 + u2^2) along the path, with
// lambda from the run interpolator.  UsageError if [t1, t2] is not covered.
double action(const LegendrianPath& path, const FlowFieldInterpolator& lam);

struct MinimizeResult {
    double L_hat = 0.0;
    LegendrianPath path;
    bool feasible = false;   // endpoint defect <= tolerance
    double best_defect = 0.0;
};

// Direct transcription over piecewise-constant controls: quadratic endpoint
// penalty with a geometric schedule (mu = 10, x10 per round, <= 6 rounds,
// target defect 1e-6), BFGS with finite-difference gradients per round, and
// multi-start over a stationary seed, two-arc constant-control seeds, and
// random control vectors.  Returns the best feasible candidate; if none is
// feasible, feasible = false and best_defect reports the closest miss.
MinimizeResult minimize_action(const SpherePoint& x1, double t1, const SpherePoint& x2, double t2,
                               const FlowFieldInterpolator& lam, int n_segments = 12,
                               std::uint32_t seed = 1);

struct HarnackCheck {
    double lhs = 0.0;    // W(x2, t2) / W(x1, t1)
    double rhs = 0.0;    // (t2/t1)^{-2} exp(-L_hat / 16)
    double L_hat = 0.0;
    double defect = 0.0;
    bool pass = false;
};

// Integrated Harnack inequality W(x2,t2)/W(x1,t1) >= (t2/t1)^{-2} e^{-L/16},
// checked with the computed upper bound L_hat >= L (which only weakens the
// right side, so a pass is a valid necessary check).  Degenerate t1 = t2 is
// accepted only for coincident endpoints.  HypothesisError if W(x1, t1) is
// not positive.
HarnackCheck integrated_harnack_check(const SpherePoint& x1, double t1, const SpherePoint& x2, double t2,
                             const FlowFieldInterpolator& lam, int n_segments = 12,
                             std::uint32_t seed = 1);

}  // namespace crflow
