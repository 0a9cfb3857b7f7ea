#pragma once

// The Harnack quantity
//     Z(theta, eta) = 2 Delta_b W + W^2 + W/t + <grad_b W, eta> + (1/8) W |eta|^2
// for a Legendrian field eta, its exact eta-minimum
//     Y(theta) = 2 Delta_b W + W^2 + W/t - 2 W^{-1} |grad_b W|^2
// (a convex quadratic in eta for W > 0, minimized at eta = -4 W^{-1} grad_b W),
// and the differential Harnack monitor
//     dW/dt + 2 W/t - 4 W^{-1} |grad_b W|^2  >=  0.
// All inner products and norms are Levi-form quantities of the flowed
// structure: <grad_b W, eta> = W_{,1} eta_1bar + W_{,1bar} eta_1 and
// |V|^2 = 2 |v_1|^2 for a Legendrian V = v_1 Z_1 + v_1bar Z_1bar.

#include "crflow/flow.hpp"

namespace crflow {

// A real Legendrian vector field, stored via its flowed-frame component eta_1
// (the conjugate component is eta_1bar = conj(eta_1) by definition).
struct LegendrianField {
    ComplexField eta1;
};

// Reproducible random Legendrian field with components of order one.
LegendrianField random_legendrian(const GridPtr& g, std::uint32_t seed);

ScalarField harnack_Z(const PseudohermitianState& s, const LegendrianField& eta, double t);
ScalarField harnack_Y(const PseudohermitianState& s, double t);
LegendrianField optimal_eta(const PseudohermitianState& s);

// Per-snapshot Harnack monitor rows over the uniform window
// [first, last] of r.snapshots: min_Y at each interior snapshot with t >=
// t_start, plus the minimum of the differential Harnack left side (time
// derivative by central differences).  Needs >= 3 uniformly spaced snapshots.
struct HarnackMonitorRow {
    double t;
    double min_Y;
    long argmin_node;
    double min_diff_residual;
};
std::vector<HarnackMonitorRow> harnack_monitor(const RunResult& r, double t_start,
                                               int first = 0, int last = -1);

}  // namespace crflow
