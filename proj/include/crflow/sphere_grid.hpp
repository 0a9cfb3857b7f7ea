#pragma once

// Charts, grids, and the standard pseudohermitian frame on the unit 3-sphere
// S^3 = { (z1, z2) in C^2 : |z1|^2 + |z2|^2 = 1 }.
//
// Conventions fixed here and used throughout:
//   * contact form      theta = i(sigma - conj(sigma)),  sigma = z1 d(conj z1) + z2 d(conj z2),
//     normalized so that theta(T) = 1 for the Reeb field T below;
//   * CR frame          Z1 = (1/sqrt2)(conj(z1) d/dz2 - conj(z2) d/dz1);
//   * Reeb field        T  = (1/2)(d/dxi1 + d/dxi2) in Hopf coordinates,
//     i.e. the velocity (i z1/2, i z2/2) in C^2;
//   * Hopf coordinates  z1 = cos(eta) e^{i xi1}, z2 = sin(eta) e^{i xi2},
//     eta in (0, pi/2), xi1, xi2 in [0, 2pi);
//   * volume form       |theta ^ dtheta| = 4 sin(2 eta) deta dxi1 dxi2,
//     total volume 16 pi^2 (the constant is an artifact convention; the
//     quadrature weights below integrate it exactly per eta-cell).
//
// The grid is cell-centered in eta so no node sits on the two degenerate
// circles eta in {0, pi/2}; functions of (z, conj z) extend across those
// circles by the exact parity identities
//     f(-eta, xi1, xi2)        = f(eta, xi1, xi2 + pi),
//     f(pi/2 + d, xi1, xi2)    = f(pi/2 - d, xi1 + pi, xi2),
// which the eta-difference stencils use to fill ghost layers.

#include <memory>

#include <Eigen/Dense>

#include "crflow/types.hpp"

namespace crflow {

struct SpherePoint {
    cplx z1{1.0, 0.0};
    cplx z2{0.0, 0.0};

    SpherePoint() = default;
    SpherePoint(cplx a, cplx b);  // validates the sphere constraint

    // Radial projection of a nonzero point of C^2 onto S^3.
    static SpherePoint project(cplx a, cplx b);

    double eta() const;  // in [0, pi/2]
    double xi1() const;  // in [0, 2pi)
    double xi2() const;  // in [0, 2pi)
};

// Coordinate coefficients of the frame at a point, as complex vectors in the
// (d/dz1, d/dz2) components.  Z1bar is the conjugate vector field of Z1; as a
// real-coefficient object it is determined by Z1 and is not stored separately.
struct FrameCoefficients {
    cplx z1_dz1, z1_dz2;  // Z1 = z1_dz1 d/dz1 + z1_dz2 d/dz2
    cplx t_dz1, t_dz2;    // T as a curve velocity in C^2: (dz1/dt, dz2/dt)
};

FrameCoefficients frame_at(const SpherePoint& p);

// Value of theta on a real tangent vector given as a C^2 velocity (v1, v2).
double theta_of(const SpherePoint& p, cplx v1, cplx v2);

struct HopfGrid {
    int n_eta = 0, n_xi1 = 0, n_xi2 = 0;
    double h_eta = 0, h_xi1 = 0, h_xi2 = 0;

    Eigen::ArrayXd eta;  // ring coordinates, cell-centered: (k + 1/2) * h_eta
    Eigen::ArrayXd xi1;  // i * h_xi1
    Eigen::ArrayXd xi2;  // j * h_xi2

    // Per-node arrays, node index (k * n_xi1 + i) * n_xi2 + j.
    Eigen::ArrayXd node_eta, node_xi1, node_xi2;
    Eigen::ArrayXcd z1, z2;
    Eigen::ArrayXd weight;             // quadrature weights, sum = 16 pi^2
    Eigen::ArrayXd tan_eta, cot_eta;   // per node (constant on rings)
    Eigen::ArrayXcd phase_neg;         // e^{-i(xi1+xi2)}; phase of Z1
    Eigen::ArrayXd phase_cos, phase_sin;  // cos/sin of (xi1 + xi2)
    Eigen::MatrixXd d_xi1, d_xi2;      // Fourier differentiation matrices

    // Slab-index permutations implementing the parity ghost fill:
    // perm_bottom shifts xi2 by pi, perm_top shifts xi1 by pi.
    Eigen::ArrayXi perm_bottom, perm_top;

    int n_slab() const { return n_xi1 * n_xi2; }
    long n_nodes() const { return static_cast<long>(n_eta) * n_slab(); }
    long index(int k, int i, int j) const {
        return (static_cast<long>(k) * n_xi1 + i) * n_xi2 + j;
    }
    SpherePoint point(long node) const {
        return SpherePoint(z1[node], z2[node]);
    }
};

// Builds the grid; all counts must be >= 4 and the xi counts even (the
// spectral differentiation matrices and the parity ghost fill require it).
std::shared_ptr<const HopfGrid> build_grid(int n_eta, int n_xi1, int n_xi2);

}  // namespace crflow
