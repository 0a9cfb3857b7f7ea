#include "crflow/frame_ops.hpp"

#include <cmath>

namespace crflow {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapRowMat = Eigen::Map<RowMat>;
using ConstMapRowMat = Eigen::Map<const RowMat>;

// 8th-order centered first-derivative coefficients.
constexpr double kC1 = 4.0 / 5.0, kC2 = -1.0 / 5.0, kC3 = 4.0 / 105.0, kC4 = -1.0 / 280.0;

// d/deta with parity ghost layers: 4 rows below eta = 0 (xi2 shifted by pi)
// and 4 rows above eta = pi/2 (xi1 shifted by pi).
Eigen::ArrayXd d_eta(const HopfGrid& g, const Eigen::ArrayXd& f) {
    const int ne = g.n_eta, s = g.n_slab();
    thread_local RowMat ext;
    ext.resize(ne + 8, s);
    ext.middleRows(4, ne) = ConstMapRowMat(f.data(), ne, s);
    for (int gl = 0; gl < 4; ++gl) {
        const double* src_b = f.data() + static_cast<long>(gl) * s;
        const double* src_t = f.data() + static_cast<long>(ne - 1 - gl) * s;
        double* dst_b = ext.row(3 - gl).data();
        double* dst_t = ext.row(ne + 4 + gl).data();
        for (int j = 0; j < s; ++j) {
            dst_b[j] = src_b[g.perm_bottom[j]];
            dst_t[j] = src_t[g.perm_top[j]];
        }
    }
    Eigen::ArrayXd out(f.size());
    MapRowMat o(out.data(), ne, s);
    const double inv_h = 1.0 / g.h_eta;
    for (int k = 0; k < ne; ++k) {
        const int c = k + 4;  // center row in ext
        o.row(k) = inv_h * (kC1 * (ext.row(c + 1) - ext.row(c - 1)) +
                            kC2 * (ext.row(c + 2) - ext.row(c - 2)) +
                            kC3 * (ext.row(c + 3) - ext.row(c - 3)) +
                            kC4 * (ext.row(c + 4) - ext.row(c - 4)));
    }
    return out;
}

void d_xi(const HopfGrid& g, const Eigen::ArrayXd& f, Eigen::ArrayXd& d1, Eigen::ArrayXd& d2) {
    const int s = g.n_slab();
    d1.resize(f.size());
    d2.resize(f.size());
    for (int k = 0; k < g.n_eta; ++k) {
        ConstMapRowMat slab(f.data() + static_cast<long>(k) * s, g.n_xi1, g.n_xi2);
        MapRowMat o1(d1.data() + static_cast<long>(k) * s, g.n_xi1, g.n_xi2);
        o1.noalias() = g.d_xi1 * slab;
    }
    ConstMapRowMat rows(f.data(), g.n_eta * g.n_xi1, g.n_xi2);
    MapRowMat o2(d2.data(), g.n_eta * g.n_xi1, g.n_xi2);
    o2.noalias() = rows * g.d_xi2.transpose();
}

double imag_residue_store = 0.0;

}  // namespace

PartialsR partials(const HopfGrid& g, const Eigen::ArrayXd& f) {
    PartialsR p;
    p.e = d_eta(g, f);
    d_xi(g, f, p.x1, p.x2);
    return p;
}

PartialsC partials(const HopfGrid& g, const Eigen::ArrayXcd& f) {
    PartialsR re = partials(g, Eigen::ArrayXd(f.real()));
    PartialsR im = partials(g, Eigen::ArrayXd(f.imag()));
    PartialsC p;
    p.e = re.e + kI * im.e;
    p.x1 = re.x1 + kI * im.x1;
    p.x2 = re.x2 + kI * im.x2;
    return p;
}

namespace {

const double kInv2Sqrt2 = 1.0 / (2.0 * std::sqrt(2.0));

template <typename P>
Eigen::ArrayXcd z1_impl(const HopfGrid& g, const P& p) {
    return g.phase_neg * (kInv2Sqrt2 * (p.e + kI * (g.tan_eta * p.x1) - kI * (g.cot_eta * p.x2)));
}

template <typename P>
Eigen::ArrayXcd z1bar_impl(const HopfGrid& g, const P& p) {
    return g.phase_neg.conjugate() *
           (kInv2Sqrt2 * (p.e - kI * (g.tan_eta * p.x1) + kI * (g.cot_eta * p.x2)));
}

}  // namespace

Eigen::ArrayXcd apply_z1(const HopfGrid& g, const PartialsR& p) { return z1_impl(g, p); }
Eigen::ArrayXcd apply_z1(const HopfGrid& g, const PartialsC& p) { return z1_impl(g, p); }
Eigen::ArrayXcd apply_z1bar(const HopfGrid& g, const PartialsR& p) { return z1bar_impl(g, p); }
Eigen::ArrayXcd apply_z1bar(const HopfGrid& g, const PartialsC& p) { return z1bar_impl(g, p); }
Eigen::ArrayXcd apply_t(const HopfGrid&, const PartialsR& p) {
    return (0.5 * (p.x1 + p.x2)).cast<cplx>();
}
Eigen::ArrayXcd apply_t(const HopfGrid&, const PartialsC& p) { return 0.5 * (p.x1 + p.x2); }

ComplexField frame_derivative(const ScalarField& f, Dir d) {
    require_finite(f.v, "frame_derivative");
    PartialsR p = partials(*f.grid, f.v);
    switch (d) {
        case Dir::Z1: return {f.grid, apply_z1(*f.grid, p)};
        case Dir::Z1bar: return {f.grid, apply_z1bar(*f.grid, p)};
        default: return {f.grid, apply_t(*f.grid, p)};
    }
}

ComplexField frame_derivative(const ComplexField& f, Dir d) {
    require_finite(f.v, "frame_derivative");
    PartialsC p = partials(*f.grid, f.v);
    switch (d) {
        case Dir::Z1: return {f.grid, apply_z1(*f.grid, p)};
        case Dir::Z1bar: return {f.grid, apply_z1bar(*f.grid, p)};
        default: return {f.grid, apply_t(*f.grid, p)};
    }
}

SecondDerivs covariant_second(const ScalarField& f) {
    require_finite(f.v, "covariant_second");
    const HopfGrid& g = *f.grid;
    PartialsR p0 = partials(g, f.v);
    Eigen::ArrayXcd f1 = apply_z1(g, p0);
    Eigen::ArrayXcd f1bar = apply_z1bar(g, p0);
    PartialsC p1 = partials(g, f1);
    PartialsC p1b = partials(g, f1bar);
    SecondDerivs out;
    out.f11 = {f.grid, apply_z1(g, p1)};
    out.f11bar = {f.grid, apply_z1bar(g, p1)};
    out.f1bar1 = {f.grid, apply_z1(g, p1b)};
    return out;
}

Subgradient subgradient(const ScalarField& f) {
    require_finite(f.v, "subgradient");
    PartialsR p = partials(*f.grid, f.v);
    return {{f.grid, apply_z1bar(*f.grid, p)}, {f.grid, apply_z1(*f.grid, p)}};
}

ScalarField sublaplacian(const ScalarField& f) {
    SecondDerivs d = covariant_second(f);
    Eigen::ArrayXcd lap = d.f11bar.v + d.f1bar1.v;
    const double residue = lap.imag().abs().maxCoeff();
    imag_residue_store = residue;
    const double scale = f.v.abs().maxCoeff();
    if (residue > 1e-8 * std::max(scale, 1e-300))
        throw NumericalConsistencyError(
            "sublaplacian: imaginary residue " + std::to_string(residue) +
            " exceeds 1e-8 * max|f| = " + std::to_string(1e-8 * scale));
    return {f.grid, lap.real()};
}

double last_sublaplacian_imag_residue() { return imag_residue_store; }

ScalarField levi_inner(const ComplexField& u1, const ComplexField& u1bar,
                       const ComplexField& v1, const ComplexField& v1bar,
                       const ScalarField& lambda) {
    require_same_grid(u1.grid, v1.grid, "levi_inner");
    require_same_grid(u1.grid, u1bar.grid, "levi_inner");
    require_same_grid(u1.grid, v1bar.grid, "levi_inner");
    require_same_grid(u1.grid, lambda.grid, "levi_inner");
    Eigen::ArrayXcd ip = u1.v * v1bar.v + u1bar.v * v1.v;
    return {u1.grid, (2.0 * lambda.v).exp() * ip.real()};
}

}  // namespace crflow
