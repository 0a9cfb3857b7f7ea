#pragma once

// Node-indexed fields over a HopfGrid.  Fields are thin value types: a shared
// handle to the (immutable) grid plus a dense Eigen array of node values, so
// all arithmetic stays expression-friendly at the array level.

#include <functional>
#include <memory>
#include <utility>

#include <Eigen/Dense>

#include "crflow/sphere_grid.hpp"
#include "crflow/types.hpp"

namespace crflow {

using GridPtr = std::shared_ptr<const HopfGrid>;

struct ScalarField {
    GridPtr grid;
    Eigen::ArrayXd v;

    ScalarField() = default;
    ScalarField(GridPtr g, Eigen::ArrayXd values) : grid(std::move(g)), v(std::move(values)) {}
    explicit ScalarField(GridPtr g) : grid(std::move(g)), v(Eigen::ArrayXd::Zero(grid->n_nodes())) {}
};

struct ComplexField {
    GridPtr grid;
    Eigen::ArrayXcd v;

    ComplexField() = default;
    ComplexField(GridPtr g, Eigen::ArrayXcd values) : grid(std::move(g)), v(std::move(values)) {}
    explicit ComplexField(GridPtr g) : grid(std::move(g)), v(Eigen::ArrayXcd::Zero(grid->n_nodes())) {}
};

inline ScalarField sample(const GridPtr& g, const std::function<double(const SpherePoint&)>& f) {
    Eigen::ArrayXd v(g->n_nodes());
    for (long n = 0; n < g->n_nodes(); ++n) v[n] = f(g->point(n));
    return {g, std::move(v)};
}

inline ComplexField sample_complex(const GridPtr& g,
                                   const std::function<cplx(const SpherePoint&)>& f) {
    Eigen::ArrayXcd v(g->n_nodes());
    for (long n = 0; n < g->n_nodes(); ++n) v[n] = f(g->point(n));
    return {g, std::move(v)};
}

inline void require_same_grid(const GridPtr& a, const GridPtr& b, const char* where) {
    if (a.get() != b.get())
        throw UsageError(std::string(where) + ": fields live on different grids");
}

inline void require_finite(const Eigen::ArrayXd& v, const char* where) {
    if (!v.isFinite().all()) throw DataError(std::string(where) + ": non-finite field values");
}

inline void require_finite(const Eigen::ArrayXcd& v, const char* where) {
    if (!(v.real().isFinite().all() && v.imag().isFinite().all()))
        throw DataError(std::string(where) + ": non-finite field values");
}

// Integral over S^3 with respect to the fixed volume form |theta ^ dtheta|.
inline double integrate(const ScalarField& f) { return (f.grid->weight * f.v).sum(); }

}  // namespace crflow
