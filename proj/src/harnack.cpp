#include "crflow/harnack.hpp"

#include <random>

namespace crflow {

namespace {

// The eta-independent part, shared between Z and Y so that their difference
// reduces to the completed square up to a single rounding of the sum.
Eigen::ArrayXd harnack_base(const PseudohermitianState& s, double t) {
    if (!(t > 0)) throw UsageError("harnack: t must be positive");
    return 2.0 * s.lapW + s.W.square() + s.W / t;
}

void require_positive_W(const PseudohermitianState& s, const char* where) {
    if (!(s.min_W > 0))
        throw HypothesisError(std::string(where) + ": min W = " + std::to_string(s.min_W) +
                              " violates the positivity hypothesis");
}

}  // namespace

LegendrianField random_legendrian(const GridPtr& g, std::uint32_t seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::ArrayXcd v(g->n_nodes());
    for (long n = 0; n < g->n_nodes(); ++n) {
        const double re = u(rng), im = u(rng);
        v[n] = cplx(re, im);
    }
    return {ComplexField{g, std::move(v)}};
}

ScalarField harnack_Z(const PseudohermitianState& s, const LegendrianField& eta, double t) {
    require_same_grid(s.grid, eta.eta1.grid, "harnack_Z");
    // <grad_b W, eta> = 2 Re(W_{,1} conj(eta_1)); |eta|^2 = 2 |eta_1|^2.
    Eigen::ArrayXd quad = 2.0 * (s.W1 * eta.eta1.v.conjugate()).real() +
                          0.25 * s.W * eta.eta1.v.abs2();
    return {s.grid, harnack_base(s, t) + quad};
}

ScalarField harnack_Y(const PseudohermitianState& s, double t) {
    require_positive_W(s, "harnack_Y");
    return {s.grid, harnack_base(s, t) - 4.0 * s.W1.abs2() / s.W};
}

LegendrianField optimal_eta(const PseudohermitianState& s) {
    require_positive_W(s, "optimal_eta");
    return {ComplexField{s.grid, -4.0 * s.W1 / s.W}};
}

std::vector<HarnackMonitorRow> harnack_monitor(const RunResult& r, double t_start,
                                               int first, int last) {
    if (last < 0) last = static_cast<int>(r.snapshots.size()) - 1;
    if (first < 0 || last >= static_cast<int>(r.snapshots.size()) || last - first < 2)
        throw UsageError("harnack_monitor: need a window of >= 3 snapshots");
    const double dt = r.snapshots[first + 1].t - r.snapshots[first].t;
    for (int s = first; s < last; ++s)
        if (std::abs(r.snapshots[s + 1].t - r.snapshots[s].t - dt) > 1e-9 * std::max(1.0, dt))
            throw UsageError("harnack_monitor: snapshot window is not uniformly spaced");

    std::vector<PseudohermitianState> states;
    states.reserve(last - first + 1);
    for (int s = first; s <= last; ++s)
        states.push_back(PseudohermitianState::make(
            r.grid, ScalarField{r.grid, r.snapshots[s].lambda}, r.snapshots[s].t));

    std::vector<HarnackMonitorRow> rows;
    for (std::size_t s = 1; s + 1 < states.size(); ++s) {
        const PseudohermitianState& st = states[s];
        if (st.t < t_start - 1e-12) continue;
        require_positive_W(st, "harnack_monitor");
        HarnackMonitorRow row{};
        row.t = st.t;
        Eigen::ArrayXd y = harnack_Y(st, st.t).v;
        row.min_Y = y.minCoeff(&row.argmin_node);
        Eigen::ArrayXd wdot = (states[s + 1].W - states[s - 1].W) / (2.0 * dt);
        row.min_diff_residual =
            (wdot + 2.0 * st.W / st.t - 8.0 * st.W1.abs2() / st.W).minCoeff();
        rows.push_back(row);
    }
    return rows;
}

}  // namespace crflow
