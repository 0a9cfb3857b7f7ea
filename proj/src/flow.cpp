#include "crflow/flow.hpp"

#include <algorithm>
#include <cmath>

#include "crflow/io.hpp"

namespace crflow {

void FlowConfig::validate() const {
    if (!(t_end > 0)) throw ConfigError("FlowConfig: t_end must be positive");
    if (!(sigma > 0) || sigma > 1.0) throw ConfigError("FlowConfig: sigma must be in (0, 1]");
    if (!(w_cap > 0)) throw ConfigError("FlowConfig: w_cap must be positive");
    if (!(t_min > 0)) throw ConfigError("FlowConfig: t_min must be positive");
    if (snapshot_every < 0) throw ConfigError("FlowConfig: snapshot_every must be >= 0");
    if (!initial_params && initial_file.empty())
        throw ConfigError("FlowConfig: no initial data (need section-5 parameters or a field file)");
    if (initial_params && !initial_file.empty())
        throw ConfigError("FlowConfig: initial data given both as parameters and as a file");
    if (initial_params) initial_params->validate();
}

const char* to_string(TerminalEvent e) {
    switch (e) {
        case TerminalEvent::reached_t_end: return "reached_t_end";
        case TerminalEvent::w_cap_exceeded: return "w_cap_exceeded";
        case TerminalEvent::contraction_predicted: return "contraction_predicted";
        default: return "step_failure";
    }
}

// ---------------------------------------------------------------------------
// PolarFilter

namespace {

// Fraction of the azimuthal Nyquist range kept at the equatorial reference
// scale; smooth fields on the sphere carry at most ~sin(eta) (resp. cos(eta))
// of the mode range on polar rings, so anything above it is grid noise with a
// stiff tan/cot amplification.  Kept slightly conservative to hold the modes
// near the cutoff well inside the time-stepping stability region.
constexpr double kFilterFraction = 0.35;

// Projection onto Fourier modes |m| <= cutoff on n uniform periodic nodes.
Eigen::MatrixXd mode_projection(int n, int cutoff, double h) {
    Eigen::MatrixXd p(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double acc = 1.0;
            for (int m = 1; m <= cutoff; ++m) acc += 2.0 * std::cos(m * (i - j) * h);
            p(i, j) = acc / n;
        }
    return p;
}

}  // namespace

PolarFilter::PolarFilter(GridPtr grid, int m0) : grid_(std::move(grid)) {
    const HopfGrid& g = *grid_;
    p_xi1_.resize(g.n_eta);
    p_xi2_.resize(g.n_eta);
    for (int k = 0; k < g.n_eta; ++k) {
        const double eta = g.eta[k];
        const double beta = kFilterFraction;
        const int m1 = std::max<int>(m0, std::ceil(beta * g.n_xi1 * std::cos(eta)));
        const int m2 = std::max<int>(m0, std::ceil(beta * g.n_xi2 * std::sin(eta)));
        if (m1 < g.n_xi1 / 2) p_xi1_[k] = mode_projection(g.n_xi1, m1, g.h_xi1);
        if (m2 < g.n_xi2 / 2) p_xi2_[k] = mode_projection(g.n_xi2, m2, g.h_xi2);
    }
}

void PolarFilter::apply(Eigen::ArrayXd& f) const {
    using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const HopfGrid& g = *grid_;
    for (int k = 0; k < g.n_eta; ++k) {
        const bool f1 = p_xi1_[k].size() > 0, f2 = p_xi2_[k].size() > 0;
        if (!f1 && !f2) continue;
        Eigen::Map<RowMat> slab(f.data() + static_cast<long>(k) * g.n_slab(), g.n_xi1, g.n_xi2);
        if (f1) slab = p_xi1_[k] * slab;
        if (f2) slab = slab * p_xi2_[k];  // projections are symmetric
    }
}

// ---------------------------------------------------------------------------
// Stepping

double adaptive_dt(const PseudohermitianState& s, double sigma) {
    const HopfGrid& g = *s.grid;
    const double h = std::min({g.h_eta, g.h_xi1, g.h_xi2});
    double dt = sigma * h * h / (4.0 * s.em2l.maxCoeff());
    if (s.max_W > 0) dt = std::min(dt, 0.1 / s.max_W);
    return dt;
}

PseudohermitianState step(const PseudohermitianState& s, double dt, IntegratorKind kind,
                          const PolarFilter& filter) {
    if (!(dt > 0)) throw UsageError("step: dt must be positive");
    const HopfGrid& g = *s.grid;
    auto rhs = [&](const Eigen::ArrayXd& lam) {
        Eigen::ArrayXd r = -webster_W_array(g, lam);
        filter.apply(r);
        return r;
    };
    Eigen::ArrayXd lam_next;
    if (kind == IntegratorKind::euler) {
        lam_next = s.lambda.v + dt * rhs(s.lambda.v);
    } else {
        Eigen::ArrayXd k1 = rhs(s.lambda.v);
        Eigen::ArrayXd k2 = rhs(s.lambda.v + 0.5 * dt * k1);
        Eigen::ArrayXd k3 = rhs(s.lambda.v + 0.5 * dt * k2);
        Eigen::ArrayXd k4 = rhs(s.lambda.v + dt * k3);
        lam_next = s.lambda.v + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    if (!lam_next.isFinite().all())
        throw DataError("step: non-finite conformal factor after step (blow-up?)");
    return PseudohermitianState::make(s.grid, ScalarField{s.grid, std::move(lam_next)}, s.t + dt);
}

// ---------------------------------------------------------------------------
// Run loop

namespace {

double min_harnack_Y(const PseudohermitianState& s, double t_min) {
    if (!(s.min_W > 0)) return 0.0;  // Harnack hypotheses violated; other monitors flag this
    const double t_eff = std::max(s.t, t_min);
    Eigen::ArrayXd y =
        2.0 * s.lapW + s.W.square() + s.W / t_eff - 4.0 * s.W1.abs2() / s.W;
    return y.minCoeff();
}

Eigen::ArrayXd evo_rhs_w(const PseudohermitianState& s) {
    return 4.0 * s.lapW + 2.0 * s.W.square();
}

Eigen::ArrayXcd evo_rhs_a(const PseudohermitianState& s) {
    return 2.0 * s.W * s.A11 - 2.0 * kI * s.W11;
}

TraceRow make_row(const PseudohermitianState& s, double dt, double t_min,
                  const PseudohermitianState* prev) {
    TraceRow r{};
    r.t = s.t;
    r.dt = dt;
    r.min_W = s.min_W;
    r.max_W = s.max_W;
    r.min_Y = min_harnack_Y(s, t_min);
    DiagnosticsRecord d = state_diagnostics(s);
    r.max_abs_A11 = d.max_A11;
    r.max_abs_W0 = d.max_W0;
    r.max_abs_W11 = d.max_W11;
    r.max_abs_Q11 = d.max_Q11;
    if (prev && dt > 0) {
        // Trapezoidal residuals of the evolution equations across the step.
        Eigen::ArrayXd wdot = (s.W - prev->W) / dt;
        r.res_2_7 = (wdot - 0.5 * (evo_rhs_w(s) + evo_rhs_w(*prev))).abs().maxCoeff();
        Eigen::ArrayXcd adot = (s.A11 - prev->A11) / dt;
        r.res_2_8 = (adot - 0.5 * (evo_rhs_a(s) + evo_rhs_a(*prev))).abs().maxCoeff();
    }
    return r;
}

}  // namespace

RunResult run(const FlowConfig& config) {
    config.validate();
    GridPtr grid = build_grid(config.n_eta, config.n_xi1, config.n_xi2);

    ScalarField lam0 = config.initial_params
                           ? section5_lambda(*config.initial_params, grid)
                           : ScalarField{grid, read_lambda_field(config.initial_file, *grid)};

    PseudohermitianState state = PseudohermitianState::make(grid, std::move(lam0), 0.0);
    if (!(state.min_W > 0)) {
        long worst = 0;
        state.W.minCoeff(&worst);
        throw DataError("run: initial Webster curvature is not positive; min W = " +
                        std::to_string(state.min_W) + " at node (eta, xi1, xi2) = (" +
                        std::to_string(grid->node_eta[worst]) + ", " +
                        std::to_string(grid->node_xi1[worst]) + ", " +
                        std::to_string(grid->node_xi2[worst]) + ")");
    }

    RunResult out;
    out.grid = grid;
    out.t_min = config.t_min;
    out.baseline = state_diagnostics(state);

    const double se = config.snapshot_every > 0 ? config.snapshot_every : config.t_end / 20.0;
    const double t_tol = 1e-12 * std::max(1.0, config.t_end);
    PolarFilter filter(grid);

    out.trace.push_back(make_row(state, 0.0, config.t_min, nullptr));
    out.snapshots.push_back({0.0, state.lambda.v});
    int next_snap = 1;

    out.event = TerminalEvent::reached_t_end;
    while (state.t < config.t_end - t_tol) {
        if (state.max_W > config.w_cap) {
            out.event = TerminalEvent::w_cap_exceeded;
            break;
        }
        double dt = adaptive_dt(state, config.sigma);
        dt = std::min(dt, next_snap * se - state.t);
        dt = std::min(dt, config.t_end - state.t);
        // Constant-mode contraction predictor: the scalar reduction contracts
        // e^{2 lambda} at rate 2 W, so a step that would drive it nonpositive
        // signals imminent blow-up.
        if (std::exp(2.0 * state.lambda.v.minCoeff()) - 2.0 * dt <= 0.0) {
            out.event = TerminalEvent::contraction_predicted;
            break;
        }
        PseudohermitianState next{};
        try {
            next = step(state, dt, config.integrator, filter);
        } catch (const DataError&) {
            out.event = TerminalEvent::step_failure;
            break;
        }
        out.trace.push_back(make_row(next, dt, config.t_min, &state));
        state = std::move(next);
        if (std::abs(state.t - next_snap * se) < 1e-9 * std::max(1.0, se)) {
            out.snapshots.push_back({state.t, state.lambda.v});
            ++next_snap;
        }
    }
    out.t_final = state.t;
    return out;
}

// ---------------------------------------------------------------------------
// Snapshot residuals

DiagnosticsRecord evolution_residuals(const RunResult& r, int first, int last) {
    if (last < 0) last = static_cast<int>(r.snapshots.size()) - 1;
    if (first < 0 || last >= static_cast<int>(r.snapshots.size()) || last - first < 2)
        throw UsageError("evolution_residuals: need a window of >= 3 snapshots");
    const double dt0 = r.snapshots[first + 1].t - r.snapshots[first].t;
    for (int s = first; s < last; ++s) {
        const double d = r.snapshots[s + 1].t - r.snapshots[s].t;
        if (std::abs(d - dt0) > 1e-9 * std::max(1.0, dt0))
            throw UsageError("evolution_residuals: snapshot window is not uniformly spaced");
    }
    std::vector<PseudohermitianState> states;
    states.reserve(last - first + 1);
    for (int s = first; s <= last; ++s)
        states.push_back(PseudohermitianState::make(
            r.grid, ScalarField{r.grid, r.snapshots[s].lambda}, r.snapshots[s].t));

    DiagnosticsRecord d{};
    for (std::size_t s = 1; s + 1 < states.size(); ++s) {
        Eigen::ArrayXd wdot = (states[s + 1].W - states[s - 1].W) / (2.0 * dt0);
        d.res_2_7 = std::max(d.res_2_7, (wdot - evo_rhs_w(states[s])).abs().maxCoeff());
        Eigen::ArrayXcd adot = (states[s + 1].A11 - states[s - 1].A11) / (2.0 * dt0);
        d.res_2_8 = std::max(d.res_2_8, (adot - evo_rhs_a(states[s])).abs().maxCoeff());
        DiagnosticsRecord sd = state_diagnostics(states[s]);
        d.max_A11 = std::max(d.max_A11, sd.max_A11);
        d.max_W0 = std::max(d.max_W0, sd.max_W0);
        d.max_W11 = std::max(d.max_W11, sd.max_W11);
        d.max_Q11 = std::max(d.max_Q11, sd.max_Q11);
    }
    return d;
}

// ---------------------------------------------------------------------------
// Interpolator

FlowFieldInterpolator::FlowFieldInterpolator(GridPtr grid, const std::vector<Snapshot>* snaps)
    : grid_(std::move(grid)), snaps_(snaps) {
    if (!snaps_ || snaps_->empty())
        throw UsageError("FlowFieldInterpolator: no snapshots");
    w_cache_.resize(snaps_->size());
    w_ready_.assign(snaps_->size(), false);
}

double FlowFieldInterpolator::t_front() const { return snaps_->front().t; }
double FlowFieldInterpolator::t_back() const { return snaps_->back().t; }

const Eigen::ArrayXd& FlowFieldInterpolator::w_field(int s) const {
    if (!w_ready_[s]) {
        w_cache_[s] = webster_W_array(*grid_, (*snaps_)[s].lambda);
        w_ready_[s] = true;
    }
    return w_cache_[s];
}

std::pair<int, double> FlowFieldInterpolator::locate_time(double t) const {
    const double tol = 1e-9 * std::max(1.0, std::abs(t_back()));
    if (t < t_front() - tol || t > t_back() + tol)
        throw UsageError("FlowFieldInterpolator: time " + std::to_string(t) +
                         " outside the covered window [" + std::to_string(t_front()) + ", " +
                         std::to_string(t_back()) + "]");
    t = std::clamp(t, t_front(), t_back());
    int lo = 0, hi = static_cast<int>(snaps_->size()) - 1;
    while (hi - lo > 1) {
        int mid = (lo + hi) / 2;
        ((*snaps_)[mid].t <= t ? lo : hi) = mid;
    }
    const double span = (*snaps_)[lo + 1].t - (*snaps_)[lo].t;
    return {lo, span > 0 ? (t - (*snaps_)[lo].t) / span : 0.0};
}

double FlowFieldInterpolator::interp_space(const Eigen::ArrayXd& f, const SpherePoint& x) const {
    const HopfGrid& g = *grid_;
    // Node lookup with parity ghost rings across eta = 0 and eta = pi/2.
    auto at = [&](int k, int i, int j) {
        i = (i % g.n_xi1 + g.n_xi1) % g.n_xi1;
        j = (j % g.n_xi2 + g.n_xi2) % g.n_xi2;
        if (k < 0) {
            k = -1 - k;
            j = (j + g.n_xi2 / 2) % g.n_xi2;
        } else if (k >= g.n_eta) {
            k = 2 * g.n_eta - 1 - k;
            i = (i + g.n_xi1 / 2) % g.n_xi1;
        }
        return f[g.index(k, i, j)];
    };
    const double ak = x.eta() / g.h_eta - 0.5;
    const double a1 = x.xi1() / g.h_xi1;
    const double a2 = x.xi2() / g.h_xi2;
    const int k0 = static_cast<int>(std::floor(ak));
    const int i0 = static_cast<int>(std::floor(a1));
    const int j0 = static_cast<int>(std::floor(a2));
    const double wk = ak - k0, w1 = a1 - i0, w2 = a2 - j0;
    double acc = 0.0;
    for (int dk = 0; dk < 2; ++dk)
        for (int di = 0; di < 2; ++di)
            for (int dj = 0; dj < 2; ++dj)
                acc += (dk ? wk : 1 - wk) * (di ? w1 : 1 - w1) * (dj ? w2 : 1 - w2) *
                       at(k0 + dk, i0 + di, j0 + dj);
    return acc;
}

double FlowFieldInterpolator::lambda_at(const SpherePoint& x, double t) const {
    auto [s, w] = locate_time(t);
    double a = interp_space((*snaps_)[s].lambda, x);
    if (w == 0.0) return a;
    return (1.0 - w) * a + w * interp_space((*snaps_)[s + 1].lambda, x);
}

double FlowFieldInterpolator::w_at(const SpherePoint& x, double t) const {
    auto [s, w] = locate_time(t);
    double a = interp_space(w_field(s), x);
    if (w == 0.0) return a;
    return (1.0 - w) * a + w * interp_space(w_field(s + 1), x);
}

}  // namespace crflow
