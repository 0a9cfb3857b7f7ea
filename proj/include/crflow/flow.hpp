#pragma once

// Time integration of the Yamabe flow d(lambda)/dt = -W with adaptive step
// control, blow-up guards, and evolution-equation residual diagnostics.
//
// Stability: the subparabolic principal part acts like 4 Delta_b, and in Hopf
// coordinates the tan/cot factors make azimuthal modes near the degenerate
// circles arbitrarily stiff even though smooth fields carry no energy there
// (the m-th azimuthal mode of a smooth function decays like sin(eta)^m toward
// eta = 0, resp. cos(eta)^m toward eta = pi/2).  The integrator therefore
// applies a standard polar filter to each stage derivative: on the eta-ring
// with coordinate eta, xi2-modes with |m| > max(m0, beta n_xi2 sin eta) and
// xi1-modes with |m| > max(m0, beta n_xi1 cos eta) are projected out.  The
// filter lives only in the time loop; spatial operators are unfiltered, and
// ring-constant fields pass through the filter unchanged.

#include <optional>
#include <string>
#include <vector>

#include "crflow/conformal.hpp"
#include "crflow/initial_data.hpp"

namespace crflow {

enum class IntegratorKind { euler, rk4 };

struct FlowConfig {
    int n_eta = 16, n_xi1 = 16, n_xi2 = 16;
    std::optional<Section5Params> initial_params;  // exclusive with initial_file
    std::string initial_file;                      // binary lambda field
    double t_end = 0.25;
    double sigma = 0.25;
    IntegratorKind integrator = IntegratorKind::rk4;
    double w_cap = 1e4;
    double t_min = 0.01;           // Harnack monitoring starts here (Z, Y contain W/t)
    double snapshot_every = 0.0;   // time between stored snapshots; 0 = t_end / 20
    std::string out_dir;           // empty = no files written

    void validate() const;
};

struct TraceRow {
    double t, dt, min_W, max_W, min_Y;
    double max_abs_A11, max_abs_W0, max_abs_W11;
    double res_2_7, res_2_8;
    double max_abs_Q11;  // not part of trace.csv; kept for the monitors
};

struct Snapshot {
    double t;
    Eigen::ArrayXd lambda;
};

enum class TerminalEvent { reached_t_end, w_cap_exceeded, contraction_predicted, step_failure };
const char* to_string(TerminalEvent e);

struct RunResult {
    GridPtr grid;
    std::vector<TraceRow> trace;
    std::vector<Snapshot> snapshots;
    TerminalEvent event = TerminalEvent::reached_t_end;
    double t_final = 0.0;
    double t_min = 0.01;
    DiagnosticsRecord baseline;  // t = 0 discretization levels of the monitors
};

// Azimuthal projection described above; built once per (grid, m0) pair.
class PolarFilter {
  public:
    PolarFilter(GridPtr grid, int m0 = 2);
    void apply(Eigen::ArrayXd& f) const;

  private:
    GridPtr grid_;
    std::vector<Eigen::MatrixXd> p_xi1_, p_xi2_;  // per ring; empty = identity
};

double adaptive_dt(const PseudohermitianState& s, double sigma);

// One explicit step of d(lambda)/dt = -W; stage curvatures are recomputed and
// stage derivatives polar-filtered.  Throws UsageError for dt <= 0 and
// DataError if the stepped field is non-finite.
PseudohermitianState step(const PseudohermitianState& s, double dt, IntegratorKind kind,
                          const PolarFilter& filter);

RunResult run(const FlowConfig& config);

// Max-norm residuals of the W and A11 evolution equations
//     dW/dt = 4 Delta_b W + 2 W^2,      dA11/dt = 2 W A11 - 2i W_{,11},
// using central time differences over a window of >= 3 uniformly spaced
// snapshots [first, last] (indices into result.snapshots).
DiagnosticsRecord evolution_residuals(const RunResult& r, int first = 0, int last = -1);

// Space-time interpolation of lambda (and derived W) over a run's snapshots:
// trilinear in (eta, xi1, xi2) with parity ghost rings across the degenerate
// circles, linear in t.
class FlowFieldInterpolator {
  public:
    FlowFieldInterpolator(GridPtr grid, const std::vector<Snapshot>* snaps);

    double lambda_at(const SpherePoint& x, double t) const;
    double w_at(const SpherePoint& x, double t) const;
    double t_front() const;
    double t_back() const;

  private:
    const Eigen::ArrayXd& w_field(int snap_index) const;
    std::pair<int, double> locate_time(double t) const;
    double interp_space(const Eigen::ArrayXd& f, const SpherePoint& x) const;

    GridPtr grid_;
    const std::vector<Snapshot>* snaps_;
    mutable std::vector<Eigen::ArrayXd> w_cache_;
    mutable std::vector<bool> w_ready_;
};

}  // namespace crflow
