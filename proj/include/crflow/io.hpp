#pragma once

// Run artifacts: CSV/binary field serialization, trace / harnack / paths CSV
// writers, per-snapshot state dumps, the run manifest, and the JSON run
// configuration.
//
// Binary field layout (little-endian, host doubles): three int32 grid dims
// (n_eta, n_xi1, n_xi2), then the node values row-major in the grid's node
// order; complex fields store (re, im) pairs per node.

#include <string>
#include <vector>

#include "crflow/flow.hpp"

namespace crflow {

// --- fields ---------------------------------------------------------------
void write_field_csv(const std::string& path, const ScalarField& f);
void write_field_csv(const std::string& path, const ComplexField& f);
void write_field_binary(const std::string& path, const HopfGrid& g, const Eigen::ArrayXd& v);
void write_field_binary(const std::string& path, const HopfGrid& g, const Eigen::ArrayXcd& v);

// Reads a real binary field and checks its dims against the grid.
Eigen::ArrayXd read_lambda_field(const std::string& path, const HopfGrid& g);

// --- run outputs ----------------------------------------------------------
void write_trace_csv(const std::string& path, const std::vector<TraceRow>& rows);

struct HarnackRow {
    double t, min_Y;
    double argmin_eta, argmin_xi1, argmin_xi2;
    double min_diff_residual;
};
void write_harnack_csv(const std::string& path, const std::vector<HarnackRow>& rows);

struct PathRow {
    cplx x1_z1, x1_z2, x2_z1, x2_z2;
    double t1, t2, L_hat, defect;
    bool pass;
};
void write_paths_csv(const std::string& path, const std::vector<PathRow>& rows);

// Snapshot dump: <dir>/snapshot_NNNN.json header (t, grid dims, file names)
// plus binary blocks for lambda, W, A11.
void write_snapshot(const std::string& dir, int index, const HopfGrid& g, const Snapshot& s);

// Reloads the snapshots of a completed run directory (snapshot_NNNN.json in
// index order); the grid is rebuilt from the headers, which must agree.
struct LoadedRun {
    GridPtr grid;
    std::vector<Snapshot> snapshots;
};
LoadedRun load_run_snapshots(const std::string& dir);

struct ManifestCheck {
    std::string name;
    std::string status;  // "pass" | "fail" | "not-run"
    double worst = 0.0, tolerance = 0.0;
};

struct RunManifest {
    std::string command;
    std::string config_echo;  // serialized configuration actually used
    std::string event;
    double t_final = 0.0;
    std::vector<std::string> files;  // outputs, relative to the manifest's directory
    std::vector<ManifestCheck> checks;

    bool all_pass() const;
};

// Writes <dir>/manifest.json; every listed file must already exist in dir.
void write_manifest(const std::string& dir, const RunManifest& m);

// --- configuration --------------------------------------------------------
// JSON schema:
//   { "grid": {"n_eta": .., "n_xi1": .., "n_xi2": ..},
//     "initial": {"a": [re, im], "b": .., "c": ..} | {"file": "lambda.bin"},
//     "t_end": .., "sigma": .., "integrator": "rk4"|"euler",
//     "w_cap": .., "t_min": .., "snapshots_every": ..,
//     "tolerances": { <name>: <value>, ... }, "out": "dir" }
// Complex entries accept [re, im] or a bare real number.  Unknown keys are
// rejected.  Missing optional keys keep FlowConfig defaults.
struct RunSettings {
    FlowConfig flow;
    std::vector<std::pair<std::string, double>> tolerances;
};

RunSettings parse_run_settings(const std::string& json_text);
RunSettings load_run_settings(const std::string& path);
std::string settings_to_json(const RunSettings& s);

void ensure_directory(const std::string& dir);

}  // namespace crflow
