// Command-line driver: batch runs of the CR Yamabe flow and its verification
// pipelines.  Subcommands: run, verify-operators, verify-initial-data,
// harnack-monitor, path-action, report.
//
// Exit codes: 0 all requested checks pass; 2 usage or configuration error;
// 3 numerical terminal event (trace and manifest are still written);
// 4 data, hypothesis, or internal-consistency error; 5 unexpected failure;
// 1 a pipeline ran cleanly but at least one check failed.

#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "crflow/harnack.hpp"
#include "crflow/io.hpp"
#include "crflow/legendrian_path.hpp"

using namespace crflow;
using nlohmann::json;

namespace {

constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumericalEvent = 3;
constexpr int kExitDataError = 4;
constexpr int kExitInternal = 5;

struct GridSpec {
    int n_eta = 16, n_xi1 = 16, n_xi2 = 16;
};

GridSpec parse_grid_spec(const std::string& s) {
    GridSpec g;
    if (std::sscanf(s.c_str(), "%d,%d,%d", &g.n_eta, &g.n_xi1, &g.n_xi2) != 3)
        throw ConfigError("--grid expects n_eta,n_xi1,n_xi2, got \"" + s + "\"");
    return g;
}

cplx parse_cplx_option(const std::string& s) {
    double re = 0, im = 0;
    if (std::sscanf(s.c_str(), "%lf,%lf", &re, &im) == 2) return {re, im};
    if (std::sscanf(s.c_str(), "%lf", &re) == 1) return {re, 0.0};
    throw ConfigError("complex option expects re or re,im, got \"" + s + "\"");
}

void print_checks(const RunManifest& m) {
    for (const ManifestCheck& c : m.checks)
        std::printf("%-28s %-8s worst=%-14.6g tol=%g\n", c.name.c_str(), c.status.c_str(),
                    c.worst, c.tolerance);
}

int finish(const std::string& out_dir, RunManifest& m) {
    if (!out_dir.empty()) write_manifest(out_dir, m);
    print_checks(m);
    return m.all_pass() ? 0 : kExitCheckFailed;
}

// --- run -------------------------------------------------------------------

int cmd_run(const std::string& config_path, const std::string& out_override) {
    RunSettings settings = load_run_settings(config_path);
    if (!out_override.empty()) settings.flow.out_dir = out_override;
    const std::string out = settings.flow.out_dir;
    if (!out.empty()) ensure_directory(out);

    RunResult r = run(settings.flow);

    RunManifest m;
    m.command = "run";
    m.config_echo = settings_to_json(settings);
    m.event = to_string(r.event);
    m.t_final = r.t_final;

    if (!out.empty()) {
        write_trace_csv(out + "/trace.csv", r.trace);
        m.files.push_back("trace.csv");
        for (std::size_t i = 0; i < r.snapshots.size(); ++i)
            write_snapshot(out, static_cast<int>(i), *r.grid, r.snapshots[i]);
        m.files.push_back("snapshot_0000.json");
    }

    double tol_monotone = 1e-8, tol_harnack = 1e-3;
    for (const auto& [k, v] : settings.tolerances) {
        if (k == "min_w_monotone") tol_monotone = v;
        if (k == "harnack") tol_harnack = v;
    }

    // Curvature minimum must be nondecreasing and above the scalar lower
    // bound c/(1 - 2ct) for c = min W(0).
    double worst_drop = 0.0, worst_bound = 0.0;
    const double c0 = r.trace.front().min_W;
    double prev = c0;
    for (const TraceRow& row : r.trace) {
        worst_drop = std::max(worst_drop, (prev - row.min_W) / std::max(1.0, std::abs(prev)));
        prev = row.min_W;
        const double denom = 1.0 - 2.0 * c0 * row.t;
        if (denom > 0) worst_bound = std::max(worst_bound, c0 / denom - row.min_W);
    }
    double min_y = std::numeric_limits<double>::infinity();
    for (const TraceRow& row : r.trace)
        if (row.t >= r.t_min) min_y = std::min(min_y, row.min_Y);

    m.checks.push_back({"terminal_event", r.event == TerminalEvent::reached_t_end ? "pass" : "fail",
                        static_cast<double>(r.event != TerminalEvent::reached_t_end), 0.0});
    m.checks.push_back(
        {"min_w_nondecreasing", worst_drop <= tol_monotone ? "pass" : "fail", worst_drop,
         tol_monotone});
    m.checks.push_back({"min_w_lower_bound", worst_bound <= tol_harnack ? "pass" : "fail",
                        worst_bound, tol_harnack});
    m.checks.push_back({"harnack_min_y", min_y >= -tol_harnack ? "pass" : "fail", min_y,
                        tol_harnack});

    int rc = finish(out, m);
    if (r.event != TerminalEvent::reached_t_end) return kExitNumericalEvent;
    return rc;
}

// --- verify-operators ------------------------------------------------------

int cmd_verify_operators(const GridSpec& gs, const std::string& out) {
    GridPtr g = build_grid(gs.n_eta, gs.n_xi1, gs.n_xi2);
    RunManifest m;
    m.command = "verify-operators";

    auto check = [&](const std::string& name, double worst, double tol) {
        m.checks.push_back({name, worst <= tol ? "pass" : "fail", worst, tol});
    };

    // Named eigenfunction identities of the sublaplacian.
    ScalarField f1 = sample(g, [](const SpherePoint& p) { return p.z1.real(); });
    ScalarField lap1 = sublaplacian(f1);
    check("lap_re_z1", (lap1.v + 0.5 * f1.v).abs().maxCoeff(), 1e-8);

    ScalarField f2 = sample(g, [](const SpherePoint& p) { return std::norm(p.z1); });
    ScalarField lap2 = sublaplacian(f2);
    ScalarField rhs2 = sample(g, [](const SpherePoint& p) { return std::norm(p.z2) - std::norm(p.z1); });
    check("lap_abs_z1_sq", (lap2.v - rhs2.v).abs().maxCoeff(), 1e-8);

    // Random degree-4 polynomial: discrete frame derivatives against the
    // exact symbolic ones, and the commutation identity.
    auto [pf, poly] = random_smooth_field(g, 20240515u, 4);
    for (Dir d : {Dir::Z1, Dir::Z1bar, Dir::T}) {
        ComplexField num = frame_derivative(pf, d);
        ComplexField exact = sample_poly(poly_frame_derivative(poly, d), g);
        const char* tag = d == Dir::Z1 ? "z1" : (d == Dir::Z1bar ? "z1bar" : "t");
        check(std::string("frame_derivative_") + tag, (num.v - exact.v).abs().maxCoeff(), 1e-4);
    }
    // Second-derivative identity; tolerance calibrated to the 16^3 truncation
    // level of the eta stencil on degree-4 data.
    SecondDerivs sd = covariant_second(pf);
    ComplexField tf = frame_derivative(pf, Dir::T);
    check("commutation_11bar", (sd.f11bar.v - sd.f1bar1.v - kI * tf.v).abs().maxCoeff(), 5e-4);

    check("quadrature_volume",
          std::abs(g->weight.sum() - 16.0 * kPi * kPi) / (16.0 * kPi * kPi), 1e-12);

    if (!out.empty()) ensure_directory(out);
    return finish(out, m);
}

// --- verify-initial-data ---------------------------------------------------

int cmd_verify_initial_data(const GridSpec& gs, const Section5Params& p, double tol_a11,
                            const std::string& out) {
    GridPtr g = build_grid(gs.n_eta, gs.n_xi1, gs.n_xi2);
    RunManifest m;
    m.command = "verify-initial-data";

    TorsionFreeReport rep = verify_torsion_free(p, g);
    m.checks.push_back({"torsion_free_exact", rep.max_exact_residual <= 1e-12 ? "pass" : "fail",
                        rep.max_exact_residual, 1e-12});
    m.checks.push_back({"torsion_a11", rep.max_torsion <= tol_a11 ? "pass" : "fail",
                        rep.max_torsion, tol_a11});

    ScalarField lam = section5_lambda(p, g);
    ScalarField W = webster_curvature(lam);
    ScalarField Wo = section5_W_oracle(p, g);
    const double rel = ((W.v - Wo.v).abs() / Wo.v.abs().maxCoeff()).maxCoeff();
    m.checks.push_back({"webster_vs_oracle", rel <= 1e-4 ? "pass" : "fail", rel, 1e-4});

    if (!out.empty()) ensure_directory(out);
    return finish(out, m);
}

// --- harnack-monitor -------------------------------------------------------

int cmd_harnack_monitor(const std::string& run_dir, double t_start, double tol,
                        const std::string& out) {
    LoadedRun lr = load_run_snapshots(run_dir);
    RunResult r;
    r.grid = lr.grid;
    r.snapshots = std::move(lr.snapshots);
    std::vector<HarnackMonitorRow> rows = harnack_monitor(r, t_start);
    if (rows.empty()) throw UsageError("harnack-monitor: no snapshots at t >= t_start");

    std::vector<HarnackRow> csv;
    double min_y = std::numeric_limits<double>::infinity();
    double min_res = std::numeric_limits<double>::infinity();
    for (const HarnackMonitorRow& row : rows) {
        HarnackRow c{};
        c.t = row.t;
        c.min_Y = row.min_Y;
        c.argmin_eta = r.grid->node_eta[row.argmin_node];
        c.argmin_xi1 = r.grid->node_xi1[row.argmin_node];
        c.argmin_xi2 = r.grid->node_xi2[row.argmin_node];
        c.min_diff_residual = row.min_diff_residual;
        csv.push_back(c);
        min_y = std::min(min_y, row.min_Y);
        min_res = std::min(min_res, row.min_diff_residual);
    }

    RunManifest m;
    m.command = "harnack-monitor";
    if (!out.empty()) {
        ensure_directory(out);
        write_harnack_csv(out + "/harnack.csv", csv);
        m.files.push_back("harnack.csv");
    }
    m.checks.push_back({"harnack_min_y", min_y >= -tol ? "pass" : "fail", min_y, tol});
    m.checks.push_back(
        {"differential_harnack", min_res >= -tol ? "pass" : "fail", min_res, tol});
    return finish(out, m);
}

// --- path-action -----------------------------------------------------------

int cmd_path_action(const std::string& pairs_path, const std::string& run_dir,
                    const std::string& out) {
    LoadedRun lr = load_run_snapshots(run_dir);
    FlowFieldInterpolator interp(lr.grid, &lr.snapshots);

    std::ifstream in(pairs_path);
    if (!in) throw ConfigError("cannot open pairs file: " + pairs_path);
    json spec = json::parse(in, nullptr, false);
    if (spec.is_discarded()) throw ConfigError("invalid JSON in " + pairs_path);

    struct Pair {
        SpherePoint x1, x2;
        double t1, t2;
    };
    std::vector<Pair> pairs;
    auto point_of = [](const json& j) {
        if (!j.is_array() || j.size() != 4)
            throw ConfigError("pairs: a point is [z1_re, z1_im, z2_re, z2_im]");
        return SpherePoint(cplx(j[0].get<double>(), j[1].get<double>()),
                           cplx(j[2].get<double>(), j[3].get<double>()));
    };
    if (spec.is_object() && spec.contains("random")) {
        const int count = spec["random"].get<int>();
        const double t1 = spec.value("t1", 0.05), t2 = spec.value("t2", 0.2);
        std::mt19937 rng(spec.value("seed", 1u));
        std::normal_distribution<double> gauss(0.0, 1.0);
        auto random_point = [&] {
            return SpherePoint::project(cplx(gauss(rng), gauss(rng)),
                                        cplx(gauss(rng), gauss(rng)));
        };
        for (int i = 0; i < count; ++i) pairs.push_back({random_point(), random_point(), t1, t2});
    } else if (spec.is_array()) {
        for (const json& j : spec)
            pairs.push_back({point_of(j.at("x1")), point_of(j.at("x2")), j.at("t1").get<double>(),
                             j.at("t2").get<double>()});
    } else {
        throw ConfigError("pairs: expected an array of pairs or {\"random\": N, ...}");
    }

    std::vector<PathRow> rows;
    bool all_pass = true;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const Pair& pr = pairs[i];
        HarnackCheck chk =
            integrated_harnack_check(pr.x1, pr.t1, pr.x2, pr.t2, interp, 12, static_cast<std::uint32_t>(i + 1));
        PathRow row{pr.x1.z1, pr.x1.z2, pr.x2.z1, pr.x2.z2,
                    pr.t1,    pr.t2,    chk.L_hat, chk.defect, chk.pass};
        rows.push_back(row);
        all_pass = all_pass && chk.pass;
        std::printf("pair %2zu: lhs=%.6f rhs=%.6f L_hat=%.6f defect=%.2e %s\n", i, chk.lhs,
                    chk.rhs, chk.L_hat, chk.defect, chk.pass ? "pass" : "FAIL");
    }

    RunManifest m;
    m.command = "path-action";
    if (!out.empty()) {
        ensure_directory(out);
        write_paths_csv(out + "/paths.csv", rows);
        m.files.push_back("paths.csv");
    }
    m.checks.push_back({"integrated_harnack_all_pairs", all_pass ? "pass" : "fail",
                        static_cast<double>(rows.size()), 0.0});
    return finish(out, m);
}

// --- report ----------------------------------------------------------------

int cmd_report(const std::string& run_dir) {
    std::ifstream in(run_dir + "/manifest.json");
    if (!in) throw UsageError("no manifest.json in " + run_dir);
    json m = json::parse(in, nullptr, false);
    if (m.is_discarded()) throw DataError("invalid manifest.json in " + run_dir);
    std::printf("command: %s\nevent:   %s\nt_final: %g\n",
                m.value("command", std::string("?")).c_str(),
                m.value("event", std::string("?")).c_str(), m.value("t_final", 0.0));
    std::printf("%-28s %-8s %-14s %s\n", "check", "status", "worst", "tolerance");
    bool ok = true;
    for (const json& c : m.value("checks", json::array())) {
        const std::string status = c.value("status", std::string("not-run"));
        ok = ok && status != "fail";
        std::printf("%-28s %-8s %-14.6g %g\n", c.value("name", std::string("?")).c_str(),
                    status.c_str(), c.value("worst", 0.0), c.value("tolerance", 0.0));
    }
    for (const json& f : m.value("files", json::array()))
        std::printf("file: %s\n", f.get<std::string>().c_str());
    return ok ? 0 : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CR Yamabe flow simulator and verification suite"};
    app.require_subcommand(1);

    std::string config_path, out_dir, grid_str = "16,16,16", run_dir, pairs_path;
    std::string a_str = "0.1", b_str = "0.05", c_str = "1.0";
    double tol_a11 = 1e-6, t_start = 0.01, harnack_tol = 1e-3;

    CLI::App* c_run = app.add_subcommand("run", "Integrate the flow from a JSON config");
    c_run->add_option("--config", config_path, "JSON configuration file")->required();
    c_run->add_option("--out", out_dir, "Output directory (overrides config)");

    CLI::App* c_ops = app.add_subcommand("verify-operators", "Operator oracle suite");
    c_ops->add_option("--grid", grid_str, "n_eta,n_xi1,n_xi2");
    c_ops->add_option("--out", out_dir, "Output directory");

    CLI::App* c_init = app.add_subcommand("verify-initial-data", "Torsion-free data checks");
    c_init->add_option("--grid", grid_str, "n_eta,n_xi1,n_xi2");
    c_init->add_option("--a", a_str, "parameter a (re or re,im)");
    c_init->add_option("--b", b_str, "parameter b (re or re,im)");
    c_init->add_option("--c", c_str, "parameter c (re or re,im)");
    c_init->add_option("--tol-a11", tol_a11, "tolerance for max |A11|");
    c_init->add_option("--out", out_dir, "Output directory");

    CLI::App* c_har = app.add_subcommand("harnack-monitor", "Pointwise Harnack monitor over a run");
    c_har->add_option("--run", run_dir, "Run directory with snapshots")->required();
    c_har->add_option("--t-start", t_start, "Monitor start time");
    c_har->add_option("--tol", harnack_tol, "Harnack tolerance");
    c_har->add_option("--out", out_dir, "Output directory");

    CLI::App* c_path = app.add_subcommand("path-action", "Integrated Harnack path-action checks");
    c_path->add_option("--pairs", pairs_path, "JSON point pairs or {\"random\": N}")->required();
    c_path->add_option("--run", run_dir, "Run directory with snapshots")->required();
    c_path->add_option("--out", out_dir, "Output directory");

    CLI::App* c_rep = app.add_subcommand("report", "Summarize a run directory");
    c_rep->add_option("--run", run_dir, "Run directory with a manifest")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (c_run->parsed()) return cmd_run(config_path, out_dir);
        if (c_ops->parsed()) return cmd_verify_operators(parse_grid_spec(grid_str), out_dir);
        if (c_init->parsed())
            return cmd_verify_initial_data(
                parse_grid_spec(grid_str),
                Section5Params{parse_cplx_option(a_str), parse_cplx_option(b_str),
                               parse_cplx_option(c_str)},
                tol_a11, out_dir);
        if (c_har->parsed()) return cmd_harnack_monitor(run_dir, t_start, harnack_tol, out_dir);
        if (c_path->parsed()) return cmd_path_action(pairs_path, run_dir, out_dir);
        if (c_rep->parsed()) return cmd_report(run_dir);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitUsage;
    } catch (const UsageError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return kExitUsage;
    } catch (const HypothesisError& e) {
        std::fprintf(stderr, "hypothesis violated: %s\n", e.what());
        return kExitDataError;
    } catch (const NumericalConsistencyError& e) {
        std::fprintf(stderr, "consistency check failed: %s\n", e.what());
        return kExitDataError;
    } catch (const DataError& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return kExitDataError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInternal;
    }
    return kExitUsage;
}
