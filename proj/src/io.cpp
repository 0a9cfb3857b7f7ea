#include "crflow/io.hpp"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace crflow {

namespace {

using nlohmann::json;

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
    std::ofstream f(path, mode);
    if (!f) throw DataError("cannot open for writing: " + path);
    f.imbue(std::locale::classic());
    return f;
}

void set_precision(std::ostream& os) { os << std::setprecision(17); }

}  // namespace

void ensure_directory(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw DataError("cannot create directory " + dir + ": " + ec.message());
}

// --- fields ---------------------------------------------------------------

void write_field_csv(const std::string& path, const ScalarField& f) {
    std::ofstream o = open_out(path);
    set_precision(o);
    o << "node,eta,xi1,xi2,value\n";
    const HopfGrid& g = *f.grid;
    for (long n = 0; n < g.n_nodes(); ++n)
        o << n << ',' << g.node_eta[n] << ',' << g.node_xi1[n] << ',' << g.node_xi2[n] << ','
          << f.v[n] << '\n';
}

void write_field_csv(const std::string& path, const ComplexField& f) {
    std::ofstream o = open_out(path);
    set_precision(o);
    o << "node,eta,xi1,xi2,re,im\n";
    const HopfGrid& g = *f.grid;
    for (long n = 0; n < g.n_nodes(); ++n)
        o << n << ',' << g.node_eta[n] << ',' << g.node_xi1[n] << ',' << g.node_xi2[n] << ','
          << f.v[n].real() << ',' << f.v[n].imag() << '\n';
}

namespace {

void write_binary_header(std::ofstream& o, const HopfGrid& g) {
    const std::int32_t dims[3] = {g.n_eta, g.n_xi1, g.n_xi2};
    o.write(reinterpret_cast<const char*>(dims), sizeof(dims));
}

}  // namespace

void write_field_binary(const std::string& path, const HopfGrid& g, const Eigen::ArrayXd& v) {
    if (v.size() != g.n_nodes()) throw UsageError("write_field_binary: field/grid size mismatch");
    std::ofstream o = open_out(path, std::ios::binary);
    write_binary_header(o, g);
    o.write(reinterpret_cast<const char*>(v.data()), v.size() * sizeof(double));
    if (!o) throw DataError("short write: " + path);
}

void write_field_binary(const std::string& path, const HopfGrid& g, const Eigen::ArrayXcd& v) {
    if (v.size() != g.n_nodes()) throw UsageError("write_field_binary: field/grid size mismatch");
    std::ofstream o = open_out(path, std::ios::binary);
    write_binary_header(o, g);
    o.write(reinterpret_cast<const char*>(v.data()), v.size() * 2 * sizeof(double));
    if (!o) throw DataError("short write: " + path);
}

Eigen::ArrayXd read_lambda_field(const std::string& path, const HopfGrid& g) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open field file: " + path);
    std::int32_t dims[3];
    in.read(reinterpret_cast<char*>(dims), sizeof(dims));
    if (!in) throw DataError("truncated field file: " + path);
    if (dims[0] != g.n_eta || dims[1] != g.n_xi1 || dims[2] != g.n_xi2)
        throw DataError("field file " + path + " has dims (" + std::to_string(dims[0]) + ", " +
                        std::to_string(dims[1]) + ", " + std::to_string(dims[2]) +
                        "), grid expects (" + std::to_string(g.n_eta) + ", " +
                        std::to_string(g.n_xi1) + ", " + std::to_string(g.n_xi2) + ")");
    Eigen::ArrayXd v(g.n_nodes());
    in.read(reinterpret_cast<char*>(v.data()), v.size() * sizeof(double));
    if (!in) throw DataError("truncated field file: " + path);
    require_finite(v, "read_lambda_field");
    return v;
}

// --- run outputs ----------------------------------------------------------

void write_trace_csv(const std::string& path, const std::vector<TraceRow>& rows) {
    std::ofstream o = open_out(path);
    set_precision(o);
    o << "t,dt,min_W,max_W,min_Y,max_abs_A11,max_abs_W0,max_abs_W11,res_2_7,res_2_8\n";
    for (const TraceRow& r : rows)
        o << r.t << ',' << r.dt << ',' << r.min_W << ',' << r.max_W << ',' << r.min_Y << ','
          << r.max_abs_A11 << ',' << r.max_abs_W0 << ',' << r.max_abs_W11 << ',' << r.res_2_7
          << ',' << r.res_2_8 << '\n';
}

void write_harnack_csv(const std::string& path, const std::vector<HarnackRow>& rows) {
    std::ofstream o = open_out(path);
    set_precision(o);
    o << "t,min_Y,argmin_eta,argmin_xi1,argmin_xi2,min_diff_residual\n";
    for (const HarnackRow& r : rows)
        o << r.t << ',' << r.min_Y << ',' << r.argmin_eta << ',' << r.argmin_xi1 << ','
          << r.argmin_xi2 << ',' << r.min_diff_residual << '\n';
}

void write_paths_csv(const std::string& path, const std::vector<PathRow>& rows) {
    std::ofstream o = open_out(path);
    set_precision(o);
    o << "x1_z1_re,x1_z1_im,x1_z2_re,x1_z2_im,"
         "x2_z1_re,x2_z1_im,x2_z2_re,x2_z2_im,"
         "t1,t2,L_hat,defect,pass\n";
    for (const PathRow& r : rows)
        o << r.x1_z1.real() << ',' << r.x1_z1.imag() << ',' << r.x1_z2.real() << ','
          << r.x1_z2.imag() << ',' << r.x2_z1.real() << ',' << r.x2_z1.imag() << ','
          << r.x2_z2.real() << ',' << r.x2_z2.imag() << ',' << r.t1 << ',' << r.t2 << ','
          << r.L_hat << ',' << r.defect << ',' << (r.pass ? 1 : 0) << '\n';
}

void write_snapshot(const std::string& dir, int index, const HopfGrid& g, const Snapshot& s) {
    std::ostringstream tag;
    tag << "snapshot_" << std::setw(4) << std::setfill('0') << index;
    const std::string base = tag.str();

    if (s.lambda.size() != g.n_nodes()) throw UsageError("write_snapshot: field/grid mismatch");
    Eigen::ArrayXd W = webster_W_array(g, s.lambda);
    // Torsion takes the grid-owning field interface; alias the caller's grid
    // (non-owning) for the duration of the call.
    GridPtr gp = std::shared_ptr<const HopfGrid>(&g, [](const HopfGrid*) {});
    Eigen::ArrayXcd A11 = torsion(ScalarField{gp, s.lambda}).v;

    write_field_binary(dir + "/" + base + "_lambda.bin", g, s.lambda);
    write_field_binary(dir + "/" + base + "_W.bin", g, W);
    write_field_binary(dir + "/" + base + "_A11.bin", g, A11);

    json h;
    h["t"] = s.t;
    h["grid"] = {{"n_eta", g.n_eta}, {"n_xi1", g.n_xi1}, {"n_xi2", g.n_xi2}};
    h["fields"] = {{"lambda", base + "_lambda.bin"},
                   {"W", base + "_W.bin"},
                   {"A11", base + "_A11.bin"}};
    std::ofstream o = open_out(dir + "/" + base + ".json");
    o << h.dump(2) << '\n';
}

LoadedRun load_run_snapshots(const std::string& dir) {
    std::vector<std::filesystem::path> headers;
    std::error_code ec;
    for (const auto& e : std::filesystem::directory_iterator(dir, ec)) {
        const std::string name = e.path().filename().string();
        if (name.rfind("snapshot_", 0) == 0 && e.path().extension() == ".json")
            headers.push_back(e.path());
    }
    if (ec) throw UsageError("cannot read run directory " + dir + ": " + ec.message());
    if (headers.empty()) throw UsageError("no snapshots found in " + dir);
    std::sort(headers.begin(), headers.end());

    LoadedRun run;
    for (const auto& hp : headers) {
        std::ifstream in(hp);
        json h = json::parse(in, nullptr, false);
        if (h.is_discarded()) throw DataError("invalid snapshot header: " + hp.string());
        const int ne = h["grid"]["n_eta"].get<int>();
        const int n1 = h["grid"]["n_xi1"].get<int>();
        const int n2 = h["grid"]["n_xi2"].get<int>();
        if (!run.grid)
            run.grid = build_grid(ne, n1, n2);
        else if (ne != run.grid->n_eta || n1 != run.grid->n_xi1 || n2 != run.grid->n_xi2)
            throw DataError("snapshot " + hp.string() + " disagrees with the run grid");
        Snapshot s;
        s.t = h["t"].get<double>();
        s.lambda = read_lambda_field(dir + "/" + h["fields"]["lambda"].get<std::string>(),
                                     *run.grid);
        run.snapshots.push_back(std::move(s));
    }
    return run;
}

bool RunManifest::all_pass() const {
    for (const ManifestCheck& c : checks)
        if (c.status == "fail") return false;
    return true;
}

void write_manifest(const std::string& dir, const RunManifest& m) {
    for (const std::string& f : m.files)
        if (!std::filesystem::exists(std::filesystem::path(dir) / f))
            throw DataError("manifest references missing file: " + f);
    json j;
    j["command"] = m.command;
    j["config"] = m.config_echo.empty() ? json(nullptr) : json::parse(m.config_echo);
    j["event"] = m.event;
    j["t_final"] = m.t_final;
    j["files"] = m.files;
    j["checks"] = json::array();
    for (const ManifestCheck& c : m.checks)
        j["checks"].push_back({{"name", c.name},
                               {"status", c.status},
                               {"worst", c.worst},
                               {"tolerance", c.tolerance}});
    std::ofstream o = open_out(dir + "/manifest.json");
    o << j.dump(2) << '\n';
}

// --- configuration --------------------------------------------------------

namespace {

cplx parse_complex(const json& j, const std::string& key) {
    if (j.is_number()) return cplx(j.get<double>(), 0.0);
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return cplx(j[0].get<double>(), j[1].get<double>());
    throw ConfigError("config: \"" + key + "\" must be a number or [re, im]");
}

void reject_unknown(const json& j, std::initializer_list<const char*> known,
                    const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : known) ok = ok || it.key() == k;
        if (!ok) throw ConfigError("config: unknown key \"" + it.key() + "\" in " + where);
    }
}

}  // namespace

RunSettings parse_run_settings(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    reject_unknown(j,
                   {"grid", "initial", "t_end", "sigma", "integrator", "w_cap", "t_min",
                    "snapshots_every", "tolerances", "out"},
                   "top level");
    RunSettings s;
    FlowConfig& c = s.flow;
    if (j.contains("grid")) {
        const json& g = j["grid"];
        reject_unknown(g, {"n_eta", "n_xi1", "n_xi2"}, "\"grid\"");
        if (g.contains("n_eta")) c.n_eta = g["n_eta"].get<int>();
        if (g.contains("n_xi1")) c.n_xi1 = g["n_xi1"].get<int>();
        if (g.contains("n_xi2")) c.n_xi2 = g["n_xi2"].get<int>();
    }
    if (j.contains("initial")) {
        const json& in = j["initial"];
        if (in.contains("file")) {
            reject_unknown(in, {"file"}, "\"initial\"");
            c.initial_file = in["file"].get<std::string>();
        } else {
            reject_unknown(in, {"a", "b", "c"}, "\"initial\"");
            Section5Params p;
            if (in.contains("a")) p.a = parse_complex(in["a"], "a");
            if (in.contains("b")) p.b = parse_complex(in["b"], "b");
            if (in.contains("c")) p.c = parse_complex(in["c"], "c");
            c.initial_params = p;
        }
    }
    if (j.contains("t_end")) c.t_end = j["t_end"].get<double>();
    if (j.contains("sigma")) c.sigma = j["sigma"].get<double>();
    if (j.contains("integrator")) {
        const std::string kind = j["integrator"].get<std::string>();
        if (kind == "rk4")
            c.integrator = IntegratorKind::rk4;
        else if (kind == "euler")
            c.integrator = IntegratorKind::euler;
        else
            throw ConfigError("config: integrator must be \"rk4\" or \"euler\", got \"" + kind +
                              "\"");
    }
    if (j.contains("w_cap")) c.w_cap = j["w_cap"].get<double>();
    if (j.contains("t_min")) c.t_min = j["t_min"].get<double>();
    if (j.contains("snapshots_every")) c.snapshot_every = j["snapshots_every"].get<double>();
    if (j.contains("out")) c.out_dir = j["out"].get<std::string>();
    if (j.contains("tolerances"))
        for (auto it = j["tolerances"].begin(); it != j["tolerances"].end(); ++it)
            s.tolerances.emplace_back(it.key(), it.value().get<double>());
    c.validate();
    return s;
}

RunSettings load_run_settings(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_run_settings(buf.str());
}

std::string settings_to_json(const RunSettings& s) {
    const FlowConfig& c = s.flow;
    json j;
    j["grid"] = {{"n_eta", c.n_eta}, {"n_xi1", c.n_xi1}, {"n_xi2", c.n_xi2}};
    if (c.initial_params) {
        const Section5Params& p = *c.initial_params;
        j["initial"] = {{"a", {p.a.real(), p.a.imag()}},
                        {"b", {p.b.real(), p.b.imag()}},
                        {"c", {p.c.real(), p.c.imag()}}};
    } else {
        j["initial"] = {{"file", c.initial_file}};
    }
    j["t_end"] = c.t_end;
    j["sigma"] = c.sigma;
    j["integrator"] = c.integrator == IntegratorKind::rk4 ? "rk4" : "euler";
    j["w_cap"] = c.w_cap;
    j["t_min"] = c.t_min;
    j["snapshots_every"] = c.snapshot_every;
    j["out"] = c.out_dir;
    json tol = json::object();
    for (const auto& [k, v] : s.tolerances) tol[k] = v;
    j["tolerances"] = tol;
    return j.dump(2);
}

}  // namespace crflow
