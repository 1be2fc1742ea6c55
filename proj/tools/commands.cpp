#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <set>
#include <stdexcept>
#include <tuple>

#include <CLI11.hpp>
#include <json.hpp>

#include "lde/dynsys.hpp"
#include "lde/embedding.hpp"
#include "lde/errors.hpp"
#include "lde/io.hpp"
#include "lde/localizability.hpp"
#include "lde/spectral.hpp"

namespace lde::cli {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

struct Globals {
    std::uint64_t seed = 1;
    std::string out;
    double tol_rank = kDefaultRankTol;
    double tol_distinct = kDefaultDistinctTol;
    bool quiet = false;
    std::chrono::steady_clock::time_point started;
    std::string started_utc;
};

std::string utc_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    out << text;
}

json make_manifest(const std::string& command, json parameters, const Globals& g) {
    return json{{"command", command},
                {"parameters", std::move(parameters)},
                {"seed", g.seed},
                {"tolerances", {{"rank", g.tol_rank}, {"distinct", g.tol_distinct}}},
                {"version", LDE_VERSION},
                {"inputs", json::array()},
                {"outputs", json::array()}};
}

void finish_manifest(json& manifest, const Globals& g) {
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - g.started).count();
    manifest["timing"] = {{"started_utc", g.started_utc}, {"wall_seconds", seconds}};
}

// Writes the payload to --out (plus a sidecar manifest) or to the stream.
void emit(const std::string& payload, json manifest, const Globals& g, std::ostream& out) {
    if (g.out.empty()) {
        out << payload;
        return;
    }
    write_text(g.out, payload);
    manifest["outputs"].push_back(g.out);
    finish_manifest(manifest, g);
    write_text(g.out + ".manifest.json", manifest.dump(2) + "\n");
    if (!g.quiet) out << "wrote " << g.out << "\n";
}

std::string json_payload(const json& doc) { return doc.dump(2) + "\n"; }

using Row = std::vector<std::string>;

std::string csv_table(const Row& header, const std::vector<Row>& rows) {
    std::string text;
    auto append = [&text](const Row& row) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) text += ',';
            text += row[i];
        }
        text += '\n';
    };
    append(header);
    for (const auto& r : rows) append(r);
    return text;
}

std::string num(double v) { return io::format_double(v); }
std::string num(Index v) { return std::to_string(v); }

std::string trajectory_csv(const Trajectory& traj) {
    std::ostringstream os;
    io::write_trajectory_csv(os, traj);
    return os.str();
}

Vector parse_list(const std::string& text) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) values.push_back(io::parse_scalar(std::string_view(item)));
    Vector v(static_cast<Index>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) v(static_cast<Index>(i)) = values[i];
    return v;
}

std::vector<Index> parse_sizes(const std::string& text) {
    std::vector<Index> sizes;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            const long long v = std::stoll(item, &used);
            if (used != item.size() || v < 1) throw std::invalid_argument(item);
            sizes.push_back(static_cast<Index>(v));
        } catch (const std::exception&) {
            throw InputError("bad cluster size '" + item + "'");
        }
    }
    if (sizes.empty()) throw InputError("--sizes needs at least one cluster");
    return sizes;
}

json vector_json(const Vector& v) {
    json arr = json::array();
    for (Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

Index to_vertex(Index one_based, Index n) {
    if (one_based < 1 || one_based > n) {
        throw InputError("vertex " + std::to_string(one_based) + " out of range 1.." + std::to_string(n));
    }
    return one_based - 1;
}

// A system file is either linear ({"n","A"}) or a coupled-cell document.
struct LoadedSystem {
    json doc;
    bool coupled = false;
    std::optional<LinearSystem> linear;
    std::optional<CoupledCellSystem> cells;
};

LoadedSystem load_system(const std::string& path) {
    LoadedSystem s;
    s.doc = io::read_json(path);
    if (io::is_coupled_document(s.doc)) {
        s.coupled = true;
        s.cells = io::coupled_from_json(s.doc);
    } else if (s.doc.is_object() && s.doc.contains("A")) {
        s.linear = io::system_from_json(s.doc);
    } else if (s.doc.is_object() && s.doc.contains("W")) {
        throw InputError(path + " is an adjacency file; build a system with `generate laplacian` or `generate wave`");
    } else {
        throw InputError(path + " is not a system file");
    }
    return s;
}

Vector resolve_x0(const std::string& literal, const std::string& file, Index n, std::uint64_t seed) {
    Vector x0;
    if (!literal.empty() && !file.empty()) throw InputError("give at most one of --x0 and --x0-file");
    if (!literal.empty()) {
        x0 = parse_list(literal);
    } else if (!file.empty()) {
        const json doc = io::read_json(file);
        const json& arr = doc.is_object() ? doc.at("x0") : doc;
        if (!arr.is_array()) throw InputError("x0 file must hold an array or {\"x0\": [...]}");
        x0.resize(static_cast<Index>(arr.size()));
        for (std::size_t i = 0; i < arr.size(); ++i) x0(static_cast<Index>(i)) = io::parse_scalar(arr[i]);
    } else {
        x0 = random_normal_vector(n, seed);
    }
    if (x0.size() != n) {
        throw InputError("x0 has " + std::to_string(x0.size()) + " entries, system expects " + std::to_string(n));
    }
    return x0;
}

double max_abs_deviation(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return std::numeric_limits<double>::infinity();
    return (a - b).cwiseAbs().maxCoeff();
}

std::string components_csv(const ClusterResult& result) {
    std::vector<Row> rows;
    for (const auto& r : result.reports) {
        const auto modes = modes_by_real_part(r);
        for (std::size_t l = 0; l < modes.size(); ++l) {
            rows.push_back({num(r.vertex + 1), num(static_cast<Index>(l + 1)), num(modes[l].first.real()),
                            num(modes[l].first.imag()), num(modes[l].second.real()),
                            num(modes[l].second.imag())});
        }
    }
    return csv_table({"vertex", "mode", "eig_re", "eig_im", "c_re", "c_im"}, rows);
}

json cluster_json(const ClusterResult& result, const ClusterOptions& options) {
    json counts = json::array();
    for (const auto& r : result.reports) counts.push_back(r.cluster_count ? json(*r.cluster_count) : json(nullptr));
    return json{{"k", result.k},
                {"per_vertex_cluster_count", counts},
                {"labels", io::labels_to_json(result.labels)},
                {"sign_tol", options.sign_tol},
                {"svd_tol", options.analyze.svd_tol}};
}

// ---------------------------------------------------------------------------

struct GenerateArgs {
    std::string kind;
    std::string sizes = "5,5,5";
    SbmParams sbm;
    std::string adjacency;
    double c = 1.0;
    Index n = 0;
};

int cmd_generate(const GenerateArgs& a, const Globals& g, std::ostream& out) {
    json params{{"kind", a.kind}};
    json payload;
    json manifest;
    if (a.kind == "sbm") {
        SbmParams p = a.sbm;
        p.cluster_sizes = parse_sizes(a.sizes);
        const SbmGraph graph = generate_sbm(p, g.seed);
        payload = io::adjacency_to_json(graph.adjacency, graph.block);
        params.update({{"sizes", p.cluster_sizes},
                       {"intra_p", p.intra_p},
                       {"inter_p", p.inter_p},
                       {"intra_weight", p.intra_weight},
                       {"inter_weight", p.inter_weight},
                       {"max_retries", p.max_retries},
                       {"require_connected", p.require_connected},
                       {"attempts", graph.attempts}});
    } else if (a.kind == "drawn") {
        const SbmGraph graph = drawn_cluster_graph();
        payload = io::adjacency_to_json(graph.adjacency, graph.block);
    } else if (a.kind == "bipartite") {
        payload = io::system_to_json(bipartite_fixture());
    } else if (a.kind == "coupled") {
        const CoupledCellSystem sys = coupled_cell_fixture(g.seed);
        payload = io::coupled_to_json(sys);
        params["epsilon"] = sys.epsilon;
    } else if (a.kind == "wave" || a.kind == "laplacian") {
        if (a.adjacency.empty()) throw InputError("generate " + a.kind + " needs --adjacency");
        const Matrix L = normalized_laplacian(io::adjacency_from_json(io::read_json(a.adjacency)));
        if (a.kind == "wave") {
            payload = io::system_to_json(build_wave_system(L, a.c));
            params["c"] = a.c;
        } else {
            payload = io::system_to_json(laplacian_dynamics(L));
        }
        params["adjacency"] = a.adjacency;
    } else if (a.kind == "random") {
        if (a.n < 1) throw InputError("generate random needs --n >= 1");
        payload = io::system_to_json(random_system(a.n, g.seed));
        params["n"] = a.n;
    } else {
        throw InputError("unknown generator '" + a.kind + "'");
    }
    manifest = make_manifest("generate", params, g);
    if (!a.adjacency.empty()) manifest["inputs"].push_back(a.adjacency);
    emit(json_payload(payload), std::move(manifest), g, out);
    return kExitOk;
}

struct SimulateArgs {
    std::string system;
    Index steps = 0;
    std::string x0;
    std::string x0_file;
    bool lift = false;
};

int cmd_simulate(const SimulateArgs& a, const Globals& g, std::ostream& out, std::ostream& err) {
    if (a.steps < 0) throw InputError("--steps must be nonnegative");
    const LoadedSystem s = load_system(a.system);
    json params{{"system", a.system}, {"steps", a.steps}, {"lift", a.lift}};
    json checks = json::object();
    Trajectory traj;
    Vector x0;
    if (s.coupled) {
        const CoupledCellSystem& sys = *s.cells;
        x0 = resolve_x0(a.x0, a.x0_file, 2 * sys.cells(), g.seed);
        const Trajectory nonlinear = simulate_coupled(sys, x0, a.steps);
        if (a.lift) {
            traj = project_lifted(simulate(koopman_lift(sys), lift_state(x0), a.steps));
            const double deviation = max_abs_deviation(traj.states, nonlinear.states);
            checks["lift_max_deviation"] = deviation;
            checks["lift_exact"] = deviation <= 1e-9;
        } else {
            traj = nonlinear;
        }
    } else {
        if (a.lift) throw InputError("--lift applies to coupled_cell systems only");
        x0 = resolve_x0(a.x0, a.x0_file, s.linear->dim(), g.seed);
        traj = simulate(*s.linear, x0, a.steps);
    }
    params["x0"] = vector_json(x0);
    json manifest = make_manifest("simulate", params, g);
    manifest["inputs"].push_back(a.system);
    if (!a.x0_file.empty()) manifest["inputs"].push_back(a.x0_file);
    manifest["checks"] = checks;
    emit(trajectory_csv(traj), std::move(manifest), g, out);
    if (checks.contains("lift_exact") && !checks["lift_exact"].get<bool>()) {
        err << json{{"error", {{"type", "check_failed"}, {"checks", checks}}}}.dump() << "\n";
        return kExitCheckFailed;
    }
    return kExitOk;
}

struct LocalizabilityArgs {
    std::string system;
    Index vertex = 0;
    bool all = false;
};

int cmd_localizability(const LocalizabilityArgs& a, const Globals& g, std::ostream& out) {
    const LoadedSystem s = load_system(a.system);
    const LinearSystem sys = s.coupled ? koopman_lift(*s.cells) : *s.linear;
    const Index n = sys.dim();
    std::vector<Index> vertices;
    if (a.vertex > 0 && !a.all) {
        vertices.push_back(to_vertex(a.vertex, n));
    } else {
        for (Index v = 0; v < n; ++v) vertices.push_back(v);
    }
    json reports = json::array();
    bool everywhere = true;
    for (Index v : vertices) {
        const auto report = is_localizable(sys, v, g.tol_rank);
        json entry = io::report_to_json(report);
        if (n >= 2) entry["hautus"] = hautus_localizable(sys, v, g.tol_rank);
        reports.push_back(std::move(entry));
        everywhere = everywhere && report.localizable;
    }
    json payload{{"n", n},
                 {"lifted", s.coupled},
                 {"strongly_connected", is_strongly_connected(dependency_graph(sys))},
                 {"vertices", reports}};
    if (vertices.size() == static_cast<std::size_t>(n)) payload["localizable_everywhere"] = everywhere;
    json manifest = make_manifest("localizability", {{"system", a.system}, {"vertex", a.vertex}, {"all", a.all}}, g);
    manifest["inputs"].push_back(a.system);
    emit(json_payload(payload), std::move(manifest), g, out);
    return kExitOk;
}

struct AnalyzeArgs {
    std::string trajectory;
    Index vertex = 1;
    Index delays = 0;
    double svd_tol = kDefaultRankTol;
    bool no_bipartite = false;
    double bipartite_tol = 1e-6;
    bool gap = false;
    Index max_k = 0;
    bool no_components = false;
};

int cmd_analyze(const AnalyzeArgs& a, const Globals& g, std::ostream& out) {
    const Trajectory traj = io::read_trajectory_csv(fs::path(a.trajectory));
    const Index v = to_vertex(a.vertex, traj.dim());
    const Index s = a.delays > 0 ? a.delays : traj.dim();
    AnalyzeOptions opts;
    opts.svd_tol = a.svd_tol;
    opts.distinct_tol = g.tol_distinct;
    opts.test_bipartite = !a.no_bipartite;
    opts.bipartite_tol = a.bipartite_tol;
    opts.detect_gap = a.gap;
    opts.max_k = a.max_k;
    opts.compute_components = !a.no_components;
    SpectralReport report = analyze_vertex(traj.local(v), s, opts);
    report.vertex = v;
    json manifest = make_manifest("analyze",
                                  {{"trajectory", a.trajectory},
                                   {"vertex", a.vertex},
                                   {"delays", s},
                                   {"svd_tol", opts.svd_tol},
                                   {"bipartite", opts.test_bipartite},
                                   {"bipartite_tol", opts.bipartite_tol},
                                   {"gap", opts.detect_gap},
                                   {"max_k", opts.max_k},
                                   {"components", opts.compute_components}},
                                  g);
    manifest["inputs"].push_back(a.trajectory);
    emit(json_payload(io::spectral_report_to_json(report)), std::move(manifest), g, out);
    return kExitOk;
}

struct ClusterArgs {
    std::string trajectory;
    Index delays = 0;
    std::string k = "auto";
    double svd_tol = ClusterOptions::default_analyze().svd_tol;
    Index max_k = 0;
    std::string components;
};

int cmd_cluster(const ClusterArgs& a, const Globals& g, std::ostream& out) {
    const Trajectory traj = io::read_trajectory_csv(fs::path(a.trajectory));
    const Index s = a.delays > 0 ? a.delays : traj.dim();
    ClusterOptions opts;
    opts.analyze.svd_tol = a.svd_tol;
    opts.analyze.distinct_tol = g.tol_distinct;
    opts.analyze.max_k = a.max_k;
    if (a.k != "auto") {
        const Vector k = parse_list(a.k);
        if (k.size() != 1 || k(0) < 1 || k(0) != std::floor(k(0))) throw InputError("--k must be auto or a positive integer");
        opts.k = static_cast<Index>(k(0));
    }
    const ClusterResult result = cluster_vertices(traj, s, opts);
    json manifest = make_manifest(
        "cluster", {{"trajectory", a.trajectory}, {"delays", s}, {"k", a.k}, {"max_k", a.max_k}}, g);
    manifest["inputs"].push_back(a.trajectory);
    if (!a.components.empty()) {
        write_text(a.components, components_csv(result));
        manifest["outputs"].push_back(a.components);
    }
    emit(json_payload(cluster_json(result, opts)), std::move(manifest), g, out);
    return kExitOk;
}

// ---------------------------------------------------------------------------
// Figure bundles. Graph/system draws use --seed, initial states use --seed + 1.

struct DemoArgs {
    std::string name;
    std::string outdir;
    std::string graph = "sbm";
};

struct Bundle {
    fs::path dir;
    json manifest;

    void write(const std::string& name, const std::string& text) {
        write_text(dir / name, text);
        manifest["outputs"].push_back((dir / name).string());
    }
};

std::string eigen_rows_csv(const std::vector<std::tuple<std::string, Index, Complex>>& rows) {
    std::vector<Row> out;
    for (const auto& [source, vertex, z] : rows) out.push_back({source, num(vertex), num(z.real()), num(z.imag())});
    return csv_table({"source", "vertex", "re", "im"}, out);
}

json demo_fig1(Bundle& b, const Globals& g) {
    const LinearSystem sys = bipartite_fixture();
    const Index n = sys.dim();
    const Vector x0 = random_normal_vector(n, g.seed + 1);
    const Trajectory traj = simulate(sys, x0, 4 * n - 1);
    const ComplexVector global = sort_spectrum(eigenvalues(sys.matrix()));

    std::vector<std::tuple<std::string, Index, Complex>> rows;
    for (Index i = 0; i < global.size(); ++i) rows.emplace_back("global", 0, global(i));
    json reports = json::array();
    bool symmetric = true;
    bool matches = true;
    for (Index v : {Index{0}, Index{2}, Index{4}}) {
        SpectralReport r = analyze_vertex(traj.local(v), n);
        r.vertex = v;
        for (Index i = 0; i < r.eigenvalues.size(); ++i) rows.emplace_back("local", v + 1, r.eigenvalues(i));
        symmetric = symmetric && r.bipartite.value_or(false);
        matches = matches && multiset_distance(r.eigenvalues, global) <= 1e-6;
        reports.push_back(io::spectral_report_to_json(r));
    }
    const auto everywhere = localizable_everywhere(sys, g.tol_rank);

    b.write("system.json", json_payload(io::system_to_json(sys)));
    b.write("trajectory.csv", trajectory_csv(traj));
    b.write("eigenvalues.csv", eigen_rows_csv(rows));
    json checks{{"localizable_everywhere", everywhere.localizable},
                {"local_spectra_negation_symmetric", symmetric},
                {"local_spectra_match_global", matches}};
    json analysis{{"x0", vector_json(x0)},
                  {"x0_seed", g.seed + 1},
                  {"global_eigenvalues", io::complex_list_to_json(global)},
                  {"bipartite_global", is_bipartite_spectrum(global, 1e-6)},
                  {"vertices", reports},
                  {"checks", checks}};
    b.write("analysis.json", json_payload(analysis));
    return checks;
}

json demo_fig2(Bundle& b, const Globals& g, const std::string& graph_kind) {
    SbmGraph graph;
    if (graph_kind == "sbm") {
        SbmParams p;
        p.cluster_sizes = {5, 5, 5};
        p.require_connected = true;
        graph = generate_sbm(p, g.seed);
    } else if (graph_kind == "drawn") {
        graph = drawn_cluster_graph();
    } else {
        throw InputError("--graph must be sbm or drawn");
    }
    const Matrix L = normalized_laplacian(graph.adjacency);
    const LinearSystem sys = laplacian_dynamics(L);
    const Index n = sys.dim();
    const Vector x0 = random_normal_vector(n, g.seed + 1);
    const Trajectory traj = simulate(sys, x0, 4 * n - 1);

    ClusterOptions opts;
    opts.analyze.distinct_tol = g.tol_distinct;
    const ClusterResult result = cluster_vertices(traj, n, opts);

    Eigen::SelfAdjointEigenSolver<Matrix> solver(L);
    std::vector<Row> spectrum;
    for (Index i = 0; i < n; ++i) {
        const double mu = solver.eigenvalues()(i);
        spectrum.push_back({num(i + 1), num(mu), num(1.0 - 0.5 * mu)});
    }
    std::vector<std::tuple<std::string, Index, Complex>> rows;
    for (const auto& r : result.reports) {
        for (Index i = 0; i < r.eigenvalues.size(); ++i) rows.emplace_back("local", r.vertex + 1, r.eigenvalues(i));
    }

    // Direct reference: exact dynamics spectrum and eigenvector components
    // V(v, l) z_l with z = V^T x0 (L is symmetric, V orthonormal).
    const Vector mu = solver.eigenvalues();
    const Vector z = solver.eigenvectors().transpose() * x0;
    std::vector<double> exact_dynamics;
    for (Index i = 0; i < n; ++i) exact_dynamics.push_back(1.0 - 0.5 * mu(i));
    const Index k_exact = detect_cluster_count(exact_dynamics, (n + 1) / 2);
    std::vector<ComplexVector> exact_components(static_cast<std::size_t>(n), ComplexVector(n));
    for (Index v = 0; v < n; ++v) {
        for (Index l = 0; l < n; ++l) exact_components[static_cast<std::size_t>(v)](l) = solver.eigenvectors()(v, l) * z(l);
    }
    const auto exact_labels = decentralized_cluster_labels(exact_components, result.k, opts.sign_tol);

    const auto blocks = static_cast<Index>(std::set<Index>(graph.block.begin(), graph.block.end()).size());
    json checks{{"cluster_count_matches_exact_spectrum", result.k == k_exact},
                {"labels_match_exact_eigenvectors", same_partition(result.labels, exact_labels)}};
    const bool blocks_recovered = result.k == blocks && same_partition(result.labels, graph.block);

    b.write("adjacency.json", json_payload(io::adjacency_to_json(graph.adjacency, graph.block)));
    b.write("trajectory.csv", trajectory_csv(traj));
    b.write("laplacian_spectrum.csv", csv_table({"index", "laplacian", "dynamics"}, spectrum));
    b.write("local_eigenvalues.csv", eigen_rows_csv(rows));
    b.write("components.csv", components_csv(result));
    b.write("labels.json", json_payload(io::labels_to_json(result.labels)));
    json analysis = cluster_json(result, opts);
    analysis.update({{"graph", graph_kind},
                     {"x0", vector_json(x0)},
                     {"x0_seed", g.seed + 1},
                     {"blocks", graph.block},
                     {"exact_cluster_count", k_exact},
                     {"blocks_recovered", blocks_recovered},
                     {"sbm_attempts", graph.attempts},
                     {"checks", checks}});
    b.write("analysis.json", json_payload(analysis));
    return checks;
}

json demo_fig3(Bundle& b, const Globals& g) {
    const CoupledCellSystem sys = coupled_cell_fixture(g.seed);
    const LinearSystem lift = koopman_lift(sys);
    const Index s = lift.dim();
    const Index training = 4 * s;
    const Index horizon = 50;
    const Vector x0 = random_normal_vector(2 * sys.cells(), g.seed + 1);
    const Index steps = training + horizon - 1;
    const Trajectory nonlinear = simulate_coupled(sys, x0, steps);
    const Trajectory lifted = project_lifted(simulate(lift, lift_state(x0), steps));
    const double lift_deviation = max_abs_deviation(lifted.states, nonlinear.states);

    // Model from the first `training` samples of x_{1,1}; the localized curve
    // is that model run forward from the first window alone.
    const Vector u = nonlinear.local(0);
    const CompanionModel model = fit_companion(u.head(training), s);
    const Vector localized = predict(model, u.head(s), u.size() - s);
    const double in_sample = growth_normalized_error(localized.head(training), u.head(training));
    const Vector forecast = predict(model, u.segment(training - s, s), horizon);
    const double out_of_sample = growth_normalized_error(forecast.tail(horizon), u.tail(horizon));

    std::vector<Row> rows;
    for (Index k = 0; k < u.size(); ++k) {
        rows.push_back({num(k), num(u(k)), num(lifted.states(k, 0)), num(localized(k))});
    }
    json checks{{"lift_max_deviation", lift_deviation},
                {"lift_exact", lift_deviation <= 1e-9},
                {"prediction_error", out_of_sample},
                {"prediction_within_tolerance", out_of_sample <= 1e-4}};

    b.write("system.json", json_payload(io::coupled_to_json(sys)));
    b.write("x11.csv", csv_table({"k", "nonlinear", "lifted", "localized"}, rows));
    json analysis{{"x0", vector_json(x0)},
                  {"x0_seed", g.seed + 1},
                  {"delays", s},
                  {"training_samples", training},
                  {"horizon", horizon},
                  {"model", io::companion_to_json(model)},
                  {"localized_error", in_sample},
                  {"lifted_localizable_x11", is_localizable(lift, 0, g.tol_rank).localizable},
                  {"checks", checks}};
    b.write("analysis.json", json_payload(analysis));
    return checks;
}

int cmd_demo(const DemoArgs& a, const Globals& g, std::ostream& out, std::ostream& err) {
    if (a.outdir.empty()) throw InputError("demo needs --outdir");
    Bundle b{a.outdir, make_manifest("demo", {{"name", a.name}, {"outdir", a.outdir}, {"graph", a.graph}}, g)};
    fs::create_directories(b.dir);
    json checks;
    if (a.name == "fig1") {
        checks = demo_fig1(b, g);
    } else if (a.name == "fig2") {
        checks = demo_fig2(b, g, a.graph);
    } else if (a.name == "fig3") {
        checks = demo_fig3(b, g);
    } else {
        throw InputError("unknown demo '" + a.name + "' (fig1, fig2, fig3)");
    }
    b.manifest["checks"] = checks;
    finish_manifest(b.manifest, g);
    write_text(b.dir / "manifest.json", b.manifest.dump(2) + "\n");

    bool ok = true;
    for (const auto& [key, value] : checks.items()) {
        if (value.is_boolean() && !value.get<bool>()) ok = false;
    }
    if (!g.quiet) out << a.name << " bundle written to " << a.outdir << "\n";
    if (!ok) {
        err << json{{"error", {{"type", "check_failed"}, {"checks", checks}}}}.dump() << "\n";
        return kExitCheckFailed;
    }
    return kExitOk;
}

std::string error_type(const std::exception& e) {
    if (dynamic_cast<const LocalizabilityError*>(&e)) return "not_localizable";
    if (dynamic_cast<const DegenerateSpectrumError*>(&e)) return "degenerate_spectrum";
    if (dynamic_cast<const GenerationError*>(&e)) return "generation_failed";
    if (dynamic_cast<const NumericError*>(&e)) return "numeric";
    if (dynamic_cast<const InputError*>(&e)) return "input";
    if (dynamic_cast<const json::exception*>(&e)) return "input";
    if (dynamic_cast<const fs::filesystem_error*>(&e)) return "io";
    return "internal";
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Globals g;
    g.started = std::chrono::steady_clock::now();
    g.started_utc = utc_now();

    CLI::App app{"Local delay embeddings of networked linear systems", "lde"};
    app.fallthrough();
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(LDE_VERSION));
    app.add_option("--seed", g.seed, "Seed for every random draw")->capture_default_str();
    app.add_option("--out", g.out, "Output file (stdout when omitted)");
    app.add_option("--tol-rank", g.tol_rank, "Relative rank tolerance")->capture_default_str();
    app.add_option("--tol-distinct", g.tol_distinct, "Eigenvalue distinctness tolerance")->capture_default_str();
    app.add_flag("--quiet", g.quiet, "Suppress progress lines");

    GenerateArgs gen;
    auto* generate = app.add_subcommand("generate", "Write a system or adjacency file");
    generate->add_option("kind", gen.kind, "sbm | drawn | bipartite | coupled | wave | laplacian | random")->required();
    generate->add_option("--sizes", gen.sizes, "SBM cluster sizes")->capture_default_str();
    generate->add_option("--intra-p", gen.sbm.intra_p)->capture_default_str();
    generate->add_option("--inter-p", gen.sbm.inter_p)->capture_default_str();
    generate->add_option("--intra-weight", gen.sbm.intra_weight)->capture_default_str();
    generate->add_option("--inter-weight", gen.sbm.inter_weight)->capture_default_str();
    generate->add_option("--max-retries", gen.sbm.max_retries)->capture_default_str();
    generate->add_flag("--connected", gen.sbm.require_connected, "Resample disconnected SBM draws");
    generate->add_option("--adjacency", gen.adjacency, "Adjacency file for wave/laplacian");
    generate->add_option("--c", gen.c, "Wave speed")->capture_default_str();
    generate->add_option("--n", gen.n, "Dimension for random systems");

    SimulateArgs sim;
    auto* simulate_cmd = app.add_subcommand("simulate", "Simulate a system file to a trajectory CSV");
    simulate_cmd->add_option("--system", sim.system)->required();
    simulate_cmd->add_option("--steps", sim.steps)->required();
    simulate_cmd->add_option("--x0", sim.x0, "Comma-separated initial state (numbers or p/q)");
    simulate_cmd->add_option("--x0-file", sim.x0_file, "JSON array or {\"x0\": [...]}");
    simulate_cmd->add_flag("--lift", sim.lift, "Coupled cells: simulate the lifted linear system");

    LocalizabilityArgs loc;
    auto* loc_cmd = app.add_subcommand("localizability", "Rank test on R per vertex");
    loc_cmd->add_option("--system", loc.system)->required();
    auto* vertex_opt = loc_cmd->add_option("--vertex", loc.vertex, "1-based vertex");
    loc_cmd->add_flag("--all", loc.all, "Every vertex (default)")->excludes(vertex_opt);

    AnalyzeArgs an;
    auto* analyze_cmd = app.add_subcommand("analyze", "Spectral report from one vertex's trajectory");
    analyze_cmd->add_option("--trajectory", an.trajectory)->required();
    analyze_cmd->add_option("--vertex", an.vertex, "1-based vertex")->required();
    analyze_cmd->add_option("--delays", an.delays, "Delay count s (default: trajectory dimension)");
    analyze_cmd->add_option("--svd-tol", an.svd_tol)->capture_default_str();
    analyze_cmd->add_flag("--no-bipartite", an.no_bipartite);
    analyze_cmd->add_option("--bipartite-tol", an.bipartite_tol)->capture_default_str();
    analyze_cmd->add_flag("--gap", an.gap, "Detect the cluster count from the spectral gap");
    analyze_cmd->add_option("--max-k", an.max_k, "Gap search bound (default ceil(s/2))");
    analyze_cmd->add_flag("--no-components", an.no_components);

    ClusterArgs cl;
    auto* cluster_cmd = app.add_subcommand("cluster", "Per-vertex analysis and sign-pattern labels");
    cluster_cmd->add_option("--trajectory", cl.trajectory)->required();
    cluster_cmd->add_option("--delays", cl.delays, "Delay count s (default: trajectory dimension)");
    cluster_cmd->add_option("--k", cl.k, "auto or a fixed cluster count")->capture_default_str();
    cluster_cmd->add_option("--svd-tol", cl.svd_tol)->capture_default_str();
    cluster_cmd->add_option("--max-k", cl.max_k, "Gap search bound (default ceil(s/2))");
    cluster_cmd->add_option("--components", cl.components, "Per-vertex component CSV");

    DemoArgs demo;
    auto* demo_cmd = app.add_subcommand("demo", "Write a figure data bundle");
    demo_cmd->add_option("name", demo.name, "fig1 | fig2 | fig3")->required();
    demo_cmd->add_option("--outdir", demo.outdir)->required();
    demo_cmd->add_option("--graph", demo.graph, "fig2 graph: sbm | drawn")->capture_default_str();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << LDE_VERSION << "\n";
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << json{{"error", {{"type", "usage"}, {"message", e.what()}}}}.dump() << "\n";
        return kExitError;
    }

    try {
        if (*generate) return cmd_generate(gen, g, out);
        if (*simulate_cmd) return cmd_simulate(sim, g, out, err);
        if (*loc_cmd) return cmd_localizability(loc, g, out);
        if (*analyze_cmd) return cmd_analyze(an, g, out);
        if (*cluster_cmd) return cmd_cluster(cl, g, out);
        if (*demo_cmd) return cmd_demo(demo, g, out, err);
    } catch (const LocalizabilityError& e) {
        err << json{{"error", {{"type", error_type(e)}, {"message", e.what()}, {"singular_values", e.singular_values()}}}}
                   .dump()
            << "\n";
        return kExitError;
    } catch (const std::exception& e) {
        err << json{{"error", {{"type", error_type(e)}, {"message", e.what()}}}}.dump() << "\n";
        return kExitError;
    }
    return kExitError;
}

}  // namespace lde::cli
