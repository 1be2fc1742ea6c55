#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "commands.hpp"
#include "lde/dynsys.hpp"
#include "lde/io.hpp"
#include "oracles.hpp"

using namespace lde;
using lde::io::json;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    Run r;
    r.code = cli::run_cli(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("lde_test_cli_" + tag);
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::string fixture(const std::string& name) { return std::string(LDE_FIXTURE_DIR) + "/" + name; }

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<Index> labels_of(const json& doc) {
    std::vector<Index> out;
    for (const auto& e : doc.at("labels")) out.push_back(e.at("cluster").get<Index>());
    return out;
}

void check_error(const Run& r, const std::string& type) {
    CHECK(r.code == cli::kExitError);
    const json e = json::parse(r.err);
    CHECK(e.at("error").at("type") == type);
    CHECK(e.at("error").contains("message"));
}

}  // namespace

TEST_CASE("help and version") {
    const Run h = run({"--help"});
    CHECK(h.code == cli::kExitOk);
    CHECK(h.out.find("localizability") != std::string::npos);
    const Run v = run({"--version"});
    CHECK(v.code == cli::kExitOk);
    CHECK(v.out == std::string(LDE_VERSION) + "\n");
}

TEST_CASE("generate bipartite writes the shipped fixture") {
    const Run r = run({"generate", "bipartite"});
    REQUIRE(r.code == cli::kExitOk);
    const LinearSystem sys = io::system_from_json(json::parse(r.out));
    CHECK(sys.matrix() == bipartite_fixture().matrix());
    auto edges = bipartite_fixture_edges();
    std::sort(edges.begin(), edges.end());
    CHECK(dependency_graph(sys).edges == edges);
    CHECK(io::system_from_json(io::read_json(fixture("bipartite.json"))).matrix() == sys.matrix());
}

TEST_CASE("generate sbm is deterministic in the seed and writes a manifest") {
    TempDir dir("sbm");
    for (const char* name : {"a.json", "b.json"}) {
        const Run r = run({"--seed", "7", "--out", dir / name, "generate", "sbm", "--sizes", "5,5,5"});
        REQUIRE(r.code == cli::kExitOk);
    }
    CHECK(slurp(dir / "a.json") == slurp(dir / "b.json"));
    const json doc = io::read_json(dir / "a.json");
    CHECK(doc.at("n") == 15);
    CHECK(doc.at("blocks").size() == 15);
    const Matrix W = io::adjacency_from_json(doc);
    CHECK(W == W.transpose());
    CHECK(W.diagonal().isZero());

    const json manifest = io::read_json(dir / "a.json.manifest.json");
    CHECK(manifest.at("command") == "generate");
    CHECK(manifest.at("seed") == 7);
    CHECK(manifest.at("parameters").at("sizes") == json::array({5, 5, 5}));
    CHECK(manifest.at("version") == LDE_VERSION);
    CHECK(manifest.at("timing").contains("wall_seconds"));
    CHECK(manifest.at("outputs").at(0) == dir / "a.json");

    const Run other = run({"--seed", "8", "generate", "sbm"});
    CHECK(other.out != slurp(dir / "a.json"));
}

TEST_CASE("generate coupled records epsilon") {
    TempDir dir("coupled");
    REQUIRE(run({"--seed", "3", "--out", dir / "c.json", "generate", "coupled"}).code == cli::kExitOk);
    const json doc = io::read_json(dir / "c.json");
    CHECK(doc.at("kind") == "coupled_cell");
    CHECK(doc.at("d") == 4);
    CHECK(doc.at("epsilon") == 0.1);
    CHECK(io::coupled_from_json(doc).cells() == 4);
    CHECK(io::read_json(dir / "c.json.manifest.json").at("parameters").at("epsilon") == 0.1);
}

TEST_CASE("simulate") {
    const Run id = run({"simulate", "--system", fixture("identity3.json"), "--steps", "4", "--x0", "1,-1/2,3/5"});
    REQUIRE(id.code == cli::kExitOk);
    std::istringstream in(id.out);
    const Trajectory t = io::read_trajectory_csv(in);
    REQUIRE(t.steps() == 4);
    for (Index k = 0; k <= 4; ++k) CHECK(t.states.row(k) == Eigen::RowVector3d(1, -0.5, 0.6));

    const Run seeded = run({"--seed", "5", "simulate", "--system", fixture("bipartite.json"), "--steps", "3"});
    std::istringstream sin(seeded.out);
    CHECK(io::read_trajectory_csv(sin).states.row(0) == random_normal_vector(6, 5).transpose());

    check_error(run({"simulate", "--system", fixture("identity3.json"), "--steps", "4", "--x0", "1,2"}), "input");
    check_error(run({"simulate", "--system", fixture("identity3.json"), "--steps", "4", "--lift"}), "input");
    check_error(run({"simulate", "--system", fixture("fig2_graph.json"), "--steps", "4"}), "input");
}

TEST_CASE("simulate --lift on coupled cells matches the nonlinear map") {
    TempDir dir("lift");
    REQUIRE(run({"--seed", "2", "--out", dir / "c.json", "generate", "coupled"}).code == cli::kExitOk);
    const Run plain = run({"simulate", "--system", dir / "c.json", "--steps", "50"});
    const Run lifted = run({"--out", dir / "l.csv", "simulate", "--system", dir / "c.json", "--steps", "50", "--lift"});
    REQUIRE(plain.code == cli::kExitOk);
    REQUIRE(lifted.code == cli::kExitOk);
    std::istringstream pin(plain.out);
    const Trajectory a = io::read_trajectory_csv(pin);
    const Trajectory b = io::read_trajectory_csv(fs::path(dir / "l.csv"));
    CHECK((a.states - b.states).cwiseAbs().maxCoeff() <= 1e-9);
    const json checks = io::read_json(dir / "l.csv.manifest.json").at("checks");
    CHECK(checks.at("lift_exact") == true);
    CHECK(checks.at("lift_max_deviation").get<double>() <= 1e-9);
}

TEST_CASE("localizability") {
    for (const char* name : {"three_vertex_left.json", "three_vertex_middle.json", "three_vertex_right.json"}) {
        const Run r = run({"localizability", "--system", fixture(name), "--vertex", "1"});
        REQUIRE(r.code == cli::kExitOk);
        const json doc = json::parse(r.out);
        const json& v = doc.at("vertices").at(0);
        CHECK(v.at("vertex") == 1);
        CHECK(v.at("numeric_rank") == 1);
        CHECK(v.at("localizable") == false);
        CHECK(v.at("hautus") == false);
        CHECK_FALSE(doc.contains("localizable_everywhere"));
    }
    const json id = json::parse(run({"localizability", "--system", fixture("identity3.json")}).out);
    CHECK(id.at("localizable_everywhere") == false);
    CHECK(id.at("strongly_connected") == false);
    for (const auto& v : id.at("vertices")) CHECK(v.at("localizable") == false);

    TempDir dir("loc");
    REQUIRE(run({"--seed", "3", "--out", dir / "r.json", "generate", "random", "--n", "6"}).code == cli::kExitOk);
    const json rnd = json::parse(run({"localizability", "--system", dir / "r.json", "--all"}).out);
    CHECK(rnd.at("localizable_everywhere") == true);
    CHECK(rnd.at("vertices").size() == 6);

    check_error(run({"localizability", "--system", fixture("identity3.json"), "--vertex", "4"}), "input");
    check_error(run({"localizability", "--system", dir / "missing.json"}), "input");
}

TEST_CASE("analyze: bipartite fixture and geometric sequence") {
    TempDir dir("analyze");
    REQUIRE(run({"--out", dir / "t.csv", "simulate", "--system", fixture("bipartite.json"), "--steps", "23"}).code ==
            cli::kExitOk);
    for (const char* v : {"1", "3", "5"}) {
        const Run r = run({"analyze", "--trajectory", dir / "t.csv", "--vertex", v});
        REQUIRE(r.code == cli::kExitOk);
        const json doc = json::parse(r.out);
        CHECK(doc.at("bipartite") == true);
        CHECK(doc.at("eigenvalues").size() == 6);
        CHECK(doc.at("model").at("s") == 6);
    }
    const json nob = json::parse(run({"analyze", "--trajectory", dir / "t.csv", "--vertex", "1", "--no-bipartite",
                                      "--no-components"})
                                     .out);
    CHECK(nob.at("bipartite").is_null());
    CHECK_FALSE(nob.contains("components"));

    {
        std::ofstream geo(dir / "g.csv");
        geo << "k,x1\n";
        double x = 3.0;
        for (int k = 0; k < 8; ++k, x *= 0.5) geo << k << "," << io::format_double(x) << "\n";
    }
    const json g = json::parse(run({"analyze", "--trajectory", dir / "g.csv", "--vertex", "1", "--delays", "1"}).out);
    CHECK(g.at("eigenvalues").at(0).at("re").get<double>() == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(g.at("eigenvalues").at(0).at("im") == 0.0);
    CHECK(g.at("components").at(0).at("re").get<double>() == doctest::Approx(3.0).epsilon(1e-12));

    check_error(run({"analyze", "--trajectory", dir / "t.csv", "--vertex", "7"}), "input");
    check_error(run({"analyze", "--trajectory", dir / "t.csv", "--vertex", "1", "--delays", "20"}), "input");
}

TEST_CASE("analyze --gap and cluster on the drawn three-cluster graph") {
    TempDir dir("drawn");
    const std::string graph = fixture("fig2_graph.json");
    REQUIRE(run({"--out", dir / "sys.json", "generate", "laplacian", "--adjacency", graph}).code == cli::kExitOk);
    REQUIRE(run({"--seed", "4", "--out", dir / "t.csv", "simulate", "--system", dir / "sys.json", "--steps", "59"})
                .code == cli::kExitOk);
    for (int v = 1; v <= 15; ++v) {
        const json doc = json::parse(
            run({"analyze", "--trajectory", dir / "t.csv", "--vertex", std::to_string(v), "--gap", "--svd-tol", "1e-15"})
                .out);
        CHECK(doc.at("cluster_count") == 3);
    }

    const Run r = run({"cluster", "--trajectory", dir / "t.csv", "--components", dir / "comp.csv"});
    REQUIRE(r.code == cli::kExitOk);
    const json doc = json::parse(r.out);
    CHECK(doc.at("k") == 3);
    const std::vector<Index> labels = labels_of(doc);
    const SbmGraph drawn = drawn_cluster_graph();
    CHECK(same_partition(labels, drawn.block));
    const Vector x0 = random_normal_vector(15, 4);
    CHECK(oracle::same_partition(labels, oracle::sign_labels(normalized_laplacian(drawn.adjacency), x0, 3)));
    CHECK(std::set<Index>(labels.begin(), labels.end()).size() == 3);
    CHECK(slurp(dir / "comp.csv").rfind("vertex,mode,eig_re,eig_im,c_re,c_im\n1,1,", 0) == 0);

    const json one = json::parse(run({"cluster", "--trajectory", dir / "t.csv", "--k", "1"}).out);
    CHECK(one.at("k") == 1);
    for (Index l : labels_of(one)) CHECK(l == 0);
    check_error(run({"cluster", "--trajectory", dir / "t.csv", "--k", "zero"}), "input");
    check_error(run({"cluster", "--trajectory", dir / "t.csv", "--k", "1.5"}), "input");
}

TEST_CASE("cluster: two disconnected cliques give two clusters") {
    TempDir dir("cliques");
    Matrix W = Matrix::Zero(8, 8);
    for (Index a : {0, 4})
        for (Index i = a; i < a + 4; ++i)
            for (Index j = a; j < a + 4; ++j)
                if (i != j) W(i, j) = 1.0;
    io::write_json(dir / "adj.json", io::adjacency_to_json(W));
    REQUIRE(run({"--out", dir / "sys.json", "generate", "laplacian", "--adjacency", dir / "adj.json"}).code ==
            cli::kExitOk);
    REQUIRE(run({"--out", dir / "t.csv", "simulate", "--system", dir / "sys.json", "--steps", "31"}).code ==
            cli::kExitOk);
    const Run r = run({"cluster", "--trajectory", dir / "t.csv"});
    REQUIRE(r.code == cli::kExitOk);
    const json doc = json::parse(r.out);
    CHECK(doc.at("k") == 2);
    CHECK(same_partition(labels_of(doc), {0, 0, 0, 0, 1, 1, 1, 1}));
}

TEST_CASE("demo bundles") {
    TempDir dir("demo");
    const Run f1 = run({"demo", "fig1", "--outdir", dir / "fig1"});
    CHECK(f1.code == cli::kExitOk);
    const json a1 = io::read_json(dir / "fig1/analysis.json");
    CHECK(a1.at("checks").at("local_spectra_negation_symmetric") == true);
    CHECK(a1.at("checks").at("localizable_everywhere") == true);
    CHECK(a1.at("bipartite_global") == true);
    for (const char* f : {"system.json", "trajectory.csv", "eigenvalues.csv", "manifest.json"})
        CHECK(fs::exists(dir.path / "fig1" / f));

    const Run f2 = run({"demo", "fig2", "--outdir", dir / "fig2", "--graph", "drawn"});
    CHECK(f2.code == cli::kExitOk);
    const json labels = io::read_json(dir / "fig2/labels.json");
    CHECK(labels.size() == 15);
    std::vector<Index> ids;
    for (const auto& e : labels) ids.push_back(e.at("cluster").get<Index>());
    CHECK(std::set<Index>(ids.begin(), ids.end()).size() == 3);
    CHECK(io::read_json(dir / "fig2/analysis.json").at("blocks_recovered") == true);

    const Run f3 = run({"demo", "fig3", "--outdir", dir / "fig3"});
    CHECK(f3.code == cli::kExitOk);
    std::ifstream x11(dir.path / "fig3/x11.csv");
    std::string line;
    std::getline(x11, line);
    CHECK(line == "k,nonlinear,lifted,localized");
    int rows = 0;
    while (std::getline(x11, line)) {
        std::vector<double> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(io::parse_scalar(std::string_view(cell)));
        REQUIRE(cells.size() == 4);
        CHECK(std::abs(cells[1] - cells[2]) <= 1e-9);
        ++rows;
    }
    CHECK(rows == 4 * 12 + 50 - 1 + 1);
    const json m3 = io::read_json(dir / "fig3/manifest.json");
    CHECK(m3.at("checks").at("lift_exact") == true);
    CHECK(m3.at("checks").at("prediction_within_tolerance") == true);

    check_error(run({"demo", "fig9", "--outdir", dir / "x"}), "input");
    check_error(run({"demo", "fig2", "--outdir", dir / "x", "--graph", "ring"}), "input");
}

TEST_CASE("demo outputs are byte-identical across runs") {
    TempDir dir("determinism");
    for (const char* name : {"fig1", "fig2", "fig3"}) {
        for (const char* rep : {"a", "b"}) {
            REQUIRE(run({"--seed", "11", "demo", name, "--outdir", dir / (std::string(name) + rep)}).code ==
                    cli::kExitOk);
        }
        const fs::path a = dir.path / (std::string(name) + "a");
        const fs::path b = dir.path / (std::string(name) + "b");
        int compared = 0;
        for (const auto& entry : fs::directory_iterator(a)) {
            const std::string file = entry.path().filename().string();
            if (file == "manifest.json") continue;
            CHECK_MESSAGE(slurp(entry.path()) == slurp(b / file), name << "/" << file);
            ++compared;
        }
        CHECK(compared >= 3);
    }
}

TEST_CASE("usage and input errors") {
    check_error(run({}), "usage");
    check_error(run({"frobnicate"}), "usage");
    check_error(run({"simulate", "--steps", "3"}), "usage");
    check_error(run({"generate", "torus"}), "input");
    check_error(run({"generate", "sbm", "--sizes", "5,0"}), "input");
    check_error(run({"generate", "sbm", "--sizes", "5,x"}), "input");
    check_error(run({"generate", "random"}), "input");
    check_error(run({"generate", "wave"}), "input");
    check_error(run({"--seed", "1", "generate", "sbm", "--sizes", "3,3", "--intra-p", "0", "--connected",
                     "--max-retries", "2"}),
                "generation_failed");
    check_error(run({"generate", "sbm", "--intra-p", "1.5"}), "input");
}
