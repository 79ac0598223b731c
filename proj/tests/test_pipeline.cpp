#include <doctest.h>

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <string>
#include <vector>

#include "travmap/config.hpp"
#include "travmap/io.hpp"
#include "travmap/pipeline.hpp"

using namespace travmap;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        static std::atomic<int> counter{0};
        path = fs::temp_directory_path() /
               ("travmap_cli_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter.fetch_add(1)));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

int count_data_rows(const std::string& csv_path) {
    const auto text = io::read_text_file(csv_path);
    int rows = -1;  // discount the header
    for (char ch : text)
        if (ch == '\n') ++rows;
    return rows;
}

}  // namespace

TEST_CASE("argument errors exit 1, help exits 0") {
    CHECK(cli::run({}) == 1);                       // no subcommand
    CHECK(cli::run({"frobnicate"}) == 1);           // unknown subcommand
    CHECK(cli::run({"gen"}) == 1);                  // missing required --out
    CHECK(cli::run({"evaluate", "--grid", "x"}) == 1);
    CHECK(cli::run({"--help"}) == 0);
    CHECK(cli::run({"gen", "--help"}) == 0);
}

TEST_CASE("missing input files exit 1") {
    TempDir tmp;
    CHECK(cli::run({"fuse", "--cloud", tmp.file("none.csv"), "--cube", tmp.file("none.bin"),
                    "--rig", tmp.file("none.ini"), "--out", tmp.file("out.csv")}) == 1);
    CHECK(cli::run({"map", "--clouds", tmp.file("none.txt"), "--out-prefix",
                    tmp.file("grid")}) == 1);
    CHECK(cli::run({"bench", "--map", tmp.file("none.csv")}) == 1);
}

TEST_CASE("gen rejects conflicting or unknown scene selectors") {
    TempDir tmp;
    CHECK(cli::run({"gen", "--preset", "golden", "--spec", tmp.file("s.ini"), "--out",
                    tmp.file("out")}) == 1);
    CHECK(cli::run({"gen", "--preset", "atlantis", "--out", tmp.file("out")}) == 1);
    CHECK(cli::run({"gen", "--out", tmp.file("out")}) == 1);  // neither selector
}

TEST_CASE("config overrides are applied and validated") {
    TempDir tmp;
    // Unknown key fails up front.
    CHECK(cli::run({"gen", "--preset", "golden", "--out", tmp.file("x"), "--set",
                    "robot.flux=1"}) == 1);
    CHECK(cli::run({"gen", "--preset", "golden", "--out", tmp.file("x"), "--set",
                    "robot.mass_kg=-5"}) == 1);  // fails validation

    // A config file plus an override; the override wins.
    io::write_text_file(tmp.file("cfg.ini"), "[robot]\nmass_kg = 300\n");
    PipelineConfig config = load_pipeline_config(tmp.file("cfg.ini"));
    CHECK(config.robot.mass_kg == 300.0);
    apply_config_override(config, "robot.mass_kg=500");
    CHECK(config.robot.mass_kg == 500.0);
    CHECK_THROWS_AS(apply_config_override(config, "nonsense"), InputError);
    CHECK_THROWS_AS(apply_config_override(config, "robot=5"), InputError);
}

TEST_CASE("golden workflow: gen, fuse, bench, map, evaluate") {
    TempDir tmp;
    const std::string dir = tmp.file("run");

    REQUIRE(cli::run({"gen", "--preset", "golden", "--out", dir, "--prefix", "g"}) == 0);
    for (const char* name :
         {"g_spec.ini", "g_labeled.csv", "g_cloud.csv", "g_rig.ini", "g_cube.bin",
          "g_truth_grid.csv", "g_truth_grid.json", "g_truth_grid.pgm", "g_poses.txt",
          "g_candidates.json"})
        CHECK(fs::exists(fs::path(dir) / name));

    const auto in = [&](const std::string& name) { return (fs::path(dir) / name).string(); };

    REQUIRE(cli::run({"fuse", "--cloud", in("g_cloud.csv"), "--cube", in("g_cube.bin"), "--rig",
                      in("g_rig.ini"), "--out", in("g_aug.csv")}) == 0);
    CHECK(count_data_rows(in("g_aug.csv")) == count_data_rows(in("g_cloud.csv")));

    // The overhead rig sees the whole scene, so nearly every point fuses.
    const auto aug = io::load_augmented_csv(in("g_aug.csv"));
    std::size_t with_spectrum = 0;
    for (const auto& p : aug.points)
        if (p.reflectance) ++with_spectrum;
    CHECK(with_spectrum > aug.points.size() * 9 / 10);

    REQUIRE(cli::run({"bench", "--map", in("g_labeled.csv"), "--out-csv", in("g_bench.csv"),
                      "--out-table", in("g_bench.txt")}) == 0);
    CHECK(count_data_rows(in("g_bench.csv")) == 13);
    CHECK(io::read_text_file(in("g_bench.txt")).find("ndvi") != std::string::npos);

    REQUIRE(cli::run({"map", "--clouds", in("g_poses.txt"), "--out-prefix", in("g_grid")}) == 0);
    const auto grid = io::load_grid(in("g_grid"));
    CHECK(grid.width > 1);
    CHECK(grid.height > 1);

    // Rebuilding the grid is byte-identical.
    REQUIRE(cli::run({"map", "--clouds", in("g_poses.txt"), "--out-prefix", in("g_grid2")}) == 0);
    CHECK(io::read_text_file(in("g_grid2.csv")) == io::read_text_file(in("g_grid.csv")));
    CHECK(io::read_text_file(in("g_grid2.json")) == io::read_text_file(in("g_grid.json")));

    REQUIRE(cli::run({"evaluate", "--grid", in("g_grid"), "--candidates", in("g_candidates.json"),
                      "--out-prefix", in("g_cost")}) == 0);
    CHECK(count_data_rows(in("g_cost.csv")) == 3);
    const auto cost_csv = io::read_text_file(in("g_cost.csv"));
    CHECK(cost_csv.find(",1\n") != std::string::npos);  // something got selected
    CHECK(fs::exists(in("g_cost.json")));
    CHECK(fs::exists(in("g_cost.pgm")));
}

TEST_CASE("gen accepts a hand-written scene spec") {
    TempDir tmp;
    io::write_text_file(tmp.file("scene.ini"),
                        "[scene]\n"
                        "seed = 21\n"
                        "extent_x = 3\n"
                        "extent_y = 2\n"
                        "[primitive]\n"
                        "shape = heightfield\n"
                        "label = Track\n"
                        "density = 50\n"
                        "z = 0 0.02\n"
                        "rect = 0 0 3 2\n"
                        "[primitive]\n"
                        "shape = box\n"
                        "label = Grass\n"
                        "density = 100\n"
                        "z = 0.1 0.4\n"
                        "rect = 1 0.5 2 1.5\n");
    const std::string dir = tmp.file("out");
    REQUIRE(cli::run({"gen", "--spec", tmp.file("scene.ini"), "--out", dir}) == 0);
    CHECK(fs::exists(fs::path(dir) / "scene_labeled.csv"));
    CHECK(!fs::exists(fs::path(dir) / "scene_candidates.json"));  // golden-only artifact

    const auto spec = io::load_scene_spec((fs::path(dir) / "scene_spec.ini").string());
    CHECK(spec.seed == 21);
    CHECK(spec.primitives.size() == 2);
}

TEST_CASE("evaluate scores a free path at alpha one and honors --set") {
    TempDir tmp;
    mapping::MassDensityGrid grid;
    grid.cell_size = 0.5;
    grid.width = 8;
    grid.height = 4;
    grid.default_density = 250.0;
    grid.values.assign(32, 0.0);
    grid.states.assign(32, mapping::CellState::Observed);
    for (int ix = 0; ix < 8; ++ix) grid.values[grid.offset(ix, 3)] = 100.0;  // top lane blocked
    io::save_grid(tmp.file("grid"), grid);

    io::write_text_file(tmp.file("cands.json"),
                        R"({"candidates": [
        {"id": "free", "width": 0.4, "waypoints": [[0.3, 0.75], [3.7, 0.75]]},
        {"id": "blocked", "width": 0.4, "waypoints": [[0.3, 1.75], [3.7, 1.75]]}
    ]})");

    REQUIRE(cli::run({"evaluate", "--grid", tmp.file("grid"), "--candidates",
                      tmp.file("cands.json"), "--out-prefix", tmp.file("cost")}) == 0);
    auto csv = io::read_text_file(tmp.file("cost.csv"));
    CHECK(csv.find("free,1,") != std::string::npos);          // alpha exactly 1
    CHECK(csv.find("free,1,2,0,0,1") != std::string::npos);   // 8 cells * 0.25 m^2, selected

    // Heavier robot shrugs off the blocked lane less badly: alpha rises.
    REQUIRE(cli::run({"evaluate", "--grid", tmp.file("grid"), "--candidates",
                      tmp.file("cands.json"), "--out-prefix", tmp.file("cost_heavy"), "--set",
                      "robot.mass_kg=2500"}) == 0);
    const auto light = io::read_text_file(tmp.file("cost.csv"));
    const auto heavy = io::read_text_file(tmp.file("cost_heavy.csv"));
    const auto alpha_of = [](const std::string& text, const std::string& id) {
        const auto start = text.find(id + ",");
        const auto from = start + id.size() + 1;
        return std::stod(text.substr(from, text.find(',', from) - from));
    };
    CHECK(alpha_of(heavy, "blocked") > alpha_of(light, "blocked"));

    // Malformed candidates name the file and offending field.
    io::write_text_file(tmp.file("bad.json"), R"({"candidates": [{"id": 7}]})");
    CHECK(cli::run({"evaluate", "--grid", tmp.file("grid"), "--candidates", tmp.file("bad.json"),
                    "--out-prefix", tmp.file("c2")}) == 1);
}

TEST_CASE("fuse applies a spectral calibration matrix") {
    TempDir tmp;
    const std::string dir = tmp.file("cal_run");
    REQUIRE(cli::run({"gen", "--preset", "plane", "--out", dir, "--prefix", "p"}) == 0);
    const auto in = [&](const std::string& name) { return (fs::path(dir) / name).string(); };

    // Identity calibration onto the same 29-band grid: output equals the
    // uncalibrated fuse byte for byte.
    const auto cube = io::load_cube(in("p_cube.bin"));
    std::string header, body;
    for (std::size_t i = 0; i < cube.wavelengths_nm.size(); ++i) {
        if (i) header += ',';
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.10g", cube.wavelengths_nm[i]);
        header += buf;
        for (std::size_t j = 0; j < cube.wavelengths_nm.size(); ++j)
            body += (j ? "," : "") + std::string(i == j ? "1" : "0");
        body += '\n';
    }
    io::write_text_file(tmp.file("identity.csv"), header + '\n' + body);

    REQUIRE(cli::run({"fuse", "--cloud", in("p_cloud.csv"), "--cube", in("p_cube.bin"), "--rig",
                      in("p_rig.ini"), "--out", in("p_plain.csv")}) == 0);
    REQUIRE(cli::run({"fuse", "--cloud", in("p_cloud.csv"), "--cube", in("p_cube.bin"), "--rig",
                      in("p_rig.ini"), "--spectral-cal", tmp.file("identity.csv"), "--out",
                      in("p_cal.csv")}) == 0);
    CHECK(io::read_text_file(in("p_plain.csv")) == io::read_text_file(in("p_cal.csv")));

    // Band-count mismatch is a usage error.
    io::write_text_file(tmp.file("short.csv"), "650,810\n1,0\n0,1\n");
    CHECK(cli::run({"fuse", "--cloud", in("p_cloud.csv"), "--cube", in("p_cube.bin"), "--rig",
                    in("p_rig.ini"), "--spectral-cal", tmp.file("short.csv"), "--out",
                    in("p_bad.csv")}) == 1);
}
