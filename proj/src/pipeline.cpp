#include "travmap/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "travmap/io.hpp"
#include "travmap/mapping.hpp"
#include "travmap/scenario.hpp"
#include "travmap/semantics.hpp"
#include "travmap/traversal.hpp"

namespace travmap::cli {

namespace fs = std::filesystem;

namespace {

std::string join_path(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

scenario::SceneSpec resolve_scene_spec(const GenOptions& opts) {
    if (!opts.spec_path.empty() && !opts.preset.empty())
        throw InputError("gen: give either --spec or --preset, not both");
    if (!opts.spec_path.empty()) return io::load_scene_spec(opts.spec_path);
    if (opts.preset == "park") return scenario::park_spec();
    if (opts.preset == "golden") return scenario::golden_spec();
    if (opts.preset == "plane") return scenario::planar_spec();
    if (opts.preset.empty()) throw InputError("gen: needs --spec <file> or --preset <name>");
    throw InputError("gen: unknown preset '" + opts.preset + "' (park, golden, plane)");
}

// Per-point plants probability and expected density from the measured
// spectrum; points without a spectrum are left untouched.
void attach_density(std::vector<fusion::AugmentedPoint>& points,
                    const std::vector<double>& wavelengths_nm, const PipelineConfig& config) {
    if (wavelengths_nm.empty()) return;
    const auto bands =
        spectral::BandMap::for_grid(wavelengths_nm, config.ndvi.red_nm, config.ndvi.nir_nm);
    const auto table = config.density_table();
    for (auto& p : points) {
        if (!p.reflectance) continue;
        const double ndvi = spectral::vegetation_index(spectral::IndexKind::Ndvi, *p.reflectance,
                                                       bands);
        const double prob = semantics::plants_probability(ndvi);
        p.plants_probability = prob;
        p.mass_density = semantics::expected_mass_density(table, table.likelihoods(prob));
    }
}

}  // namespace

void cmd_gen(const GenOptions& opts) {
    const scenario::SceneSpec spec = resolve_scene_spec(opts);
    if (opts.out_dir.empty()) throw InputError("gen: --out directory is required");
    fs::create_directories(opts.out_dir);

    const scenario::Scene scene = scenario::generate_scene(spec);
    auto out = [&](const std::string& suffix) { return join_path(opts.out_dir, opts.prefix + suffix); };

    io::save_scene_spec(out("_spec.ini"), spec);
    io::save_labeled_csv(out("_labeled.csv"), scene.points);

    std::vector<fusion::LidarPoint> cloud;
    cloud.reserve(scene.points.size());
    for (const auto& p : scene.points)
        cloud.push_back({p.position.x(), p.position.y(), p.position.z(), {}});
    io::save_cloud_csv(out("_cloud.csv"), cloud);

    const scenario::CameraRig rig = scenario::overhead_rig(spec);
    io::save_camera_rig(out("_rig.ini"), rig);
    io::save_cube_bin(out("_cube.bin"), scenario::render_cube(scene, rig));

    io::save_grid(out("_truth_grid"), scene.truth_grid);

    // The manifest names the augmented cloud the fuse stage will produce
    // from <prefix>_cloud.csv; scene points are already in the world frame.
    io::write_text_file(out("_poses.txt"), opts.prefix + "_aug.csv\n");

    if (opts.preset == "golden")
        io::save_candidates_json(out("_candidates.json"), scenario::golden_candidates());

    std::cout << "gen: " << scene.points.size() << " points, truth grid " << scene.truth_grid.width
              << "x" << scene.truth_grid.height << " -> " << opts.out_dir << "/" << opts.prefix
              << "_*\n";
}

void cmd_fuse(const FuseOptions& opts) {
    const auto cloud = io::load_cloud(opts.cloud_path);
    spectral::SpectralCube cube = io::load_cube(opts.cube_path);
    const scenario::CameraRig rig = io::load_camera_rig(opts.rig_path);

    if (!opts.spectral_cal_path.empty()) {
        const auto cal = io::load_spectral_calibration(opts.spectral_cal_path);
        if (static_cast<std::size_t>(cal.matrix.cols()) != cube.wavelengths_nm.size())
            throw InputError("fuse: calibration expects " + std::to_string(cal.matrix.cols()) +
                             " bands, cube has " + std::to_string(cube.wavelengths_nm.size()));
        spectral::SpectralCube calibrated;
        calibrated.width = cube.width;
        calibrated.height = cube.height;
        calibrated.wavelengths_nm = cal.output_wavelengths_nm;
        calibrated.planes.assign(cal.output_wavelengths_nm.size() *
                                     static_cast<std::size_t>(cube.width) *
                                     static_cast<std::size_t>(cube.height),
                                 0.0f);
        spectral::CalibrationStats stats;
        spectral::SpectrumSample sample;
        sample.wavelengths_nm = cube.wavelengths_nm;
        sample.intensities.resize(cube.wavelengths_nm.size());
        for (int y = 0; y < cube.height; ++y) {
            for (int x = 0; x < cube.width; ++x) {
                for (std::size_t b = 0; b < sample.intensities.size(); ++b)
                    sample.intensities[b] = cube.at(b, x, y);
                const auto spec = spectral::apply_calibration(cal, sample, &stats);
                for (std::size_t b = 0; b < spec.values.size(); ++b)
                    calibrated.at(b, x, y) = static_cast<float>(spec.values[b]);
            }
        }
        cube = std::move(calibrated);
        if (stats.clamped > 0)
            std::cout << "fuse: clamped " << stats.clamped << " calibrated values\n";
    }

    const auto augmented = fusion::augment_cloud(cloud, cube, rig.intrinsics, rig.extrinsics);
    io::save_augmented_csv(opts.out_path, augmented, cube.wavelengths_nm);

    const auto with_spectrum = static_cast<std::size_t>(
        std::count_if(augmented.begin(), augmented.end(),
                      [](const auto& p) { return bool(p.reflectance); }));
    std::cout << "fuse: " << augmented.size() << " points, " << with_spectrum
              << " inside the camera frustum -> " << opts.out_path << "\n";
}

void cmd_bench(const BenchOptions& opts) {
    const auto map = io::load_labeled_csv(opts.map_path);
    const auto& wavelengths = map.front().reflectance.wavelengths_nm;

    semantics::BenchmarkOptions bench;
    bench.bands = spectral::BandMap::for_grid(wavelengths, opts.config.ndvi.red_nm,
                                              opts.config.ndvi.nir_nm);
    bench.otsu_bins = opts.config.otsu_bins;

    const auto indices = spectral::all_indices();
    const auto distances = spectral::all_distances();
    const auto reports = semantics::benchmark_methods(
        map, {indices.begin(), indices.end()}, {distances.begin(), distances.end()},
        scenario::reference_profiles(wavelengths), bench);

    const std::string table = io::format_report_table(reports);
    std::cout << table;
    if (!opts.out_table_path.empty()) io::write_text_file(opts.out_table_path, table);
    if (!opts.out_csv_path.empty()) io::save_reports_csv(opts.out_csv_path, reports);
}

void cmd_map(const MapOptions& opts) {
    const auto entries = io::load_cloud_manifest(opts.manifest_path);
    const PipelineConfig& config = opts.config;

    mapping::VoxelMap voxels;
    voxels.voxel_size = config.grid.voxel_size_m;
    std::vector<Eigen::Vector3d> world_points;

    for (const auto& entry : entries) {
        auto cloud = io::load_augmented_csv(entry.path);
        attach_density(cloud.points, cloud.wavelengths_nm, config);
        for (const auto& p : cloud.points)
            world_points.push_back(entry.pose.sensor_to_world.apply(p.position));
        mapping::insert_cloud(voxels, cloud.points, entry.pose);
    }

    mapping::MassDensityGrid grid;
    if (voxels.cells.empty()) {
        grid = mapping::MassDensityGrid::unknown(config.grid.cell_size_m, config.robot.mass_kg);
    } else {
        const auto plane = mapping::ransac_ground_plane(
            world_points, config.ransac.threshold_m, config.ransac.iterations, config.ransac.seed);
        grid = mapping::flatten_to_grid(voxels, plane, config.robot.height_m,
                                        config.robot.mass_kg, config.grid.cell_size_m);
        std::cout << "map: ground plane normal (" << plane.normal.x() << ", " << plane.normal.y()
                  << ", " << plane.normal.z() << "), offset " << plane.offset << "\n";
    }
    io::save_grid(opts.out_prefix, grid);
    std::cout << "map: " << world_points.size() << " points -> grid " << grid.width << "x"
              << grid.height << " -> " << opts.out_prefix << ".{csv,json,pgm}\n";
}

void cmd_evaluate(const EvaluateOptions& opts) {
    const auto grid = io::load_grid(opts.grid_prefix);
    const auto candidates =
        io::load_candidates_json(opts.candidates_path, opts.config.robot.width_m);

    traversal::RobotSpec robot;
    robot.mass_kg = opts.config.robot.mass_kg;
    robot.width_m = opts.config.robot.width_m;
    robot.height_m = opts.config.robot.height_m;

    const auto result = traversal::evaluate_candidates(candidates, grid, robot);
    io::save_cost_csv(opts.out_prefix + ".csv", result);
    io::save_cost_json(opts.out_prefix + ".json", result);
    io::save_cost_overlay_pgm(opts.out_prefix + ".pgm", grid, result, candidates);

    for (const auto& c : result.costs)
        std::cout << "evaluate: " << c.id << " alpha " << c.alpha << " (mass "
                  << c.integrated_mass_kg << " kg over " << c.per_cell.size() << " cells)\n";
    std::cout << "evaluate: selected '" << result.selected_id << "' -> " << opts.out_prefix
              << ".{csv,json,pgm}\n";
}

namespace {

void add_config_flags(CLI::App* cmd, std::string& config_path,
                      std::vector<std::string>& overrides) {
    cmd->add_option("--config", config_path, "pipeline config INI file");
    cmd->add_option("--set", overrides, "override a config value, section.key=value")
        ->take_all();
}

PipelineConfig make_config(const std::string& config_path,
                           const std::vector<std::string>& overrides) {
    PipelineConfig config;
    if (!config_path.empty()) config = load_pipeline_config(config_path);
    for (const auto& assignment : overrides) apply_config_override(config, assignment);
    config.validate();
    return config;
}

}  // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"Spectral-LiDAR traversability mapping pipeline"};
    app.require_subcommand(1);

    GenOptions gen;
    FuseOptions fuse;
    BenchOptions bench;
    MapOptions map;
    EvaluateOptions evaluate;
    struct {
        std::string config;
        std::vector<std::string> overrides;
    } cfg_gen, cfg_fuse, cfg_bench, cfg_map, cfg_eval;

    CLI::App* c_gen = app.add_subcommand("gen", "generate a synthetic scene");
    c_gen->add_option("--spec", gen.spec_path, "scene spec INI file");
    c_gen->add_option("--preset", gen.preset, "canned scene: park, golden, plane");
    c_gen->add_option("--out", gen.out_dir, "output directory")->required();
    c_gen->add_option("--prefix", gen.prefix, "output file prefix (default scene)");
    add_config_flags(c_gen, cfg_gen.config, cfg_gen.overrides);

    CLI::App* c_fuse = app.add_subcommand("fuse", "attach camera spectra to a point cloud");
    c_fuse->add_option("--cloud", fuse.cloud_path, "point cloud (.csv or binary)")->required();
    c_fuse->add_option("--cube", fuse.cube_path, "spectral cube (.csv or binary)")->required();
    c_fuse->add_option("--rig", fuse.rig_path, "camera intrinsics/extrinsics INI")->required();
    c_fuse->add_option("--spectral-cal", fuse.spectral_cal_path,
                       "reflectance calibration matrix CSV");
    c_fuse->add_option("--out", fuse.out_path, "output augmented cloud CSV")->required();
    add_config_flags(c_fuse, cfg_fuse.config, cfg_fuse.overrides);

    CLI::App* c_bench = app.add_subcommand("bench", "benchmark segmentation methods on a labeled map");
    c_bench->add_option("--map", bench.map_path, "labeled map CSV")->required();
    c_bench->add_option("--out-table", bench.out_table_path, "write the text table here too");
    c_bench->add_option("--out-csv", bench.out_csv_path, "write per-method metrics CSV");
    add_config_flags(c_bench, cfg_bench.config, cfg_bench.overrides);

    CLI::App* c_map = app.add_subcommand("map", "build the mass-density grid from augmented clouds");
    c_map->add_option("--clouds", map.manifest_path, "manifest: <file> [tx ty tz qw qx qy qz]")
        ->required();
    c_map->add_option("--out-prefix", map.out_prefix, "grid output prefix")->required();
    add_config_flags(c_map, cfg_map.config, cfg_map.overrides);

    CLI::App* c_eval = app.add_subcommand("evaluate", "score path candidates over a grid");
    c_eval->add_option("--grid", evaluate.grid_prefix, "grid prefix (expects .csv and .json)")
        ->required();
    c_eval->add_option("--candidates", evaluate.candidates_path, "candidate paths JSON")
        ->required();
    c_eval->add_option("--out-prefix", evaluate.out_prefix, "cost report output prefix")
        ->required();
    add_config_flags(c_eval, cfg_eval.config, cfg_eval.overrides);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (c_gen->parsed()) {
            gen.config = make_config(cfg_gen.config, cfg_gen.overrides);
            cmd_gen(gen);
        } else if (c_fuse->parsed()) {
            fuse.config = make_config(cfg_fuse.config, cfg_fuse.overrides);
            cmd_fuse(fuse);
        } else if (c_bench->parsed()) {
            bench.config = make_config(cfg_bench.config, cfg_bench.overrides);
            cmd_bench(bench);
        } else if (c_map->parsed()) {
            map.config = make_config(cfg_map.config, cfg_map.overrides);
            cmd_map(map);
        } else if (c_eval->parsed()) {
            evaluate.config = make_config(cfg_eval.config, cfg_eval.overrides);
            cmd_evaluate(evaluate);
        }
        return 0;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace travmap::cli
