#include "travmap/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "travmap/rng.hpp"

namespace travmap::scenario {

using semantics::SemanticLabel;

const char* to_string(PrimitiveShape shape) {
    switch (shape) {
        case PrimitiveShape::Box: return "box";
        case PrimitiveShape::Disk: return "disk";
        case PrimitiveShape::Heightfield: return "heightfield";
    }
    return "?";
}

PrimitiveShape shape_from_string(const std::string& name) {
    if (name == "box") return PrimitiveShape::Box;
    if (name == "disk") return PrimitiveShape::Disk;
    if (name == "heightfield") return PrimitiveShape::Heightfield;
    throw InputError("unknown primitive shape '" + name + "'");
}

void ScenePrimitive::validate() const {
    if (!(point_density > 0.0)) throw InputError("ScenePrimitive: non-positive point density");
    if (!(z_max >= z_min)) throw InputError("ScenePrimitive: z_max < z_min");
    if (shape == PrimitiveShape::Disk) {
        if (!(radius > 0.0)) throw InputError("ScenePrimitive: non-positive disk radius");
    } else {
        if (!(x1 > x0) || !(y1 > y0)) throw InputError("ScenePrimitive: empty rectangle");
    }
}

double ScenePrimitive::footprint_area() const {
    if (shape == PrimitiveShape::Disk) return 3.14159265358979323846 * radius * radius;
    return (x1 - x0) * (y1 - y0);
}

void SceneSpec::validate() const {
    if (!(extent_x > 0.0) || !(extent_y > 0.0)) throw InputError("SceneSpec: non-positive extents");
    if (noise_sigma < 0.0) throw InputError("SceneSpec: negative noise sigma");
    if (!(illumination_min > 0.0) || illumination_max < illumination_min)
        throw InputError("SceneSpec: invalid illumination range");
    if (!(cell_size > 0.0)) throw InputError("SceneSpec: non-positive cell size");
    if (!(ground_threshold >= 0.0)) throw InputError("SceneSpec: negative ground threshold");
    if (!(ugv_height > ground_threshold)) throw InputError("SceneSpec: height band is empty");
    if (plants_density < 0.0 || not_plants_density < 0.0 || unknown_density < 0.0)
        throw InputError("SceneSpec: negative density");
    if (band_grid.size() < 2) throw InputError("SceneSpec: band grid needs >= 2 wavelengths");
    for (const auto& p : primitives) p.validate();
}

std::vector<double> standard_band_grid() {
    std::vector<double> grid(29);
    for (int i = 0; i < 29; ++i) grid[static_cast<std::size_t>(i)] = 550.0 + 10.0 * i;
    return grid;
}

namespace {

// Piecewise-linear spectrum through (wavelength, value) control points,
// clamped at the ends.
spectral::ReflectanceSpectrum interpolate_profile(
    const std::vector<double>& grid, const std::vector<std::pair<double, double>>& knots) {
    spectral::ReflectanceSpectrum s;
    s.wavelengths_nm = grid;
    s.values.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double w = grid[i];
        if (w <= knots.front().first) {
            s.values[i] = knots.front().second;
        } else if (w >= knots.back().first) {
            s.values[i] = knots.back().second;
        } else {
            for (std::size_t k = 1; k < knots.size(); ++k) {
                if (w <= knots[k].first) {
                    const double t =
                        (w - knots[k - 1].first) / (knots[k].first - knots[k - 1].first);
                    s.values[i] =
                        knots[k - 1].second + t * (knots[k].second - knots[k - 1].second);
                    break;
                }
            }
        }
    }
    return s;
}

}  // namespace

std::vector<spectral::ReferenceProfile> reference_profiles(const std::vector<double>& band_grid) {
    std::vector<spectral::ReferenceProfile> out;
    auto add = [&](SemanticLabel label, std::vector<std::pair<double, double>> knots) {
        out.push_back({semantics::to_string(label), interpolate_profile(band_grid, knots)});
    };

    // Healthy short grass: near-black red absorption, steep red edge,
    // bright NIR plateau.
    add(SemanticLabel::Grass, {{550, 0.050},
                               {600, 0.020},
                               {640, 0.005},
                               {660, 0.003},
                               {680, 0.010},
                               {700, 0.200},
                               {720, 0.480},
                               {740, 0.640},
                               {760, 0.650},
                               {830, 0.650}});
    // Woody shrub / canopy: same structure, shallower edge.
    add(SemanticLabel::Vegetation, {{550, 0.070},
                                    {600, 0.035},
                                    {640, 0.012},
                                    {660, 0.010},
                                    {680, 0.025},
                                    {700, 0.180},
                                    {720, 0.400},
                                    {740, 0.540},
                                    {760, 0.550},
                                    {830, 0.550}});
    // Gravel track: flat, slightly warm.
    add(SemanticLabel::Track, {{550, 0.200}, {690, 0.208}, {830, 0.218}});
    // Concrete: flat and bright.
    add(SemanticLabel::Building, {{550, 0.310}, {690, 0.318}, {830, 0.332}});
    // Clothing mix: dimmer, mild red dip.
    add(SemanticLabel::Pedestrian, {{550, 0.150}, {650, 0.130}, {740, 0.140}, {830, 0.145}});
    // Bark / rock: flat mid-gray.
    add(SemanticLabel::Obstacle, {{550, 0.240}, {650, 0.250}, {830, 0.262}});
    // Plastic sheeting: a partial red-edge mimic (the classic vegetation
    // false positive).
    add(SemanticLabel::Other, {{550, 0.300},
                               {650, 0.260},
                               {700, 0.330},
                               {740, 0.430},
                               {830, 0.460}});
    return out;
}

const spectral::ReferenceProfile& profile_for(
    const std::vector<spectral::ReferenceProfile>& profiles, SemanticLabel label) {
    const char* name = semantics::to_string(label);
    for (const auto& p : profiles)
        if (p.class_name == name) return p;
    throw InputError("no reference profile for class '" + std::string(name) + "'");
}

namespace {

// Positive-area overlap between a primitive footprint and one grid cell.
bool footprint_overlaps_cell(const ScenePrimitive& prim, double cx0, double cy0, double cx1,
                             double cy1) {
    if (prim.shape == PrimitiveShape::Disk) {
        const double px = std::clamp(prim.cx, cx0, cx1);
        const double py = std::clamp(prim.cy, cy0, cy1);
        const double dx = prim.cx - px, dy = prim.cy - py;
        return dx * dx + dy * dy < prim.radius * prim.radius;
    }
    return prim.x0 < cx1 && cx0 < prim.x1 && prim.y0 < cy1 && cy0 < prim.y1;
}

}  // namespace

Scene generate_scene(const SceneSpec& spec_in) {
    SceneSpec spec = spec_in;
    if (spec.band_grid.empty()) spec.band_grid = standard_band_grid();
    spec.validate();

    const auto profiles = reference_profiles(spec.band_grid);

    Scene scene;
    std::size_t total = 0;
    for (const auto& prim : spec.primitives)
        total += static_cast<std::size_t>(
            std::llround(prim.point_density * prim.footprint_area()));
    scene.points.reserve(total);
    scene.plants_mask.reserve(total);

    for (std::size_t pi = 0; pi < spec.primitives.size(); ++pi) {
        const auto& prim = spec.primitives[pi];
        const auto& profile = profile_for(profiles, prim.label).spectrum;
        rng::SplitMix64 gen(rng::derive_seed(spec.seed, pi));
        const auto count =
            static_cast<std::size_t>(std::llround(prim.point_density * prim.footprint_area()));

        for (std::size_t n = 0; n < count; ++n) {
            double x, y;
            if (prim.shape == PrimitiveShape::Disk) {
                for (;;) {
                    x = gen.uniform(-prim.radius, prim.radius);
                    y = gen.uniform(-prim.radius, prim.radius);
                    if (x * x + y * y <= prim.radius * prim.radius) break;
                }
                x += prim.cx;
                y += prim.cy;
            } else {
                x = gen.uniform(prim.x0, prim.x1);
                y = gen.uniform(prim.y0, prim.y1);
            }
            const double z = gen.uniform(prim.z_min, prim.z_max);
            const double gain = gen.uniform(spec.illumination_min, spec.illumination_max);

            semantics::LabeledMapPoint point;
            point.position = Eigen::Vector3d(x, y, z);
            point.label = prim.label;
            point.reflectance.wavelengths_nm = spec.band_grid;
            point.reflectance.values.resize(spec.band_grid.size());
            for (std::size_t b = 0; b < spec.band_grid.size(); ++b) {
                double v = profile.values[b] * gain;
                if (spec.noise_sigma > 0.0) v = gen.normal(v, spec.noise_sigma);
                point.reflectance.values[b] =
                    std::clamp(v, 0.0, spectral::kReflectanceCeiling);
            }
            scene.plants_mask.push_back(semantics::is_plants(prim.label));
            scene.points.push_back(std::move(point));
        }
    }

    // Exhaustive ground-truth grid: per cell, the densest obstacle primitive
    // whose z range reaches into the (ground_threshold, ugv_height] band and
    // whose footprint overlaps the cell with positive area.
    mapping::MassDensityGrid grid;
    grid.cell_size = spec.cell_size;
    grid.origin_x = 0.0;
    grid.origin_y = 0.0;
    grid.default_density = spec.unknown_density;
    grid.width = std::max(1, static_cast<int>(std::ceil(spec.extent_x / spec.cell_size - 1e-9)));
    grid.height = std::max(1, static_cast<int>(std::ceil(spec.extent_y / spec.cell_size - 1e-9)));
    const auto cells = static_cast<std::size_t>(grid.width) * static_cast<std::size_t>(grid.height);
    grid.values.assign(cells, spec.unknown_density);
    grid.states.assign(cells, mapping::CellState::Unknown);

    for (const auto& prim : spec.primitives) {
        if (!prim.is_obstacle()) continue;
        if (!(prim.z_max > spec.ground_threshold) || !(prim.z_min <= spec.ugv_height)) continue;
        const double density = semantics::is_plants(prim.label) ? spec.plants_density
                                                                : spec.not_plants_density;
        for (int iy = 0; iy < grid.height; ++iy) {
            for (int ix = 0; ix < grid.width; ++ix) {
                const double cx0 = grid.origin_x + ix * grid.cell_size;
                const double cy0 = grid.origin_y + iy * grid.cell_size;
                if (!footprint_overlaps_cell(prim, cx0, cy0, cx0 + grid.cell_size,
                                             cy0 + grid.cell_size))
                    continue;
                const std::size_t at = grid.offset(ix, iy);
                if (grid.states[at] == mapping::CellState::Unknown) {
                    grid.states[at] = mapping::CellState::Observed;
                    grid.values[at] = density;
                } else {
                    grid.values[at] = std::max(grid.values[at], density);
                }
            }
        }
    }
    scene.truth_grid = std::move(grid);
    return scene;
}

CameraRig overhead_rig(const SceneSpec& spec, int image_width, int image_height,
                       double camera_height_m) {
    CameraRig rig;
    rig.intrinsics.width = image_width;
    rig.intrinsics.height = image_height;
    rig.intrinsics.cx = image_width / 2.0;
    rig.intrinsics.cy = image_height / 2.0;

    // Nadir view: camera x along world x, camera y along -y, looking down.
    Eigen::Matrix3d r;
    r << 1, 0, 0, 0, -1, 0, 0, 0, -1;
    const Eigen::Vector3d center(spec.extent_x / 2.0, spec.extent_y / 2.0, camera_height_m);
    rig.extrinsics.rotation = r;
    rig.extrinsics.translation = -(r * center);

    // Fit the extents (plus margin) at the shallowest depth obstacles reach.
    const double margin = 0.5;
    const double depth = camera_height_m - 3.0;
    rig.intrinsics.fx =
        (image_width / 2.0 - 2.0) * depth / (spec.extent_x / 2.0 + margin);
    rig.intrinsics.fy =
        (image_height / 2.0 - 2.0) * depth / (spec.extent_y / 2.0 + margin);
    return rig;
}

spectral::SpectralCube render_cube(const Scene& scene, const CameraRig& rig) {
    if (scene.points.empty()) throw InputError("render_cube: empty scene");
    const auto& grid_nm = scene.points.front().reflectance.wavelengths_nm;

    spectral::SpectralCube cube;
    cube.width = rig.intrinsics.width;
    cube.height = rig.intrinsics.height;
    cube.wavelengths_nm = grid_nm;
    cube.planes.assign(grid_nm.size() * static_cast<std::size_t>(cube.width) *
                           static_cast<std::size_t>(cube.height),
                       0.0f);

    const auto pixels = static_cast<std::size_t>(cube.width) * static_cast<std::size_t>(cube.height);
    std::vector<double> depth(pixels, std::numeric_limits<double>::infinity());

    for (const auto& point : scene.points) {
        fusion::LidarPoint lp{point.position.x(), point.position.y(), point.position.z(), {}};
        const auto px = fusion::project_point(rig.intrinsics, rig.extrinsics, lp);
        if (!px) continue;
        const auto ix = static_cast<std::size_t>(std::lround(px->u));
        const auto iy = static_cast<std::size_t>(std::lround(px->v));
        const double d = rig.extrinsics.apply(point.position).z();
        const std::size_t at = iy * static_cast<std::size_t>(cube.width) + ix;
        if (d < depth[at]) {
            depth[at] = d;
            for (std::size_t b = 0; b < grid_nm.size(); ++b)
                cube.at(b, static_cast<int>(ix), static_cast<int>(iy)) =
                    static_cast<float>(point.reflectance.values[b]);
        }
    }
    return cube;
}

SceneSpec park_spec(std::uint64_t seed, double noise_sigma) {
    SceneSpec spec;
    spec.seed = seed;
    spec.extent_x = 30.0;
    spec.extent_y = 20.0;
    spec.noise_sigma = noise_sigma;
    spec.illumination_min = 0.7;
    spec.illumination_max = 1.3;
    spec.band_grid = standard_band_grid();

    auto rect = [](PrimitiveShape shape, SemanticLabel label, double density, double z0, double z1,
                   double x0, double y0, double x1, double y1) {
        ScenePrimitive p;
        p.shape = shape;
        p.label = label;
        p.point_density = density;
        p.z_min = z0;
        p.z_max = z1;
        p.x0 = x0;
        p.y0 = y0;
        p.x1 = x1;
        p.y1 = y1;
        return p;
    };
    auto disk = [](SemanticLabel label, double density, double z0, double z1, double cx, double cy,
                   double radius) {
        ScenePrimitive p;
        p.shape = PrimitiveShape::Disk;
        p.label = label;
        p.point_density = density;
        p.z_min = z0;
        p.z_max = z1;
        p.cx = cx;
        p.cy = cy;
        p.radius = radius;
        return p;
    };

    using S = PrimitiveShape;
    using L = SemanticLabel;
    // Gravel esplanade and a mowed lawn.
    spec.primitives.push_back(rect(S::Heightfield, L::Track, 80, 0.0, 0.02, 0, 0, 30, 10));
    spec.primitives.push_back(rect(S::Heightfield, L::Grass, 150, 0.0, 0.03, 0, 10, 20, 20));
    // Tall grass meadow over part of the esplanade.
    spec.primitives.push_back(rect(S::Box, L::Grass, 180, 0.05, 0.35, 2, 2, 28, 8));
    // Shrub patches.
    spec.primitives.push_back(rect(S::Box, L::Vegetation, 250, 0.2, 0.9, 22, 12, 26, 15));
    spec.primitives.push_back(rect(S::Box, L::Vegetation, 250, 0.2, 0.9, 4, 14, 8, 17));
    spec.primitives.push_back(rect(S::Box, L::Vegetation, 250, 0.2, 0.9, 12, 16, 16, 19));
    // A building wall, street furniture, people, and a plastic tarp.
    spec.primitives.push_back(rect(S::Box, L::Building, 300, 0.0, 2.5, 24, 16, 29, 19.5));
    spec.primitives.push_back(rect(S::Box, L::Obstacle, 350, 0.0, 0.6, 9, 11, 11, 12));
    spec.primitives.push_back(rect(S::Box, L::Obstacle, 350, 0.0, 0.6, 17, 13, 19, 14));
    spec.primitives.push_back(rect(S::Box, L::Obstacle, 350, 0.0, 0.6, 2, 18, 4, 19));
    spec.primitives.push_back(disk(L::Pedestrian, 900, 0.0, 1.7, 6, 6, 0.3));
    spec.primitives.push_back(disk(L::Pedestrian, 900, 0.0, 1.7, 12, 12, 0.3));
    spec.primitives.push_back(disk(L::Pedestrian, 900, 0.0, 1.7, 20, 15, 0.3));
    spec.primitives.push_back(disk(L::Pedestrian, 900, 0.0, 1.7, 26, 6, 0.3));
    spec.primitives.push_back(rect(S::Box, L::Other, 260, 0.0, 0.08, 14, 12, 17, 14));
    return spec;
}

SceneSpec golden_spec(std::uint64_t seed) {
    SceneSpec spec;
    spec.seed = seed;
    spec.extent_x = 12.0;
    spec.extent_y = 4.0;
    spec.noise_sigma = 0.0003;
    spec.band_grid = standard_band_grid();

    auto rect = [](PrimitiveShape shape, SemanticLabel label, double density, double z0, double z1,
                   double x0, double y0, double x1, double y1) {
        ScenePrimitive p;
        p.shape = shape;
        p.label = label;
        p.point_density = density;
        p.z_min = z0;
        p.z_max = z1;
        p.x0 = x0;
        p.y0 = y0;
        p.x1 = x1;
        p.y1 = y1;
        return p;
    };

    using S = PrimitiveShape;
    using L = SemanticLabel;
    // Ground everywhere except an unscanned strip at x in [4, 6].
    spec.primitives.push_back(rect(S::Heightfield, L::Track, 60, 0.0, 0.02, 0, 0, 4, 4));
    spec.primitives.push_back(rect(S::Heightfield, L::Track, 60, 0.0, 0.02, 6, 0, 12, 4));
    // The grass crossing.  The blade band starts above the first voxel layer so
    // the mixed ground/vegetation returns near z=0 stay in ground-plane voxels;
    // a canopy that dips into the bottom layer would inherit the bare-ground
    // density through the max-combine and make the lane look armoured.
    spec.primitives.push_back(rect(S::Box, L::Grass, 250, 0.22, 0.45, 0.3, 0.75, 2.7, 1.75));
    // The grove: canopy with trunks beneath.
    spec.primitives.push_back(rect(S::Box, L::Vegetation, 200, 0.5, 1.4, 8, 0.5, 11, 2.5));
    for (double tx : {8.4, 9.0, 9.6, 10.2, 10.8}) {
        ScenePrimitive trunk;
        trunk.shape = S::Disk;
        trunk.label = L::Obstacle;
        trunk.point_density = 3000;
        trunk.z_min = 0.06;
        trunk.z_max = 0.9;
        trunk.cx = tx;
        trunk.cy = 1.25;
        trunk.radius = 0.12;
        spec.primitives.push_back(trunk);
    }
    return spec;
}

SceneSpec planar_spec(std::uint64_t seed) {
    SceneSpec spec;
    spec.seed = seed;
    spec.extent_x = 20.0;
    spec.extent_y = 20.0;
    spec.noise_sigma = 0.0;
    spec.band_grid = standard_band_grid();

    ScenePrimitive ground;
    ground.shape = PrimitiveShape::Heightfield;
    ground.label = SemanticLabel::Track;
    ground.point_density = 30;
    ground.z_min = 0.0;
    ground.z_max = 0.02;
    ground.x0 = 0;
    ground.y0 = 0;
    ground.x1 = 20;
    ground.y1 = 20;
    spec.primitives.push_back(ground);

    // Off-plane structure so the plane fit has outliers to reject.
    ScenePrimitive crate;
    crate.shape = PrimitiveShape::Box;
    crate.label = SemanticLabel::Obstacle;
    crate.point_density = 150;
    crate.z_min = 1.0;
    crate.z_max = 1.5;
    crate.x0 = 8;
    crate.y0 = 8;
    crate.x1 = 10;
    crate.y1 = 10;
    spec.primitives.push_back(crate);
    return spec;
}

std::vector<traversal::PathCandidate> golden_candidates() {
    std::vector<traversal::PathCandidate> out(3);
    out[0].id = "grass";
    out[0].waypoints = {{0.55, 1.25}, {2.45, 1.25}};
    out[0].swept_width_m = 0.4;
    out[1].id = "unknown";
    out[1].waypoints = {{4.3, 1.25}, {5.7, 1.25}};
    out[1].swept_width_m = 0.4;
    out[2].id = "trees";
    out[2].waypoints = {{8.3, 1.25}, {10.9, 1.25}};
    out[2].swept_width_m = 0.4;
    return out;
}

}  // namespace travmap::scenario
