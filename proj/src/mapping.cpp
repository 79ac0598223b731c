#include "travmap/mapping.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "travmap/rng.hpp"

namespace travmap::mapping {

void GroundPlane::validate() const {
    if (std::abs(normal.norm() - 1.0) > 1e-9) throw InputError("GroundPlane: non-unit normal");
    if (!(inlier_threshold > 0.0)) throw InputError("GroundPlane: non-positive threshold");
}

VoxelKey VoxelMap::key_for(const Eigen::Vector3d& world) const {
    return VoxelKey{static_cast<int>(std::floor(world.x() / voxel_size)),
                    static_cast<int>(std::floor(world.y() / voxel_size)),
                    static_cast<int>(std::floor(world.z() / voxel_size))};
}

Eigen::Vector3d VoxelMap::center_of(const VoxelKey& key) const {
    return {(key.i + 0.5) * voxel_size, (key.j + 0.5) * voxel_size, (key.k + 0.5) * voxel_size};
}

void MassDensityGrid::validate() const {
    if (!(cell_size > 0.0)) throw InputError("MassDensityGrid: non-positive cell size");
    if (width <= 0 || height <= 0) throw InputError("MassDensityGrid: non-positive dimensions");
    const auto expected = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    if (values.size() != expected || states.size() != expected)
        throw InputError("MassDensityGrid: cell array size mismatch");
    if (!(default_density >= 0.0)) throw InputError("MassDensityGrid: negative default density");
    for (double v : values)
        if (!std::isfinite(v) || v < 0.0) throw InputError("MassDensityGrid: negative density");
}

int MassDensityGrid::cell_index_x(double x) const {
    return static_cast<int>(std::floor((x - origin_x) / cell_size));
}

int MassDensityGrid::cell_index_y(double y) const {
    return static_cast<int>(std::floor((y - origin_y) / cell_size));
}

MassDensityGrid MassDensityGrid::unknown(double cell_size, double default_density) {
    MassDensityGrid g;
    g.cell_size = cell_size;
    g.default_density = default_density;
    g.width = 1;
    g.height = 1;
    g.values.assign(1, default_density);
    g.states.assign(1, CellState::Unknown);
    return g;
}

namespace {

struct PlaneFit {
    Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();
    double offset = 0.0;
};

// Orients the normal toward +Z; on a vertical plane, toward +Y then +X, so
// the result never depends on sample order.
void orient(Eigen::Vector3d& n) {
    if (n.z() < 0.0 || (n.z() == 0.0 && (n.y() < 0.0 || (n.y() == 0.0 && n.x() < 0.0))))
        n = -n;
}

std::optional<PlaneFit> plane_from_triple(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                                          const Eigen::Vector3d& c) {
    const Eigen::Vector3d n = (b - a).cross(c - a);
    const double len = n.norm();
    // Degenerate (collinear) triples produce an unreliable normal; require
    // a minimum parallelogram area relative to the edge lengths.
    const double scale = std::max({(b - a).norm(), (c - a).norm(), 1e-12});
    if (len < 1e-12 * scale * scale || len == 0.0) return std::nullopt;
    PlaneFit fit;
    fit.normal = n / len;
    orient(fit.normal);
    fit.offset = fit.normal.dot(a);
    return fit;
}

PlaneFit least_squares_plane(const std::vector<Eigen::Vector3d>& points,
                             const std::vector<std::size_t>& subset) {
    Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
    for (std::size_t idx : subset) centroid += points[idx];
    centroid /= static_cast<double>(subset.size());

    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (std::size_t idx : subset) {
        const Eigen::Vector3d d = points[idx] - centroid;
        cov += d * d.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
    PlaneFit fit;
    fit.normal = solver.eigenvectors().col(0);  // smallest eigenvalue
    const double len = fit.normal.norm();
    fit.normal /= len;
    orient(fit.normal);
    fit.offset = fit.normal.dot(centroid);
    return fit;
}

}  // namespace

GroundPlane ransac_ground_plane(const std::vector<Eigen::Vector3d>& points, double threshold_m,
                                int iterations, std::uint64_t seed) {
    if (points.size() < 3) throw InputError("ransac_ground_plane: needs at least 3 points");
    if (!(threshold_m > 0.0)) throw InputError("ransac_ground_plane: non-positive threshold");
    if (iterations < 1) throw InputError("ransac_ground_plane: needs at least 1 iteration");

    rng::SplitMix64 gen(rng::derive_seed(seed, 0xA55A));
    const auto n = static_cast<std::uint64_t>(points.size());

    std::size_t best_inliers = 0;
    PlaneFit best;
    bool found = false;

    for (int it = 0; it < iterations; ++it) {
        const auto ia = static_cast<std::size_t>(gen.index(n));
        const auto ib = static_cast<std::size_t>(gen.index(n));
        const auto ic = static_cast<std::size_t>(gen.index(n));
        if (ia == ib || ib == ic || ia == ic) continue;
        const auto fit = plane_from_triple(points[ia], points[ib], points[ic]);
        if (!fit) continue;

        std::size_t inliers = 0;
        for (const auto& p : points)
            if (std::abs(fit->normal.dot(p) - fit->offset) <= threshold_m) ++inliers;
        if (!found || inliers > best_inliers) {
            found = true;
            best_inliers = inliers;
            best = *fit;
        }
    }
    if (!found)
        throw InputError("ransac_ground_plane: no valid plane (collinear or too few points)");

    std::vector<std::size_t> inlier_idx;
    for (std::size_t i = 0; i < points.size(); ++i)
        if (std::abs(best.normal.dot(points[i]) - best.offset) <= threshold_m)
            inlier_idx.push_back(i);
    if (inlier_idx.size() >= 3) best = least_squares_plane(points, inlier_idx);

    GroundPlane plane;
    plane.normal = best.normal;
    plane.offset = best.offset;
    plane.inlier_threshold = threshold_m;
    plane.validate();
    return plane;
}

void insert_cloud(VoxelMap& map, const std::vector<fusion::AugmentedPoint>& cloud,
                  const Pose& pose) {
    if (!(map.voxel_size > 0.0)) throw InputError("insert_cloud: non-positive voxel size");
    pose.sensor_to_world.validate();

    for (const auto& point : cloud) {
        if (!point.position.allFinite()) throw InputError("insert_cloud: non-finite point");
        const Eigen::Vector3d world = point.frame == fusion::Frame::World
                                          ? point.position
                                          : pose.sensor_to_world.apply(point.position);
        VoxelAggregate& agg = map.cells[map.key_for(world)];

        agg.count += 1;
        agg.mean_position += (world - agg.mean_position) / static_cast<double>(agg.count);

        if (point.reflectance) {
            const auto& spec = *point.reflectance;
            if (map.wavelengths_nm.empty()) {
                map.wavelengths_nm = spec.wavelengths_nm;
            } else if (map.wavelengths_nm != spec.wavelengths_nm) {
                throw InputError("insert_cloud: wavelength grid differs from the map's");
            }
            if (agg.mean_reflectance.empty())
                agg.mean_reflectance.assign(spec.values.size(), 0.0);
            agg.spectrum_count += 1;
            const double inv = 1.0 / static_cast<double>(agg.spectrum_count);
            for (std::size_t b = 0; b < spec.values.size(); ++b)
                agg.mean_reflectance[b] += (spec.values[b] - agg.mean_reflectance[b]) * inv;
        }
        if (point.plants_probability) {
            agg.probability_count += 1;
            agg.mean_plants_probability += (*point.plants_probability -
                                            agg.mean_plants_probability) /
                                           static_cast<double>(agg.probability_count);
        }
        if (point.mass_density) {
            if (*point.mass_density < 0.0) throw InputError("insert_cloud: negative density");
            agg.max_mass_density = agg.has_density
                                       ? std::max(agg.max_mass_density, *point.mass_density)
                                       : *point.mass_density;
            agg.has_density = true;
        }
    }
}

MassDensityGrid flatten_to_grid(const VoxelMap& map, const GroundPlane& ground,
                                double ugv_height_m, double robot_mass_kg, double cell_size_m) {
    if (!(ugv_height_m > 0.0)) throw InputError("flatten_to_grid: non-positive height");
    if (!(robot_mass_kg > 0.0)) throw InputError("flatten_to_grid: non-positive robot mass");
    if (!(cell_size_m > 0.0)) throw InputError("flatten_to_grid: non-positive cell size");
    ground.validate();

    if (map.cells.empty()) return MassDensityGrid::unknown(cell_size_m, robot_mass_kg);

    // The grid covers every observed voxel, surviving or not; unknown space
    // inside the box keeps the initialization density.
    int min_ix = std::numeric_limits<int>::max(), max_ix = std::numeric_limits<int>::min();
    int min_iy = min_ix, max_iy = max_ix;
    for (const auto& [key, agg] : map.cells) {
        const int ix = static_cast<int>(std::floor(agg.mean_position.x() / cell_size_m));
        const int iy = static_cast<int>(std::floor(agg.mean_position.y() / cell_size_m));
        min_ix = std::min(min_ix, ix);
        max_ix = std::max(max_ix, ix);
        min_iy = std::min(min_iy, iy);
        max_iy = std::max(max_iy, iy);
    }

    MassDensityGrid grid;
    grid.cell_size = cell_size_m;
    grid.default_density = robot_mass_kg;
    grid.origin_x = min_ix * cell_size_m;
    grid.origin_y = min_iy * cell_size_m;
    grid.width = max_ix - min_ix + 1;
    grid.height = max_iy - min_iy + 1;
    const auto cell_count = static_cast<std::size_t>(grid.width) *
                            static_cast<std::size_t>(grid.height);
    grid.values.assign(cell_count, robot_mass_kg);
    grid.states.assign(cell_count, CellState::Unknown);

    for (const auto& [key, agg] : map.cells) {
        if (!agg.has_density) continue;
        const double h = ground.signed_distance(agg.mean_position);
        if (h <= ground.inlier_threshold || h > ugv_height_m) continue;  // ground / overhead
        // Bounds cover every voxel by construction; the clamp only absorbs
        // last-ulp disagreement between the two floor computations.
        const int ix = std::clamp(grid.cell_index_x(agg.mean_position.x()), 0, grid.width - 1);
        const int iy = std::clamp(grid.cell_index_y(agg.mean_position.y()), 0, grid.height - 1);
        const std::size_t at = grid.offset(ix, iy);
        if (grid.states[at] == CellState::Unknown) {
            grid.states[at] = CellState::Observed;
            grid.values[at] = agg.max_mass_density;
        } else {
            grid.values[at] = std::max(grid.values[at], agg.max_mass_density);
        }
    }
    return grid;
}

}  // namespace travmap::mapping
