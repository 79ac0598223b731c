#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "travmap/fusion.hpp"

namespace travmap::mapping {

struct Pose {
    fusion::RigidTransform sensor_to_world;
    double timestamp_s = 0.0;
};

struct GroundPlane {
    Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();
    double offset = 0.0;  // plane: normal . p == offset
    double inlier_threshold = 0.05;

    void validate() const;  // InputError: non-unit normal
    double signed_distance(const Eigen::Vector3d& p) const { return normal.dot(p) - offset; }
};

struct VoxelKey {
    int i = 0;
    int j = 0;
    int k = 0;
    bool operator==(const VoxelKey&) const = default;
};

struct VoxelKeyHash {
    std::size_t operator()(const VoxelKey& key) const {
        std::uint64_t h = 1469598103934665603ULL;
        for (std::int64_t v : {std::int64_t{key.i}, std::int64_t{key.j}, std::int64_t{key.k}}) {
            h ^= static_cast<std::uint64_t>(v);
            h *= 1099511628211ULL;
        }
        return static_cast<std::size_t>(h);
    }
};

struct VoxelAggregate {
    std::size_t count = 0;
    Eigen::Vector3d mean_position = Eigen::Vector3d::Zero();
    std::size_t spectrum_count = 0;
    std::vector<double> mean_reflectance;  // empty until a spectrum arrives
    std::size_t probability_count = 0;
    double mean_plants_probability = 0.0;
    bool has_density = false;
    double max_mass_density = 0.0;
};

struct VoxelMap {
    double voxel_size = 0.2;
    std::vector<double> wavelengths_nm;  // grid of the first inserted spectrum
    std::unordered_map<VoxelKey, VoxelAggregate, VoxelKeyHash> cells;

    VoxelKey key_for(const Eigen::Vector3d& world) const;
    Eigen::Vector3d center_of(const VoxelKey& key) const;
};

enum class CellState : std::uint8_t { Unknown = 0, Observed = 1 };

struct MassDensityGrid {
    double cell_size = 0.5;
    double origin_x = 0.0;  // world coordinate of cell (0,0)'s low corner
    double origin_y = 0.0;
    int width = 1;
    int height = 1;
    double default_density = 250.0;  // unknown-cell value, kg/m^2
    std::vector<double> values;      // row-major, index iy * width + ix
    std::vector<CellState> states;

    void validate() const;  // InputError: non-positive dims/cell size, size mismatch,
                            // negative density
    double cell_area() const { return cell_size * cell_size; }
    bool in_bounds(int ix, int iy) const {
        return ix >= 0 && ix < width && iy >= 0 && iy < height;
    }
    std::size_t offset(int ix, int iy) const {
        return static_cast<std::size_t>(iy) * static_cast<std::size_t>(width) +
               static_cast<std::size_t>(ix);
    }
    double value_at(int ix, int iy) const { return values[offset(ix, iy)]; }
    CellState state_at(int ix, int iy) const { return states[offset(ix, iy)]; }
    // Out-of-bounds cells read as unobserved space.
    double density_at(int ix, int iy) const {
        return in_bounds(ix, iy) ? values[offset(ix, iy)] : default_density;
    }
    int cell_index_x(double x) const;
    int cell_index_y(double y) const;

    static MassDensityGrid unknown(double cell_size, double default_density);
};

// Best-of-`iterations` random minimal samples, refit by least squares over
// the winning inlier set, normal oriented toward +Z. Deterministic for a
// fixed seed. InputError: fewer than 3 points, non-positive threshold, or
// no non-collinear triple found.
GroundPlane ransac_ground_plane(const std::vector<Eigen::Vector3d>& points, double threshold_m,
                                int iterations, std::uint64_t seed);

// Transforms each point by the pose and merges it into its voxel: running
// means for position/spectrum/probability, max for density. The map's
// wavelength grid is pinned by the first spectrum; later clouds must match.
void insert_cloud(VoxelMap& map, const std::vector<fusion::AugmentedPoint>& cloud,
                  const Pose& pose);

// Drops voxels whose mean height above the plane is <= the plane's inlier
// threshold (ground) or > ugv_height (overhead), then takes the per-XY-cell
// column maximum of the surviving densities. Cells with no surviving
// density, and everything outside the observed bounding box, hold
// robot_mass as the unknown-space density. An empty map yields a 1x1
// unknown grid.
MassDensityGrid flatten_to_grid(const VoxelMap& map, const GroundPlane& ground,
                                double ugv_height_m, double robot_mass_kg, double cell_size_m);

}  // namespace travmap::mapping
