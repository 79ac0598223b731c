#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "travmap/fusion.hpp"
#include "travmap/mapping.hpp"
#include "travmap/semantics.hpp"
#include "travmap/spectral.hpp"
#include "travmap/traversal.hpp"

namespace travmap::scenario {

enum class PrimitiveShape { Box, Disk, Heightfield };

const char* to_string(PrimitiveShape shape);
PrimitiveShape shape_from_string(const std::string& name);  // InputError on unknown

// One populated region. Boxes and heightfields scatter points over a
// rectangle, disks over a circle; z is uniform in [z_min, z_max].
// Heightfields are terrain: they never contribute obstacle mass to the
// ground-truth grid. point_density is points per m^2 of footprint.
struct ScenePrimitive {
    PrimitiveShape shape = PrimitiveShape::Box;
    semantics::SemanticLabel label = semantics::SemanticLabel::Other;
    double point_density = 100.0;
    double z_min = 0.0;
    double z_max = 0.0;
    double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;  // rectangle footprint
    double cx = 0.0, cy = 0.0, radius = 0.0;        // disk footprint

    void validate() const;
    double footprint_area() const;
    bool is_obstacle() const { return shape != PrimitiveShape::Heightfield; }
};

struct SceneSpec {
    std::uint64_t seed = 1;
    double extent_x = 10.0;
    double extent_y = 10.0;
    std::vector<ScenePrimitive> primitives;
    std::vector<double> band_grid;  // defaults to standard_band_grid()
    double noise_sigma = 0.0;       // per-band Gaussian, clamped to >= 0 after
    // Per-point multiplicative brightness factor, uniform in [min, max].
    // [1, 1] disables it so noiseless spectra equal the class profiles.
    double illumination_min = 1.0;
    double illumination_max = 1.0;
    // Ground-truth grid parameters, mirroring the pipeline defaults.
    double cell_size = 0.5;
    double ground_threshold = 0.05;  // z band excluded as ground in the truth grid
    double ugv_height = 1.0;
    double plants_density = 20.0;
    double not_plants_density = 2400.0;
    double unknown_density = 250.0;

    void validate() const;  // InputError: non-positive extents/cell, negative sigma, ...
};

// 29 wavelengths, 550..830 nm in 10 nm steps.
std::vector<double> standard_band_grid();

// One parametric profile per semantic class on the given grid. Vegetation
// classes carry a red edge (810 nm >= 3x 650 nm); mineral classes are flat
// within +-10%; Other is a mild red-edge confuser (plastic sheeting).
std::vector<spectral::ReferenceProfile> reference_profiles(
    const std::vector<double>& band_grid = standard_band_grid());

const spectral::ReferenceProfile& profile_for(
    const std::vector<spectral::ReferenceProfile>& profiles,
    semantics::SemanticLabel label);  // InputError when missing

struct Scene {
    std::vector<semantics::LabeledMapPoint> points;
    std::vector<bool> plants_mask;          // per point
    mapping::MassDensityGrid truth_grid;    // exhaustive per-cell obstacle maximum
};

// Deterministic under spec.seed: primitive k draws from an independent
// substream, so edits to one primitive leave the others' points unchanged.
Scene generate_scene(const SceneSpec& spec);

// Overhead camera rig covering the scene extents with margin; the cube is a
// depth-buffered splat of the scene points (nearest point to the camera owns
// the pixel).
struct CameraRig {
    fusion::CameraIntrinsics intrinsics;
    fusion::RigidTransform extrinsics;  // world -> camera
};

CameraRig overhead_rig(const SceneSpec& spec, int image_width = 320, int image_height = 240,
                       double camera_height_m = 40.0);

spectral::SpectralCube render_cube(const Scene& scene, const CameraRig& rig);

// Canned scenes used by tests and the command-line generator.
SceneSpec park_spec(std::uint64_t seed = 7, double noise_sigma = 0.02);
SceneSpec golden_spec(std::uint64_t seed = 11);
SceneSpec planar_spec(std::uint64_t seed = 3);

// The three candidate routes over the golden scene: a grass crossing, a
// detour through unobserved space, and a line through the tree grove.
std::vector<traversal::PathCandidate> golden_candidates();

}  // namespace travmap::scenario
