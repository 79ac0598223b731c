#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "travmap/fusion.hpp"
#include "travmap/mapping.hpp"
#include "travmap/scenario.hpp"
#include "travmap/semantics.hpp"
#include "travmap/spectral.hpp"
#include "travmap/traversal.hpp"

// File formats. Layouts are documented in README.md; every writer is
// deterministic (fixed field order, %.10g floats) so reruns are
// byte-comparable. Loaders throw InputError naming the file and the
// offending line or field.
namespace travmap::io {

// --- small parsing utilities -------------------------------------------------

std::vector<std::string> split(const std::string& line, char sep);
double parse_double(const std::string& text, const std::string& context);
long parse_long(const std::string& text, const std::string& context);
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// INI-style config: [section] headers over key = value lines; '#' or ';'
// starts a comment. Sections with the same name may repeat (scene
// primitives rely on this).
struct IniSection {
    std::string name;
    std::vector<std::pair<std::string, std::string>> entries;

    bool has(const std::string& key) const;
    const std::string& get(const std::string& key) const;  // InputError when missing
    std::string get_or(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double_or(const std::string& key, double fallback) const;
    long get_long_or(const std::string& key, long fallback) const;
    std::vector<double> get_doubles(const std::string& key) const;  // whitespace-separated
};

struct IniFile {
    std::vector<IniSection> sections;

    const IniSection* find(const std::string& name) const;  // first match or null
    std::vector<const IniSection*> all(const std::string& name) const;
};

IniFile parse_ini(const std::string& text, const std::string& origin);
IniFile load_ini(const std::string& path);

// --- point clouds ------------------------------------------------------------

std::vector<fusion::LidarPoint> load_cloud_csv(const std::string& path);
void save_cloud_csv(const std::string& path, const std::vector<fusion::LidarPoint>& cloud);
std::vector<fusion::LidarPoint> load_cloud_bin(const std::string& path);
void save_cloud_bin(const std::string& path, const std::vector<fusion::LidarPoint>& cloud);
// Dispatches on extension: .csv text, anything else binary.
std::vector<fusion::LidarPoint> load_cloud(const std::string& path);

// --- spectral cubes and calibration -------------------------------------------

spectral::SpectralCube load_cube_csv(const std::string& path);
void save_cube_csv(const std::string& path, const spectral::SpectralCube& cube);
spectral::SpectralCube load_cube_bin(const std::string& path);
void save_cube_bin(const std::string& path, const spectral::SpectralCube& cube);
spectral::SpectralCube load_cube(const std::string& path);

spectral::SpectralCalibration load_spectral_calibration(const std::string& path);

// Camera intrinsics + extrinsics INI ([intrinsics], [extrinsics]).
scenario::CameraRig load_camera_rig(const std::string& path);
void save_camera_rig(const std::string& path, const scenario::CameraRig& rig);

// --- augmented clouds ----------------------------------------------------------

void save_augmented_csv(const std::string& path,
                        const std::vector<fusion::AugmentedPoint>& cloud,
                        const std::vector<double>& wavelengths_nm);
struct AugmentedCloud {
    std::vector<fusion::AugmentedPoint> points;
    std::vector<double> wavelengths_nm;
};
AugmentedCloud load_augmented_csv(const std::string& path);

// --- labeled maps ---------------------------------------------------------------

void save_labeled_csv(const std::string& path,
                      const std::vector<semantics::LabeledMapPoint>& points);
std::vector<semantics::LabeledMapPoint> load_labeled_csv(const std::string& path);

// --- grids ----------------------------------------------------------------------

// prefix.csv (row-major densities), prefix.json (geometry + state mask),
// prefix.pgm (log-scaled 8-bit preview).
void save_grid(const std::string& prefix, const mapping::MassDensityGrid& grid);
mapping::MassDensityGrid load_grid(const std::string& prefix);

// --- candidates and cost reports --------------------------------------------------

std::vector<traversal::PathCandidate> load_candidates_json(const std::string& path,
                                                           double default_width_m);
void save_candidates_json(const std::string& path,
                          const std::vector<traversal::PathCandidate>& candidates);

void save_cost_csv(const std::string& path, const traversal::EvaluationResult& result);
void save_cost_json(const std::string& path, const traversal::EvaluationResult& result);
// Grid preview with each candidate's cells painted by its alpha (selected
// path drawn last).
void save_cost_overlay_pgm(const std::string& path, const mapping::MassDensityGrid& grid,
                           const traversal::EvaluationResult& result,
                           const std::vector<traversal::PathCandidate>& candidates);

// --- segmentation reports -----------------------------------------------------------

void save_reports_csv(const std::string& path,
                      const std::vector<semantics::SegmentationReport>& reports);
// Fixed-width text table: Method, IoU, Prec., Rec., Acc., F1, Spec., dt[ms].
std::string format_report_table(const std::vector<semantics::SegmentationReport>& reports);

// --- pose manifests -------------------------------------------------------------------

struct CloudEntry {
    std::string path;  // resolved against the manifest directory
    mapping::Pose pose;
};
// Each line: <file> [tx ty tz qw qx qy qz]; omitted pose = identity.
std::vector<CloudEntry> load_cloud_manifest(const std::string& path);

// --- scene specs ------------------------------------------------------------------------

scenario::SceneSpec load_scene_spec(const std::string& path);
void save_scene_spec(const std::string& path, const scenario::SceneSpec& spec);

}  // namespace travmap::io
