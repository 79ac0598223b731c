#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "travmap/spectral.hpp"

namespace travmap::semantics {

enum class SemanticLabel { Grass, Track, Vegetation, Building, Pedestrian, Obstacle, Other };

inline constexpr std::array<SemanticLabel, 7> kAllLabels = {
    SemanticLabel::Grass,    SemanticLabel::Track,      SemanticLabel::Vegetation,
    SemanticLabel::Building, SemanticLabel::Pedestrian, SemanticLabel::Obstacle,
    SemanticLabel::Other};

const char* to_string(SemanticLabel label);
SemanticLabel label_from_string(const std::string& name);  // InputError on unknown name

// The Plants macro-class drives both segmentation scoring and the
// two-class density model.
inline bool is_plants(SemanticLabel label) {
    return label == SemanticLabel::Grass || label == SemanticLabel::Vegetation;
}

// How a class turns the scalar plants probability p into its likelihood.
enum class LikelihoodKind { PlantsProbability, OneMinusPlantsProbability, Uniform };

struct ClassDensity {
    std::string class_name;
    double density_kg_m2 = 0.0;
    LikelihoodKind likelihood = LikelihoodKind::Uniform;
};

struct ClassDensityTable {
    std::vector<ClassDensity> entries;

    void validate() const;  // InputError: empty, duplicate names, negative density
    std::vector<double> likelihoods(double plants_probability) const;
    static ClassDensityTable two_class(double plants_density, double not_plants_density);
};

struct SegmentationReport {
    std::string method_name;
    double iou = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double accuracy = 0.0;
    double f1 = 0.0;
    double specificity = 0.0;
    double duration_ms = 0.0;
    bool degenerate = false;  // some metric denominator was empty (reported as 0)
};

struct LabeledPoint {
    Eigen::Vector3d position = Eigen::Vector3d::Zero();
    SemanticLabel label = SemanticLabel::Other;
};

// Labeled point with its measured reflectance; the benchmark substrate.
struct LabeledMapPoint {
    Eigen::Vector3d position = Eigen::Vector3d::Zero();
    SemanticLabel label = SemanticLabel::Other;
    spectral::ReflectanceSpectrum reflectance;
};

// p = clamp((ndvi + 1) / 2, 0, 1).
double plants_probability(double ndvi_value);

// Likelihood-weighted mean density: sum(d_i * p_i) / sum(p_i).
// InputError: length mismatch, negative likelihood, or all-zero likelihoods
// ("uninformative measurement").
double expected_mass_density(const ClassDensityTable& table,
                             const std::vector<double>& likelihoods);

// Confusion-matrix metrics with Plants as the positive class. Degenerate
// denominators report 0 and set the flag. InputError: empty or mismatched
// lengths.
SegmentationReport evaluate_segmentation(const std::vector<bool>& predicted,
                                         const std::vector<bool>& truth);

struct BenchmarkOptions {
    spectral::BandMap bands;
    int otsu_bins = 256;
};

// One report per method. Index methods are thresholded with vegetation on
// the polarity to_string(kind) implies (see plants_on_high_side); distance
// methods always treat the low-distance side of the vegetation reference as
// Plants. The reference is the mean Grass/Vegetation profile. Durations
// cover scoring + thresholding, not IO. InputError: empty map, missing
// vegetation profiles when distances are requested.
std::vector<SegmentationReport> benchmark_methods(
    const std::vector<LabeledMapPoint>& map, const std::vector<spectral::IndexKind>& indices,
    const std::vector<spectral::DistanceKind>& distances,
    const std::vector<spectral::ReferenceProfile>& profiles, const BenchmarkOptions& opts = {});

// Mean of the Grass and Vegetation profiles on their shared grid.
// InputError when neither class is present.
spectral::ReferenceProfile plants_reference(const std::vector<spectral::ReferenceProfile>& profiles);

}  // namespace travmap::semantics
