#pragma once

#include <cstdint>
#include <string>

#include "travmap/semantics.hpp"

namespace travmap {

// Pipeline-wide tunables with the shipped field defaults. Loaded from an
// INI-style file; any value can be overridden on the command line with
// --set section.key=value.
struct PipelineConfig {
    struct Robot {
        double mass_kg = 250.0;
        double width_m = 0.8;
        double height_m = 1.0;
    } robot;

    struct Grid {
        double cell_size_m = 0.5;
        double voxel_size_m = 0.2;
    } grid;

    struct Densities {
        double plants_kg_m2 = 20.0;
        double not_plants_kg_m2 = 2400.0;
    } densities;

    struct Ransac {
        double threshold_m = 0.05;
        int iterations = 200;
        std::uint64_t seed = 1;
    } ransac;

    int otsu_bins = 256;

    struct NdviBands {
        double red_nm = 650.0;
        double nir_nm = 810.0;
    } ndvi;

    void validate() const;  // InputError: non-positive physical quantity
    semantics::ClassDensityTable density_table() const;
};

PipelineConfig load_pipeline_config(const std::string& path);

// "section.key=value"; InputError names unknown keys.
void apply_config_override(PipelineConfig& config, const std::string& assignment);

}  // namespace travmap
