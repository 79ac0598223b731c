#pragma once

#include <string>
#include <vector>

#include "travmap/config.hpp"

namespace travmap::cli {

struct GenOptions {
    std::string spec_path;  // scene INI; empty when a preset is used
    std::string preset;     // park | golden | plane
    std::string out_dir;
    std::string prefix = "scene";
    PipelineConfig config;
};

struct FuseOptions {
    std::string cloud_path;
    std::string cube_path;
    std::string rig_path;
    std::string spectral_cal_path;  // optional reflectance calibration matrix
    std::string out_path;
    PipelineConfig config;
};

struct BenchOptions {
    std::string map_path;
    std::string out_table_path;  // optional; table always goes to stdout
    std::string out_csv_path;    // optional
    PipelineConfig config;
};

struct MapOptions {
    std::string manifest_path;
    std::string out_prefix;
    PipelineConfig config;
};

struct EvaluateOptions {
    std::string grid_prefix;
    std::string candidates_path;
    std::string out_prefix;
    PipelineConfig config;
};

void cmd_gen(const GenOptions& opts);
void cmd_fuse(const FuseOptions& opts);
void cmd_bench(const BenchOptions& opts);
void cmd_map(const MapOptions& opts);
void cmd_evaluate(const EvaluateOptions& opts);

// Full argv-style driver (excluding the program name). Returns the process
// exit code: 0 ok, 1 input/usage error, 2 internal error.
int run(const std::vector<std::string>& args);

}  // namespace travmap::cli
