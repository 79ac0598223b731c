#include "travmap/config.hpp"

#include "travmap/io.hpp"

namespace travmap {

void PipelineConfig::validate() const {
    if (!(robot.mass_kg > 0.0) || !(robot.width_m > 0.0) || !(robot.height_m > 0.0))
        throw InputError("config: robot dimensions and mass must be positive");
    if (!(grid.cell_size_m > 0.0) || !(grid.voxel_size_m > 0.0))
        throw InputError("config: grid resolutions must be positive");
    if (densities.plants_kg_m2 < 0.0 || densities.not_plants_kg_m2 < 0.0)
        throw InputError("config: densities must be non-negative");
    if (!(ransac.threshold_m > 0.0)) throw InputError("config: ransac.threshold_m must be positive");
    if (ransac.iterations < 1) throw InputError("config: ransac.iterations must be >= 1");
    if (otsu_bins < 2) throw InputError("config: otsu.bins must be >= 2");
    if (!(ndvi.red_nm > 0.0) || !(ndvi.nir_nm > 0.0))
        throw InputError("config: ndvi band wavelengths must be positive");
}

semantics::ClassDensityTable PipelineConfig::density_table() const {
    return semantics::ClassDensityTable::two_class(densities.plants_kg_m2,
                                                   densities.not_plants_kg_m2);
}

namespace {

void apply_section(PipelineConfig& c, const std::string& section, const std::string& key,
                   const std::string& value) {
    const std::string where = section + "." + key;
    auto num = [&] { return io::parse_double(value, where); };
    auto integer = [&] { return io::parse_long(value, where); };

    if (section == "robot") {
        if (key == "mass_kg") c.robot.mass_kg = num();
        else if (key == "width_m") c.robot.width_m = num();
        else if (key == "height_m") c.robot.height_m = num();
        else throw InputError("config: unknown key '" + where + "'");
    } else if (section == "grid") {
        if (key == "cell_size_m") c.grid.cell_size_m = num();
        else if (key == "voxel_size_m") c.grid.voxel_size_m = num();
        else throw InputError("config: unknown key '" + where + "'");
    } else if (section == "densities") {
        if (key == "plants") c.densities.plants_kg_m2 = num();
        else if (key == "not_plants") c.densities.not_plants_kg_m2 = num();
        else throw InputError("config: unknown key '" + where + "'");
    } else if (section == "ransac") {
        if (key == "threshold_m") c.ransac.threshold_m = num();
        else if (key == "iterations") c.ransac.iterations = static_cast<int>(integer());
        else if (key == "seed") c.ransac.seed = static_cast<std::uint64_t>(integer());
        else throw InputError("config: unknown key '" + where + "'");
    } else if (section == "otsu") {
        if (key == "bins") c.otsu_bins = static_cast<int>(integer());
        else throw InputError("config: unknown key '" + where + "'");
    } else if (section == "ndvi") {
        if (key == "red_nm") c.ndvi.red_nm = num();
        else if (key == "nir_nm") c.ndvi.nir_nm = num();
        else throw InputError("config: unknown key '" + where + "'");
    } else {
        throw InputError("config: unknown section '" + section + "'");
    }
}

}  // namespace

PipelineConfig load_pipeline_config(const std::string& path) {
    PipelineConfig config;
    const io::IniFile ini = io::load_ini(path);
    for (const auto& section : ini.sections)
        for (const auto& [key, value] : section.entries)
            apply_section(config, section.name, key, value);
    config.validate();
    return config;
}

void apply_config_override(PipelineConfig& config, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw InputError("--set expects section.key=value, got '" + assignment + "'");
    const std::string lhs = assignment.substr(0, eq);
    const std::string value = assignment.substr(eq + 1);
    const auto dot = lhs.find('.');
    if (dot == std::string::npos)
        throw InputError("--set expects section.key=value, got '" + assignment + "'");
    apply_section(config, lhs.substr(0, dot), lhs.substr(dot + 1), value);
}

}  // namespace travmap
