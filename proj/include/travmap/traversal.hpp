#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "travmap/mapping.hpp"

namespace travmap::traversal {

struct RobotSpec {
    double mass_kg = 250.0;
    double width_m = 0.8;
    double height_m = 1.0;

    void validate() const;  // InputError: any field <= 0
};

struct PathCandidate {
    std::string id;
    std::vector<Eigen::Vector2d> waypoints;  // >= 2, consecutive points distinct
    double swept_width_m = 0.8;

    void validate() const;
    double length() const;
};

struct GridCellRef {
    int ix = 0;
    int iy = 0;
    bool operator==(const GridCellRef&) const = default;
    auto operator<=>(const GridCellRef&) const = default;
};

struct CellCost {
    int ix = 0;
    int iy = 0;
    bool in_bounds = true;  // false: read the unknown-space default
    double density_kg_m2 = 0.0;
    double mass_kg = 0.0;  // density * cell area
};

struct TraversalCost {
    std::string id;
    double alpha = 1.0;  // in (0, 1]
    double crossed_area_m2 = 0.0;
    double integrated_mass_kg = 0.0;
    std::vector<CellCost> per_cell;
};

// Retained-velocity fraction of one inelastic collision: m_R / (m_R + m_i).
// InputError: m_R <= 0 or m_i < 0.
double collision_alpha(double robot_mass_kg, double obstacle_mass_kg);

// Product of per-particle collision alphas, each particle weighing
// density * delta_a. InputError: m_R <= 0, delta_a <= 0, negative density.
double alpha_discrete(double robot_mass_kg, const std::vector<double>& densities_kg_m2,
                      double delta_a_m2);

// Continuum limit: exp(-line_integral / m_R). InputError: m_R <= 0 or a
// negative integral.
double alpha_continuous(double robot_mass_kg, double density_line_integral_kg);

// Fraction of kinetic energy lost at velocity ratio alpha: 1 - alpha^2.
double kinetic_energy_loss(double alpha);

// Cells whose interior overlaps the path swept to its width, each at most
// once, in row-major order. Indices may fall outside the grid (unobserved
// space costs the default density).
std::vector<GridCellRef> rasterize_path(const PathCandidate& path,
                                        const mapping::MassDensityGrid& grid);

// alpha = exp(-(sum of cell density * cell area) / m_R) plus the per-cell
// breakdown. InputError: m_R <= 0.
TraversalCost alpha_grid(double robot_mass_kg, const mapping::MassDensityGrid& grid,
                         const std::vector<GridCellRef>& crossed, const std::string& id = {});

struct EvaluationResult {
    std::vector<TraversalCost> costs;  // one per candidate, input order
    std::string selected_id;
};

// Scores every candidate over the grid; selects the highest alpha, breaking
// ties by shorter length then lower id. InputError: no candidates, invalid
// candidate or robot.
EvaluationResult evaluate_candidates(const std::vector<PathCandidate>& candidates,
                                     const mapping::MassDensityGrid& grid,
                                     const RobotSpec& robot);

}  // namespace travmap::traversal
