#include "travmap/traversal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace travmap::traversal {

void RobotSpec::validate() const {
    if (!(mass_kg > 0.0) || !(width_m > 0.0) || !(height_m > 0.0))
        throw InputError("RobotSpec: all fields must be positive");
}

void PathCandidate::validate() const {
    if (waypoints.size() < 2) throw InputError("PathCandidate '" + id + "': needs >= 2 waypoints");
    if (!(swept_width_m > 0.0))
        throw InputError("PathCandidate '" + id + "': non-positive swept width");
    for (const auto& w : waypoints)
        if (!w.allFinite()) throw InputError("PathCandidate '" + id + "': non-finite waypoint");
    for (std::size_t i = 1; i < waypoints.size(); ++i)
        if ((waypoints[i] - waypoints[i - 1]).norm() == 0.0)
            throw InputError("PathCandidate '" + id + "': repeated consecutive waypoint");
}

double PathCandidate::length() const {
    double len = 0.0;
    for (std::size_t i = 1; i < waypoints.size(); ++i)
        len += (waypoints[i] - waypoints[i - 1]).norm();
    return len;
}

double collision_alpha(double robot_mass_kg, double obstacle_mass_kg) {
    if (!(robot_mass_kg > 0.0)) throw InputError("collision_alpha: robot mass must be positive");
    if (obstacle_mass_kg < 0.0) throw InputError("collision_alpha: negative obstacle mass");
    return robot_mass_kg / (robot_mass_kg + obstacle_mass_kg);
}

double alpha_discrete(double robot_mass_kg, const std::vector<double>& densities_kg_m2,
                      double delta_a_m2) {
    if (!(robot_mass_kg > 0.0)) throw InputError("alpha_discrete: robot mass must be positive");
    if (!(delta_a_m2 > 0.0)) throw InputError("alpha_discrete: particle area must be positive");
    double alpha = 1.0;
    for (double d : densities_kg_m2) {
        if (d < 0.0) throw InputError("alpha_discrete: negative density");
        alpha *= robot_mass_kg / (robot_mass_kg + d * delta_a_m2);
    }
    return alpha;
}

double alpha_continuous(double robot_mass_kg, double density_line_integral_kg) {
    if (!(robot_mass_kg > 0.0)) throw InputError("alpha_continuous: robot mass must be positive");
    if (density_line_integral_kg < 0.0) throw InputError("alpha_continuous: negative integral");
    const double alpha = std::exp(-density_line_integral_kg / robot_mass_kg);
    // exp(-x) > 0 mathematically; keep alpha in (0, 1] when it underflows.
    return alpha > 0.0 ? alpha : std::numeric_limits<double>::min();
}

double kinetic_energy_loss(double alpha) { return 1.0 - alpha * alpha; }

namespace {

// Positive-area overlap test between an oriented rectangle and an axis-
// aligned cell, by separating axes. Strict inequalities: edge-touching
// contact has zero area and does not count as crossing.
struct OrientedRect {
    Eigen::Vector2d corners[4];
    Eigen::Vector2d axes[2];
};

bool overlaps(const OrientedRect& rect, const Eigen::Vector2d& cell_lo,
              const Eigen::Vector2d& cell_hi) {
    const Eigen::Vector2d cell_corners[4] = {{cell_lo.x(), cell_lo.y()},
                                             {cell_hi.x(), cell_lo.y()},
                                             {cell_hi.x(), cell_hi.y()},
                                             {cell_lo.x(), cell_hi.y()}};
    const Eigen::Vector2d axis_list[4] = {{1.0, 0.0}, {0.0, 1.0}, rect.axes[0], rect.axes[1]};
    for (const auto& axis : axis_list) {
        double rect_min = std::numeric_limits<double>::infinity(), rect_max = -rect_min;
        for (const auto& c : rect.corners) {
            const double p = axis.dot(c);
            rect_min = std::min(rect_min, p);
            rect_max = std::max(rect_max, p);
        }
        double cell_min = std::numeric_limits<double>::infinity(), cell_max = -cell_min;
        for (const auto& c : cell_corners) {
            const double p = axis.dot(c);
            cell_min = std::min(cell_min, p);
            cell_max = std::max(cell_max, p);
        }
        if (rect_max <= cell_min || cell_max <= rect_min) return false;
    }
    return true;
}

}  // namespace

std::vector<GridCellRef> rasterize_path(const PathCandidate& path,
                                        const mapping::MassDensityGrid& grid) {
    path.validate();
    if (!(grid.cell_size > 0.0)) throw InputError("rasterize_path: non-positive cell size");

    std::set<GridCellRef> cells;
    const double half = path.swept_width_m / 2.0;

    for (std::size_t s = 1; s < path.waypoints.size(); ++s) {
        const Eigen::Vector2d a = path.waypoints[s - 1];
        const Eigen::Vector2d b = path.waypoints[s];
        const Eigen::Vector2d dir = (b - a).normalized();
        const Eigen::Vector2d perp(-dir.y(), dir.x());

        OrientedRect rect;
        rect.corners[0] = a + perp * half;
        rect.corners[1] = b + perp * half;
        rect.corners[2] = b - perp * half;
        rect.corners[3] = a - perp * half;
        rect.axes[0] = dir;
        rect.axes[1] = perp;

        double lo_x = rect.corners[0].x(), hi_x = lo_x;
        double lo_y = rect.corners[0].y(), hi_y = lo_y;
        for (const auto& c : rect.corners) {
            lo_x = std::min(lo_x, c.x());
            hi_x = std::max(hi_x, c.x());
            lo_y = std::min(lo_y, c.y());
            hi_y = std::max(hi_y, c.y());
        }

        const int ix0 = grid.cell_index_x(lo_x), ix1 = grid.cell_index_x(hi_x);
        const int iy0 = grid.cell_index_y(lo_y), iy1 = grid.cell_index_y(hi_y);
        for (int iy = iy0; iy <= iy1; ++iy) {
            for (int ix = ix0; ix <= ix1; ++ix) {
                const Eigen::Vector2d cell_lo(grid.origin_x + ix * grid.cell_size,
                                              grid.origin_y + iy * grid.cell_size);
                const Eigen::Vector2d cell_hi(cell_lo.x() + grid.cell_size,
                                              cell_lo.y() + grid.cell_size);
                if (overlaps(rect, cell_lo, cell_hi)) cells.insert(GridCellRef{ix, iy});
            }
        }
    }
    return {cells.begin(), cells.end()};
}

TraversalCost alpha_grid(double robot_mass_kg, const mapping::MassDensityGrid& grid,
                         const std::vector<GridCellRef>& crossed, const std::string& id) {
    if (!(robot_mass_kg > 0.0)) throw InputError("alpha_grid: robot mass must be positive");

    TraversalCost cost;
    cost.id = id;
    const double area = grid.cell_area();
    double mass = 0.0;
    cost.per_cell.reserve(crossed.size());
    for (const auto& ref : crossed) {
        CellCost cc;
        cc.ix = ref.ix;
        cc.iy = ref.iy;
        cc.in_bounds = grid.in_bounds(ref.ix, ref.iy);
        cc.density_kg_m2 = grid.density_at(ref.ix, ref.iy);
        cc.mass_kg = cc.density_kg_m2 * area;
        mass += cc.mass_kg;
        cost.per_cell.push_back(cc);
    }
    cost.crossed_area_m2 = static_cast<double>(crossed.size()) * area;
    cost.integrated_mass_kg = mass;
    cost.alpha = alpha_continuous(robot_mass_kg, mass);
    return cost;
}

EvaluationResult evaluate_candidates(const std::vector<PathCandidate>& candidates,
                                     const mapping::MassDensityGrid& grid,
                                     const RobotSpec& robot) {
    if (candidates.empty()) throw InputError("evaluate_candidates: no candidates");
    robot.validate();
    grid.validate();

    EvaluationResult result;
    result.costs.reserve(candidates.size());
    std::size_t best = 0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const auto cells = rasterize_path(candidates[i], grid);
        result.costs.push_back(alpha_grid(robot.mass_kg, grid, cells, candidates[i].id));

        if (i == 0) continue;
        const auto& cur = result.costs[i];
        const auto& top = result.costs[best];
        const bool better =
            cur.alpha > top.alpha ||
            (cur.alpha == top.alpha &&
             (candidates[i].length() < candidates[best].length() ||
              (candidates[i].length() == candidates[best].length() &&
               candidates[i].id < candidates[best].id)));
        if (better) best = i;
    }
    result.selected_id = candidates[best].id;
    return result;
}

}  // namespace travmap::traversal
