#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "travmap/rng.hpp"
#include "travmap/traversal.hpp"

using namespace travmap;
using mapping::MassDensityGrid;
using traversal::GridCellRef;
using traversal::PathCandidate;

namespace {

MassDensityGrid uniform_grid(int width, int height, double density, double cell_size = 0.5,
                             double origin_x = 0.0, double origin_y = 0.0) {
    MassDensityGrid grid;
    grid.cell_size = cell_size;
    grid.origin_x = origin_x;
    grid.origin_y = origin_y;
    grid.width = width;
    grid.height = height;
    grid.default_density = 250.0;
    grid.values.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height),
                       density);
    grid.states.assign(grid.values.size(), mapping::CellState::Observed);
    return grid;
}

PathCandidate straight_path(const std::string& id, double x0, double y0, double x1, double y1,
                            double width) {
    PathCandidate p;
    p.id = id;
    p.waypoints = {{x0, y0}, {x1, y1}};
    p.swept_width_m = width;
    return p;
}

// Sutherland-Hodgman clip of the swept rectangle against one cell; the cell
// counts when the clipped polygon has positive area. Completely independent
// of the separating-axis test used by the implementation.
double clipped_overlap_area(const std::vector<Eigen::Vector2d>& rect, double cx0, double cy0,
                            double cx1, double cy1) {
    std::vector<Eigen::Vector2d> poly = rect;
    auto clip = [&](auto inside, auto intersect) {
        std::vector<Eigen::Vector2d> out;
        for (std::size_t i = 0; i < poly.size(); ++i) {
            const auto& a = poly[i];
            const auto& b = poly[(i + 1) % poly.size()];
            const bool ain = inside(a), bin = inside(b);
            if (ain) out.push_back(a);
            if (ain != bin) out.push_back(intersect(a, b));
        }
        poly = std::move(out);
    };
    auto cut_x = [&](double x, bool keep_greater) {
        clip([&](const Eigen::Vector2d& p) { return keep_greater ? p.x() >= x : p.x() <= x; },
             [&](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
                 const double t = (x - a.x()) / (b.x() - a.x());
                 return Eigen::Vector2d(x, a.y() + t * (b.y() - a.y()));
             });
    };
    auto cut_y = [&](double y, bool keep_greater) {
        clip([&](const Eigen::Vector2d& p) { return keep_greater ? p.y() >= y : p.y() <= y; },
             [&](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
                 const double t = (y - a.y()) / (b.y() - a.y());
                 return Eigen::Vector2d(a.x() + t * (b.x() - a.x()), y);
             });
    };
    cut_x(cx0, true);
    cut_x(cx1, false);
    cut_y(cy0, true);
    cut_y(cy1, false);
    if (poly.size() < 3) return 0.0;
    double area2 = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const auto& a = poly[i];
        const auto& b = poly[(i + 1) % poly.size()];
        area2 += a.x() * b.y() - b.x() * a.y();
    }
    return std::abs(area2) / 2.0;
}

std::set<GridCellRef> oracle_cells(const PathCandidate& path, const MassDensityGrid& grid,
                                   int pad = 4) {
    std::set<GridCellRef> out;
    for (std::size_t s = 0; s + 1 < path.waypoints.size(); ++s) {
        const Eigen::Vector2d a = path.waypoints[s], b = path.waypoints[s + 1];
        const Eigen::Vector2d dir = (b - a).normalized();
        const Eigen::Vector2d perp(-dir.y(), dir.x());
        const double hw = path.swept_width_m / 2.0;
        const std::vector<Eigen::Vector2d> rect = {a + perp * hw, b + perp * hw, b - perp * hw,
                                                   a - perp * hw};
        for (int iy = -pad; iy < grid.height + pad; ++iy)
            for (int ix = -pad; ix < grid.width + pad; ++ix) {
                const double cx0 = grid.origin_x + ix * grid.cell_size;
                const double cy0 = grid.origin_y + iy * grid.cell_size;
                if (clipped_overlap_area(rect, cx0, cy0, cx0 + grid.cell_size,
                                         cy0 + grid.cell_size) > 1e-12)
                    out.insert({ix, iy});
            }
    }
    return out;
}

}  // namespace

TEST_CASE("collision alpha: frozen mass ratios") {
    CHECK(traversal::collision_alpha(250.0, 0.0) == 1.0);
    CHECK(traversal::collision_alpha(250.0, 250.0) == 0.5);
    CHECK(traversal::collision_alpha(250.0, 750.0) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK_THROWS_AS(static_cast<void>(traversal::collision_alpha(0.0, 1.0)), InputError);
    CHECK_THROWS_AS(static_cast<void>(traversal::collision_alpha(250.0, -1.0)), InputError);
}

TEST_CASE("alpha_discrete: frozen cases") {
    CHECK(traversal::alpha_discrete(250.0, {0.0, 0.0, 0.0}, 0.5) == 1.0);
    CHECK(traversal::alpha_discrete(250.0, {20.0}, 1.0) ==
          doctest::Approx(250.0 / 270.0).epsilon(1e-12));
    CHECK(traversal::alpha_discrete(250.0, {}, 1.0) == 1.0);
    CHECK_THROWS_AS(static_cast<void>(traversal::alpha_discrete(250.0, {1.0}, 0.0)), InputError);
    CHECK_THROWS_AS(static_cast<void>(traversal::alpha_discrete(250.0, {-1.0}, 0.5)),
                    InputError);
}

TEST_CASE("alpha_continuous: frozen cases") {
    CHECK(traversal::alpha_continuous(250.0, 0.0) == 1.0);
    CHECK(traversal::alpha_continuous(250.0, 250.0) ==
          doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    CHECK(traversal::alpha_continuous(250.0, 20.0) ==
          doctest::Approx(std::exp(-0.08)).epsilon(1e-12));
    CHECK_THROWS_AS(static_cast<void>(traversal::alpha_continuous(250.0, -1.0)), InputError);
    // Extreme mass underflows the exponential but never reaches zero.
    CHECK(traversal::alpha_continuous(1.0, 1e6) > 0.0);
}

TEST_CASE("discrete alpha dominates the continuous bound on any partition") {
    rng::SplitMix64 gen(21);
    for (int trial = 0; trial < 300; ++trial) {
        const double m_r = 50.0 + 1950.0 * gen.uniform01();
        const double delta_a = 0.01 + 0.99 * gen.uniform01();
        const std::size_t n = 1 + gen.index(40);
        std::vector<double> densities;
        double mass = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            densities.push_back(2400.0 * gen.uniform01());
            mass += densities.back() * delta_a;
        }
        const double discrete = traversal::alpha_discrete(m_r, densities, delta_a);
        const double continuous = traversal::alpha_continuous(m_r, mass);
        CHECK(discrete >= continuous);
    }
}

TEST_CASE("discrete alpha converges to the continuous limit") {
    const int n = 100000;
    const std::vector<double> densities(n, 20.0);
    const double alpha = traversal::alpha_discrete(250.0, densities, 1.0 / n);
    CHECK(std::abs(alpha - std::exp(-0.08)) < 1e-3);
}

TEST_CASE("kinetic energy loss") {
    CHECK(traversal::kinetic_energy_loss(1.0) == 0.0);
    CHECK(traversal::kinetic_energy_loss(0.5) == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("rasterize: axis-aligned sweep covers exactly the cells under the segment") {
    const auto grid = uniform_grid(10, 10, 20.0);
    // Sweep y in [1.05, 1.45], fully inside row 2; x spans columns 0..4.
    const auto cells =
        traversal::rasterize_path(straight_path("p", 0.25, 1.25, 2.25, 1.25, 0.4), grid);
    REQUIRE(cells.size() == 5);
    for (int i = 0; i < 5; ++i) {
        CHECK(cells[static_cast<std::size_t>(i)].ix == i);
        CHECK(cells[static_cast<std::size_t>(i)].iy == 2);
    }
}

TEST_CASE("rasterize: edge tangency does not count") {
    const auto grid = uniform_grid(10, 10, 20.0);
    // Sweep boundary exactly on the row-2/row-3 cell edges.
    const auto cells =
        traversal::rasterize_path(straight_path("p", 0.25, 1.25, 2.25, 1.25, 0.5), grid);
    for (const auto& c : cells) CHECK(c.iy == 2);
    REQUIRE(cells.size() == 5);
}

TEST_CASE("rasterize: revisited cells count once") {
    const auto grid = uniform_grid(10, 10, 20.0);
    PathCandidate out_and_back;
    out_and_back.id = "loop";
    out_and_back.waypoints = {{0.25, 1.25}, {2.25, 1.25}, {0.25, 1.25}};
    out_and_back.swept_width_m = 0.4;
    const auto once = traversal::rasterize_path(
        straight_path("p", 0.25, 1.25, 2.25, 1.25, 0.4), grid);
    const auto twice = traversal::rasterize_path(out_and_back, grid);
    CHECK(once == twice);
}

TEST_CASE("rasterize: collinear waypoint split leaves the cell set unchanged") {
    const auto grid = uniform_grid(10, 10, 20.0);
    // Exactly representable midpoint, so both segment directions normalize
    // to bit-identical vectors.
    PathCandidate split;
    split.id = "split";
    split.waypoints = {{0.125, 0.0625}, {0.75, 0.5}, {1.375, 0.9375}};
    split.swept_width_m = 0.33;
    PathCandidate direct;
    direct.id = "direct";
    direct.waypoints = {{0.125, 0.0625}, {1.375, 0.9375}};
    direct.swept_width_m = 0.33;
    CHECK(traversal::rasterize_path(split, grid) == traversal::rasterize_path(direct, grid));
}

TEST_CASE("rasterize matches the polygon-clipping oracle") {
    rng::SplitMix64 gen(33);
    const auto grid = uniform_grid(6, 6, 20.0, 0.5);
    for (int trial = 0; trial < 150; ++trial) {
        PathCandidate path;
        path.id = "r";
        const int segments = 1 + static_cast<int>(gen.index(3));
        path.waypoints.emplace_back(3.0 * gen.uniform01(), 3.0 * gen.uniform01());
        for (int s = 0; s < segments; ++s) {
            Eigen::Vector2d next;
            do {
                next = {3.0 * gen.uniform01(), 3.0 * gen.uniform01()};
            } while ((next - path.waypoints.back()).norm() < 1e-3);
            path.waypoints.push_back(next);
        }
        path.swept_width_m = 0.1 + 0.6 * gen.uniform01();

        const auto got = traversal::rasterize_path(path, grid);
        const auto expected = oracle_cells(path, grid);
        CHECK(std::set<GridCellRef>(got.begin(), got.end()) == expected);
        CHECK(got.size() == expected.size());  // no duplicates in the returned list
        CHECK(std::is_sorted(got.begin(), got.end()));
    }
}

TEST_CASE("alpha_grid: frozen grid-cost cases") {
    const auto grid = uniform_grid(10, 10, 20.0);
    std::vector<GridCellRef> ten;
    for (int i = 0; i < 10; ++i) ten.push_back({i, 0});
    const auto cost = traversal::alpha_grid(250.0, grid, ten, "ten");
    CHECK(cost.alpha == doctest::Approx(std::exp(-0.2)).epsilon(1e-12));
    CHECK(cost.integrated_mass_kg == doctest::Approx(50.0).epsilon(1e-12));
    CHECK(cost.crossed_area_m2 == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(cost.id == "ten");
    REQUIRE(cost.per_cell.size() == 10);
    CHECK(cost.per_cell[0].mass_kg == doctest::Approx(5.0).epsilon(1e-12));

    const auto concrete = uniform_grid(10, 10, 2400.0);
    const auto one = traversal::alpha_grid(250.0, concrete, {{0, 0}}, "one");
    CHECK(one.alpha == doctest::Approx(std::exp(-2.4)).epsilon(1e-12));

    CHECK(traversal::alpha_grid(250.0, grid, {}, "free").alpha == 1.0);
}

TEST_CASE("alpha_grid: out-of-grid cells bill the unknown density") {
    const auto grid = uniform_grid(2, 2, 0.0);
    const auto cost = traversal::alpha_grid(250.0, grid, {{5, 5}}, "out");
    REQUIRE(cost.per_cell.size() == 1);
    CHECK_FALSE(cost.per_cell[0].in_bounds);
    CHECK(cost.per_cell[0].density_kg_m2 == 250.0);
    CHECK(cost.alpha == doctest::Approx(std::exp(-0.25)).epsilon(1e-12));
}

TEST_CASE("alpha_grid: disjoint path pieces multiply") {
    const auto grid = uniform_grid(10, 10, 150.0);
    const std::vector<GridCellRef> part1 = {{0, 0}, {1, 0}};
    const std::vector<GridCellRef> part2 = {{5, 5}, {6, 5}, {7, 5}};
    std::vector<GridCellRef> both = part1;
    both.insert(both.end(), part2.begin(), part2.end());
    const double a1 = traversal::alpha_grid(250.0, grid, part1).alpha;
    const double a2 = traversal::alpha_grid(250.0, grid, part2).alpha;
    const double ab = traversal::alpha_grid(250.0, grid, both).alpha;
    CHECK(ab == doctest::Approx(a1 * a2).epsilon(1e-12));
}

TEST_CASE("alpha monotonicity in crossed cells and robot mass") {
    rng::SplitMix64 gen(44);
    for (int trial = 0; trial < 100; ++trial) {
        auto grid = uniform_grid(8, 8, 0.0);
        for (auto& v : grid.values) v = 2400.0 * gen.uniform01();
        std::vector<GridCellRef> cells;
        std::set<GridCellRef> used;
        const std::size_t n = 1 + gen.index(10);
        while (cells.size() < n) {
            GridCellRef c{static_cast<int>(gen.index(8)), static_cast<int>(gen.index(8))};
            if (used.insert(c).second) cells.push_back(c);
        }
        const double m_r = 50.0 + 500.0 * gen.uniform01();
        const double base = traversal::alpha_grid(m_r, grid, cells).alpha;

        // One extra strictly positive cell strictly lowers alpha.
        GridCellRef extra;
        do {
            extra = {static_cast<int>(gen.index(8)), static_cast<int>(gen.index(8))};
        } while (used.count(extra));
        grid.values[grid.offset(extra.ix, extra.iy)] = 0.1 + 2400.0 * gen.uniform01();
        auto more = cells;
        more.push_back(extra);
        CHECK(traversal::alpha_grid(m_r, grid, more).alpha < base);

        // A heavier robot never does worse.
        CHECK(traversal::alpha_grid(2.0 * m_r, grid, cells).alpha >= base);
    }
}

TEST_CASE("evaluate_candidates: highest alpha wins") {
    auto grid = uniform_grid(10, 10, 0.0);
    // Block rows except a clear lane at y in [2, 2.5).
    for (int iy = 0; iy < 10; ++iy)
        for (int ix = 0; ix < 10; ++ix)
            if (iy != 4) grid.values[grid.offset(ix, iy)] = 2400.0;

    const std::vector<PathCandidate> candidates = {
        straight_path("blocked", 0.25, 1.25, 4.75, 1.25, 0.4),
        straight_path("clear", 0.25, 2.25, 4.75, 2.25, 0.4),
    };
    const auto result = traversal::evaluate_candidates(candidates, grid, {});
    CHECK(result.selected_id == "clear");
    REQUIRE(result.costs.size() == 2);
    CHECK(result.costs[0].id == "blocked");
    CHECK(result.costs[1].alpha > result.costs[0].alpha);
    CHECK(result.costs[1].alpha == 1.0);
}

TEST_CASE("evaluate_candidates: tie-breaks are shorter length then lower id") {
    const auto grid = uniform_grid(10, 10, 0.0);
    // Same alpha (free space), different lengths.
    const std::vector<PathCandidate> by_length = {
        straight_path("long", 0.25, 1.25, 4.25, 1.25, 0.4),
        straight_path("short", 0.25, 2.25, 2.25, 2.25, 0.4),
    };
    CHECK(traversal::evaluate_candidates(by_length, grid, {}).selected_id == "short");

    // Identical geometry: lexicographically lower id wins.
    const std::vector<PathCandidate> by_id = {
        straight_path("b", 0.25, 1.25, 2.25, 1.25, 0.4),
        straight_path("a", 0.25, 1.25, 2.25, 1.25, 0.4),
    };
    CHECK(traversal::evaluate_candidates(by_id, grid, {}).selected_id == "a");

    CHECK_THROWS_AS(static_cast<void>(traversal::evaluate_candidates({}, grid, {})), InputError);
}

TEST_CASE("selection is invariant to uniform density rescaling") {
    rng::SplitMix64 gen(55);
    for (int trial = 0; trial < 30; ++trial) {
        auto grid = uniform_grid(8, 8, 0.0);
        for (auto& v : grid.values) v = 1000.0 * gen.uniform01();
        const std::vector<PathCandidate> candidates = {
            straight_path("a", 0.3, 0.7, 3.6, 0.7, 0.4),
            straight_path("b", 0.3, 1.7, 3.6, 1.9, 0.4),
            straight_path("c", 0.3, 2.7, 3.6, 3.4, 0.4),
        };
        const auto base = traversal::evaluate_candidates(candidates, grid, {});
        auto scaled = grid;
        const double k = 0.2 + 3.0 * gen.uniform01();
        for (auto& v : scaled.values) v *= k;
        scaled.default_density *= k;
        const auto rescaled = traversal::evaluate_candidates(candidates, scaled, {});
        CHECK(base.selected_id == rescaled.selected_id);
    }
}

TEST_CASE("path validation") {
    PathCandidate p;
    p.id = "x";
    p.swept_width_m = 0.4;
    p.waypoints = {{0.0, 0.0}};
    CHECK_THROWS_AS(p.validate(), InputError);
    p.waypoints = {{0.0, 0.0}, {0.0, 0.0}};
    CHECK_THROWS_AS(p.validate(), InputError);
    p.waypoints = {{0.0, 0.0}, {1.0, 0.0}};
    CHECK_NOTHROW(p.validate());
    CHECK(p.length() == doctest::Approx(1.0));
    p.swept_width_m = 0.0;
    CHECK_THROWS_AS(p.validate(), InputError);

    traversal::RobotSpec robot;
    robot.mass_kg = -1.0;
    CHECK_THROWS_AS(robot.validate(), InputError);
}
