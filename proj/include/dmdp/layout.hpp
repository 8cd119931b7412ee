#pragma once

#include <cstdint>
#include <string>

#include "dmdp/grid.hpp"

namespace dmdp {

enum class LayoutFamily { empty, large_obstacles, random_dense, archipelago, rooms_corridors };

const char* layout_family_name(LayoutFamily family);
LayoutFamily layout_family_from_name(const std::string& name);

struct LayoutSpec {
    LayoutFamily family = LayoutFamily::empty;
    int width = 25;
    int height = 25;
    double obstacle_density = 0.2;  // used by random-dense
    int n_goals = 3;
    std::uint64_t seed = 0;
};

/// Parses a flat key=value layout spec file.
LayoutSpec parse_layout_spec(const std::string& text);
LayoutSpec load_layout_spec(const std::string& path);

/// Octile distance: cardinal cost 1, diagonal cost sqrt(2).
double octile_distance(Cell a, Cell b);

/// Deterministic map generation. Obstacles are drawn per family, the free
/// space is reduced to its largest movement-connected component, goals are
/// spread by farthest-point sampling, and the start is placed far from the
/// goal centroid. Throws GridError after bounded retries.
GridMap generate_layout(const LayoutSpec& spec);

}  // namespace dmdp
