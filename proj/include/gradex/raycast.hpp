#pragma once

#include <cmath>
#include <limits>

#include "gradex/geometry.hpp"

namespace gradex {

/// Step a ray through the grid, visiting every cell it crosses in order
/// (Amanatides & Woo). The visitor receives (i, j, t_entry) where t_entry is
/// the exact distance from the origin to the point where the ray enters the
/// cell (0 for the starting cell); returning false stops the walk. Traversal
/// ends when the entry distance exceeds t_limit or the ray leaves the grid.
template <typename Visitor>
void traverse_grid(Vec2 origin, Vec2 dir, double t_limit, int width, int height,
                   double resolution, Visitor&& visit) {
    constexpr double kInf = std::numeric_limits<double>::infinity();
    int i = static_cast<int>(std::floor(origin.x / resolution));
    int j = static_cast<int>(std::floor(origin.y / resolution));
    if (i < 0 || i >= width || j < 0 || j >= height) return;

    int step_i = dir.x > 0.0 ? 1 : (dir.x < 0.0 ? -1 : 0);
    int step_j = dir.y > 0.0 ? 1 : (dir.y < 0.0 ? -1 : 0);

    double t_max_x = kInf, t_max_y = kInf, t_delta_x = kInf, t_delta_y = kInf;
    if (step_i != 0) {
        double next_x = (step_i > 0 ? (i + 1) : i) * resolution;
        t_max_x = (next_x - origin.x) / dir.x;
        t_delta_x = resolution / std::abs(dir.x);
    }
    if (step_j != 0) {
        double next_y = (step_j > 0 ? (j + 1) : j) * resolution;
        t_max_y = (next_y - origin.y) / dir.y;
        t_delta_y = resolution / std::abs(dir.y);
    }

    double t_entry = 0.0;
    while (true) {
        if (!visit(i, j, t_entry)) return;
        if (t_max_x <= t_max_y) {
            t_entry = t_max_x;
            t_max_x += t_delta_x;
            i += step_i;
        } else {
            t_entry = t_max_y;
            t_max_y += t_delta_y;
            j += step_j;
        }
        if (t_entry > t_limit) return;
        if (i < 0 || i >= width || j < 0 || j >= height) return;
    }
}

}  // namespace gradex
