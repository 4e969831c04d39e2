#pragma once

#include <cmath>

#include "gradex/occupancy.hpp"
#include "gradex/raycast.hpp"
#include "gradex/world.hpp"

namespace gradex {

/// Traversable-space queries against a map. Built from a log-odds map,
/// only known-free cells are traversable: both occupied and unknown cells
/// block (the robot moves strictly within explored free space). Built from
/// a ground-truth world, only occupied cells block. An optional inflation
/// radius grows blocked regions by a disk, approximating a robot footprint.
class TraversabilityMap {
public:
    explicit TraversabilityMap(const LogOddsMap& odds, double inflation_radius = 0.0)
        : free_(odds.width(), odds.height(), odds.resolution(), 0) {
        for (int j = 0; j < free_.height(); ++j)
            for (int i = 0; i < free_.width(); ++i)
                free_.at(i, j) = odds.known_free(i, j) ? 1 : 0;
        if (inflation_radius > 0.0) inflate(inflation_radius);
    }

    explicit TraversabilityMap(const WorldMap& world, double inflation_radius = 0.0)
        : free_(world.width(), world.height(), world.resolution(), 0) {
        for (int j = 0; j < free_.height(); ++j)
            for (int i = 0; i < free_.width(); ++i)
                free_.at(i, j) = world.free(i, j) ? 1 : 0;
        if (inflation_radius > 0.0) inflate(inflation_radius);
    }

    double resolution() const { return free_.resolution(); }
    int width() const { return free_.width(); }
    int height() const { return free_.height(); }

    bool cell_free(int i, int j) const {
        return free_.in_bounds(i, j) && free_.at(i, j) != 0;
    }

    /// Force a cell traversable. The cell the robot currently occupies is
    /// free by construction even when fused wall evidence says otherwise.
    void mark_cell_free(int i, int j) {
        if (free_.in_bounds(i, j)) free_.at(i, j) = 1;
    }

    void mark_point_free(double x, double y) {
        if (!free_.contains_point(x, y)) return;
        CellIndex c = free_.cell_of(x, y);
        mark_cell_free(c.i, c.j);
    }

    bool point_free(double x, double y) const {
        if (!free_.contains_point(x, y)) return false;
        CellIndex c = free_.cell_of(x, y);
        return free_.at(c.i, c.j) != 0;
    }

    /// Exact straight-segment check: every grid cell the segment crosses
    /// must be traversable.
    bool segment_free(const Vec2& a, const Vec2& b) const {
        if (!point_free(a.x, a.y) || !point_free(b.x, b.y)) return false;
        Vec2 d = b - a;
        double len = d.norm();
        if (len < 1e-12) return true;
        Vec2 dir = d * (1.0 / len);
        bool ok = true;
        traverse_grid(a, dir, len, width(), height(), resolution(),
                      [&](int i, int j, double) {
                          if (!cell_free(i, j)) {
                              ok = false;
                              return false;
                          }
                          return true;
                      });
        return ok;
    }

    bool path_free(const Path& path) const {
        if (path.empty()) return false;
        if (!point_free(path[0].x, path[0].y)) return false;
        for (std::size_t i = 1; i < path.size(); ++i)
            if (!segment_free(path[i - 1].position(), path[i].position())) return false;
        return true;
    }

private:
    Grid<std::uint8_t> free_;

    void inflate(double radius) {
        int r = static_cast<int>(std::ceil(radius / resolution()));
        Grid<std::uint8_t> out = free_;
        for (int j = 0; j < free_.height(); ++j)
            for (int i = 0; i < free_.width(); ++i) {
                if (free_.at(i, j) != 0) continue;  // blocked source cell
                for (int dj = -r; dj <= r; ++dj)
                    for (int di = -r; di <= r; ++di) {
                        if (di * di + dj * dj > r * r) continue;
                        if (out.in_bounds(i + di, j + dj)) out.at(i + di, j + dj) = 0;
                    }
            }
        free_ = std::move(out);
    }
};

}  // namespace gradex
