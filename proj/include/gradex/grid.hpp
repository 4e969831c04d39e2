#pragma once

#include <cassert>
#include <stdexcept>
#include <vector>

#include "gradex/geometry.hpp"

namespace gradex {

/// Dense row-major 2D grid with a fixed metric resolution (meters per cell).
/// Cell (i, j) covers [i*res, (i+1)*res) x [j*res, (j+1)*res) in world
/// coordinates; its center is ((i+0.5)*res, (j+0.5)*res).
template <typename T>
class Grid {
public:
    Grid() = default;

    Grid(int width, int height, double resolution, T fill = T{})
        : width_(width), height_(height), resolution_(resolution),
          cells_(static_cast<std::size_t>(width) * height, fill) {
        if (width <= 0 || height <= 0)
            throw std::invalid_argument("grid dimensions must be positive");
        if (resolution <= 0.0)
            throw std::invalid_argument("grid resolution must be positive");
    }

    int width() const { return width_; }
    int height() const { return height_; }
    double resolution() const { return resolution_; }
    std::size_t size() const { return cells_.size(); }

    bool in_bounds(int i, int j) const {
        return i >= 0 && i < width_ && j >= 0 && j < height_;
    }

    T& at(int i, int j) {
        assert(in_bounds(i, j));
        return cells_[static_cast<std::size_t>(j) * width_ + i];
    }

    const T& at(int i, int j) const {
        assert(in_bounds(i, j));
        return cells_[static_cast<std::size_t>(j) * width_ + i];
    }

    /// World extent in meters.
    double width_m() const { return width_ * resolution_; }
    double height_m() const { return height_ * resolution_; }

    bool contains_point(double x, double y) const {
        return x >= 0.0 && x < width_m() && y >= 0.0 && y < height_m();
    }

    CellIndex cell_of(double x, double y) const {
        return {static_cast<int>(std::floor(x / resolution_)),
                static_cast<int>(std::floor(y / resolution_))};
    }

    Vec2 center(CellIndex c) const {
        return {(c.i + 0.5) * resolution_, (c.j + 0.5) * resolution_};
    }

    Vec2 center(int i, int j) const { return center(CellIndex{i, j}); }

    CellBox full_box() const { return {0, width_ - 1, 0, height_ - 1}; }

    const std::vector<T>& data() const { return cells_; }
    std::vector<T>& data() { return cells_; }

    bool operator==(const Grid& o) const {
        return width_ == o.width_ && height_ == o.height_ &&
               resolution_ == o.resolution_ && cells_ == o.cells_;
    }

private:
    int width_ = 0;
    int height_ = 0;
    double resolution_ = 1.0;
    std::vector<T> cells_;
};

}  // namespace gradex
