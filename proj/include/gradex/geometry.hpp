#pragma once

#include <cmath>
#include <vector>

namespace gradex {

inline constexpr double kPi = 3.14159265358979323846;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double norm() const { return std::sqrt(x * x + y * y); }
};

inline double distance(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

/// Robot configuration: planar position in meters plus heading in radians.
struct ViewPoint {
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0;

    Vec2 position() const { return {x, y}; }
};

using Path = std::vector<ViewPoint>;

inline double path_length(const Path& path) {
    double len = 0.0;
    for (std::size_t i = 1; i < path.size(); ++i)
        len += distance(path[i].position(), path[i - 1].position());
    return len;
}

/// Reduce an angle to (-pi, pi].
inline double wrap_angle(double a) {
    double w = a - 2.0 * kPi * std::floor((a + kPi) / (2.0 * kPi));
    if (w <= -kPi) w += 2.0 * kPi;
    return w;
}

struct CellIndex {
    int i = 0;  // column, along +x
    int j = 0;  // row, along +y

    bool operator==(const CellIndex& o) const { return i == o.i && j == o.j; }
};

/// Inclusive axis-aligned range of cell indices. Default-constructed boxes are empty.
struct CellBox {
    int i_min = 0;
    int i_max = -1;
    int j_min = 0;
    int j_max = -1;

    bool empty() const { return i_max < i_min || j_max < j_min; }

    bool contains(int i, int j) const {
        return i >= i_min && i <= i_max && j >= j_min && j <= j_max;
    }

    void include(int i, int j) {
        if (empty()) {
            i_min = i_max = i;
            j_min = j_max = j;
            return;
        }
        if (i < i_min) i_min = i;
        if (i > i_max) i_max = i;
        if (j < j_min) j_min = j;
        if (j > j_max) j_max = j;
    }

    void include(const CellBox& o) {
        if (o.empty()) return;
        include(o.i_min, o.j_min);
        include(o.i_max, o.j_max);
    }

    CellBox dilated(int r) const {
        if (empty()) return *this;
        return {i_min - r, i_max + r, j_min - r, j_max + r};
    }

    CellBox clipped(int width, int height) const {
        if (empty()) return *this;
        CellBox b{std::max(i_min, 0), std::min(i_max, width - 1),
                  std::max(j_min, 0), std::min(j_max, height - 1)};
        return b;
    }
};

}  // namespace gradex
