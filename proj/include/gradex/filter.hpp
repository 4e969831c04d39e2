#pragma once

#include <filesystem>
#include <random>
#include <sstream>
#include <vector>

#include "gradex/autodiff.hpp"
#include "gradex/geometry.hpp"
#include "gradex/grid.hpp"
#include "gradex/io.hpp"
#include "gradex/sensor.hpp"

namespace gradex {

/// Half-width, in cells, of the square footprint around a view-point. The
/// footprint spans twice the sensor range in every direction, which is
/// exactly where the distance falloff reaches zero.
inline int filter_half_width(double r_max, double resolution) {
    return static_cast<int>(std::floor(2.0 * r_max / resolution));
}

/// Footprint box of a view-point at (x, y): centered on the containing
/// cell, clipped to the map.
inline CellBox view_box(double x, double y, double resolution, int half, int width, int height) {
    int ci = static_cast<int>(std::floor(x / resolution));
    int cj = static_cast<int>(std::floor(y / resolution));
    return CellBox{ci - half, ci + half, cj - half, cj + half}.clipped(width, height);
}

/// Distance falloff: full credit inside the sensor range, linear decay to
/// zero at twice the range.
template <class S>
S distance_discount(const S& delta, double r_max) {
    double d = value_of(delta);
    if (d > 2.0 * r_max) return constant_like(delta, 0.0);
    if (d >= r_max) return (2.0 * r_max - delta) / r_max;
    return constant_like(delta, 1.0);
}

/// Angular falloff as a function of the cosine between the sensor heading
/// and the direction to the cell: 1 inside the field of view, then a linear
/// ramp in the cosine that vanishes only directly behind the sensor.
template <class S>
S angle_discount_from_dot(const S& dot, double fov) {
    const double cos_half = std::cos(fov / 2.0);
    if (value_of(dot) >= cos_half) return constant_like(dot, 1.0);
    const double inv = 1.0 / (1.0 + cos_half);
    return (dot + 1.0) * inv;
}

inline double angle_discount(const Vec2& u, const Vec2& v, double fov) {
    return angle_discount_from_dot(u.dot(v), fov);
}

/// One view-point prepared for footprint evaluation: coordinates, heading
/// direction, its own cell and its clipped footprint box. The box and the
/// own-cell index are fixed integer data; only the coordinates carry
/// derivatives.
template <class S>
struct PoseTerm {
    S x, y, cos_h, sin_h;
    CellIndex own;
    CellBox box;
};

inline PoseTerm<double> make_pose_term(const ViewPoint& vp, double resolution, int half,
                                       int width, int height) {
    PoseTerm<double> t;
    t.x = vp.x;
    t.y = vp.y;
    t.cos_h = std::cos(vp.theta);
    t.sin_h = std::sin(vp.theta);
    t.own = {static_cast<int>(std::floor(vp.x / resolution)),
             static_cast<int>(std::floor(vp.y / resolution))};
    t.box = view_box(vp.x, vp.y, resolution, half, width, height);
    return t;
}

/// Combined discount of one cell for one view-point. The cell containing
/// the view-point itself is handled by the caller (discount 1).
template <class S>
S pose_cell_discount(const PoseTerm<S>& pose, const Vec2& cell_center, const SensorSpec& spec,
                     const S& one) {
    using std::sqrt;
    S dx = cell_center.x - pose.x;
    S dy = cell_center.y - pose.y;
    S delta = sqrt(dx * dx + dy * dy);
    S phi_d = distance_discount(delta, spec.r_max);
    if (value_of(phi_d) == 0.0) return phi_d;
    S dot = (pose.cos_h * dx + pose.sin_h * dy) / delta;
    S phi_t = angle_discount_from_dot(dot, spec.fov);
    return phi_d * phi_t;
}

/// Union of per-view discounts over a set of view-points, combined per cell
/// by pointwise maximum, summed against the boundariness map. Cells inside
/// any excluded box are dropped from the footprint. `sink(i, j, value)` is
/// invoked for every contributing footprint cell in row-major order.
template <class S, class CellSink>
S accumulate_path_gain(const std::vector<PoseTerm<S>>& views, const std::vector<CellBox>& excluded,
                       const Grid<double>& bd, const SensorSpec& spec, bool include_zero_bd,
                       const S& zero, const S& one, CellSink&& sink) {
    CellBox ub;
    for (const auto& v : views) ub.include(v.box);
    S total = zero;
    if (ub.empty()) return total;
    for (int j = ub.j_min; j <= ub.j_max; ++j) {
        for (int i = ub.i_min; i <= ub.i_max; ++i) {
            bool drop = false;
            for (const CellBox& e : excluded)
                if (e.contains(i, j)) {
                    drop = true;
                    break;
                }
            if (drop) continue;
            double b = bd.at(i, j);
            if (!include_zero_bd && b == 0.0) continue;
            S best = zero;
            bool any = false;
            for (const PoseTerm<S>& v : views) {
                if (!v.box.contains(i, j)) continue;
                S phi = (i == v.own.i && j == v.own.j)
                            ? one
                            : pose_cell_discount(v, bd.center(i, j), spec, one);
                best = any ? smax(best, phi) : phi;
                any = true;
            }
            if (!any) continue;
            sink(i, j, value_of(best));
            total = total + best * b;
        }
    }
    return total;
}

struct NullCellSink {
    void operator()(int, int, double) const {}
};

/// Sparse cell -> discount mapping over a view-point's (or path's)
/// footprint, stored densely over the footprint's bounding box.
struct FuzzyFilter {
    CellBox box;
    std::vector<double> values;
    std::vector<std::uint8_t> in_footprint;

    void reset(CellBox b) {
        box = b;
        std::size_t n = b.empty() ? 0
                                  : static_cast<std::size_t>(b.i_max - b.i_min + 1) *
                                        (b.j_max - b.j_min + 1);
        values.assign(n, 0.0);
        in_footprint.assign(n, 0);
    }

    std::size_t offset(int i, int j) const {
        return static_cast<std::size_t>(j - box.j_min) * (box.i_max - box.i_min + 1) +
               (i - box.i_min);
    }

    bool contains(int i, int j) const {
        return box.contains(i, j) && in_footprint[offset(i, j)] != 0;
    }

    double at(int i, int j) const { return contains(i, j) ? values[offset(i, j)] : 0.0; }

    void set(int i, int j, double v) {
        values[offset(i, j)] = v;
        in_footprint[offset(i, j)] = 1;
    }

    std::size_t footprint_size() const {
        std::size_t n = 0;
        for (auto f : in_footprint) n += f;
        return n;
    }

    /// Rows of (i, j, discount) over the footprint.
    void write_csv(const std::filesystem::path& path) const {
        std::ostringstream out;
        out << "i,j,discount\n";
        if (!box.empty()) {
            for (int j = box.j_min; j <= box.j_max; ++j)
                for (int i = box.i_min; i <= box.i_max; ++i)
                    if (in_footprint[offset(i, j)])
                        out << i << "," << j << "," << fmt_double(values[offset(i, j)]) << "\n";
        }
        atomic_write_text(path, out.str());
    }
};

/// Discount filter of a single view-point over every in-bounds cell of its
/// footprint box, keyed by map indices.
inline FuzzyFilter build_view_filter(const ViewPoint& vp, const SensorSpec& spec, int width,
                                     int height, double resolution) {
    if (!(vp.x >= 0.0 && vp.x < width * resolution && vp.y >= 0.0 && vp.y < height * resolution))
        throw std::invalid_argument("build_view_filter: view-point outside map bounds");
    const int half = filter_half_width(spec.r_max, resolution);
    PoseTerm<double> pose = make_pose_term(vp, resolution, half, width, height);
    FuzzyFilter f;
    f.reset(pose.box);
    if (pose.box.empty()) return f;
    for (int j = pose.box.j_min; j <= pose.box.j_max; ++j)
        for (int i = pose.box.i_min; i <= pose.box.i_max; ++i) {
            double phi = (i == pose.own.i && j == pose.own.j)
                             ? 1.0
                             : pose_cell_discount(pose, Vec2{(i + 0.5) * resolution,
                                                             (j + 0.5) * resolution},
                                                  spec, 1.0);
            f.set(i, j, phi);
        }
    return f;
}

/// Discounted boundariness visible from a single view-point.
inline double view_information_gain(const ViewPoint& vp, const Grid<double>& bd,
                                    const SensorSpec& spec) {
    const int half = filter_half_width(spec.r_max, bd.resolution());
    std::vector<PoseTerm<double>> views{
        make_pose_term(vp, bd.resolution(), half, bd.width(), bd.height())};
    return accumulate_path_gain(views, {}, bd, spec, true, 0.0, 1.0, NullCellSink{});
}

/// Interpolation parameters that thicken a sparse path into the expected
/// view-point density (one per two cells of arc length). Drawn once and
/// then frozen, so downstream objective evaluations stay a fixed function
/// of the vertex coordinates.
struct PathSamplingPlan {
    struct Sample {
        int segment;  // between path vertex `segment` and `segment + 1`
        double t;     // position parameter in [0, 1)
    };
    std::vector<Sample> samples;  // ordered along the path
};

inline PathSamplingPlan make_sampling_plan(const Path& path, double resolution,
                                           std::mt19937_64& rng) {
    PathSamplingPlan plan;
    if (path.size() < 2) return plan;
    const int k = static_cast<int>(path.size()) - 1;
    std::vector<double> prefix(k + 1, 0.0);
    for (int s = 0; s < k; ++s)
        prefix[s + 1] = prefix[s] + distance(path[s + 1].position(), path[s].position());
    const double total = prefix[k];
    if (total <= 0.0) return plan;
    const long needed = static_cast<long>(std::ceil(total / (2.0 * resolution)));
    const long n_new = needed - k;
    if (n_new <= 0) return plan;
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    plan.samples.reserve(n_new);
    for (long m = 0; m < n_new; ++m) {
        double arc = total * (static_cast<double>(m) + uni(rng)) / static_cast<double>(n_new);
        int s = 0;
        while (s + 1 < k && arc >= prefix[s + 1]) ++s;
        double len = prefix[s + 1] - prefix[s];
        double t = len > 0.0 ? std::clamp((arc - prefix[s]) / len, 0.0, 1.0) : 0.0;
        plan.samples.push_back({s, t});
    }
    return plan;
}

inline ViewPoint interpolate_viewpoint(const ViewPoint& a, const ViewPoint& b, double t) {
    return {(1.0 - t) * a.x + t * b.x, (1.0 - t) * a.y + t * b.y,
            a.theta + t * wrap_angle(b.theta - a.theta)};
}

/// Interior vertices plus the plan's interpolated points, in path order.
/// This is the view-point list that contributes to a path's gain (and that
/// the robot visits when executing the path); the fixed endpoints are not
/// part of it.
inline std::vector<ViewPoint> augmented_interior_points(const Path& path,
                                                        const PathSamplingPlan& plan) {
    std::vector<ViewPoint> pts;
    if (path.size() < 2) return pts;
    const int k = static_cast<int>(path.size()) - 1;
    std::size_t si = 0;
    for (int s = 0; s < k; ++s) {
        if (s > 0) pts.push_back(path[s]);
        while (si < plan.samples.size() && plan.samples[si].segment == s) {
            pts.push_back(interpolate_viewpoint(path[s], path[s + 1], plan.samples[si].t));
            ++si;
        }
    }
    return pts;
}

struct PathGainResult {
    double gain = 0.0;
    FuzzyFilter union_filter;               // pointwise-max union over the interior footprint
    std::vector<ViewPoint> sampled_points;  // augmented interior view-point list
};

/// Information gain of a path: the max-union discount filter of the
/// interior (augmented) view-points, with the endpoint footprints removed,
/// summed against the boundariness map.
inline PathGainResult path_information_gain(const Path& path, const Grid<double>& bd,
                                            const SensorSpec& spec,
                                            const PathSamplingPlan& plan) {
    PathGainResult res;
    if (path.size() < 2) return res;
    res.sampled_points = augmented_interior_points(path, plan);
    const double resolution = bd.resolution();
    const int half = filter_half_width(spec.r_max, resolution);
    std::vector<PoseTerm<double>> views;
    views.reserve(res.sampled_points.size());
    for (const ViewPoint& vp : res.sampled_points)
        views.push_back(make_pose_term(vp, resolution, half, bd.width(), bd.height()));
    std::vector<CellBox> excluded{
        view_box(path.front().x, path.front().y, resolution, half, bd.width(), bd.height()),
        view_box(path.back().x, path.back().y, resolution, half, bd.width(), bd.height())};
    CellBox ub;
    for (const auto& v : views) ub.include(v.box);
    res.union_filter.reset(ub);
    res.gain = accumulate_path_gain(views, excluded, bd, spec, true, 0.0, 1.0,
                                    [&](int i, int j, double v) { res.union_filter.set(i, j, v); });
    return res;
}

/// Convenience overload that draws (and discards) a fresh sampling plan.
inline PathGainResult path_information_gain(const Path& path, const Grid<double>& bd,
                                            const SensorSpec& spec, std::mt19937_64& rng) {
    return path_information_gain(path, bd, spec, make_sampling_plan(path, bd.resolution(), rng));
}

/// Total boundariness visible from anywhere on the path: the max-union
/// discount over every view-point (endpoints included, nothing subtracted)
/// summed against the boundariness map. Unlike path_information_gain this
/// does not credit only what the interior adds beyond the endpoints; it
/// measures whether the path sees any boundary at all, which is the signal
/// the exploration loop's stagnation window needs.
inline double path_visible_boundariness(const Path& path, const Grid<double>& bd,
                                        const SensorSpec& spec, const PathSamplingPlan& plan) {
    if (path.empty()) return 0.0;
    const double resolution = bd.resolution();
    const int half = filter_half_width(spec.r_max, resolution);
    std::vector<PoseTerm<double>> views;
    views.push_back(make_pose_term(path.front(), resolution, half, bd.width(), bd.height()));
    for (const ViewPoint& vp : augmented_interior_points(path, plan))
        views.push_back(make_pose_term(vp, resolution, half, bd.width(), bd.height()));
    if (path.size() >= 2)
        views.push_back(make_pose_term(path.back(), resolution, half, bd.width(), bd.height()));
    return accumulate_path_gain(views, {}, bd, spec, false, 0.0, 1.0, NullCellSink{});
}

}  // namespace gradex
