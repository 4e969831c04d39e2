#pragma once

#include <algorithm>
#include <optional>
#include <random>
#include <vector>

#include "gradex/boundariness.hpp"
#include "gradex/collision.hpp"
#include "gradex/filter.hpp"

namespace gradex {

struct GoalScoreParams {
    double lambda1 = 0.1;                 // distance decay, per meter
    double lambda2 = 0.05;                // obstacle-count decay, per cell
    double obstacle_box_half_width = 1.0; // meters
    int sample_count = 200;

    void validate() const {
        if (!(lambda1 > 0.0 && lambda1 < 1.0 && lambda2 > 0.0 && lambda2 < 1.0))
            throw std::invalid_argument("goal: lambda1, lambda2 must be in (0, 1)");
        if (sample_count < 1) throw std::invalid_argument("goal: sample_count must be >= 1");
    }
};

inline int count_occupied_in_box(const LogOddsMap& odds, const ViewPoint& xi, double half_width) {
    int r = static_cast<int>(std::ceil(half_width / odds.resolution()));
    CellIndex c = odds.grid().cell_of(xi.x, xi.y);
    int n = 0;
    for (int j = c.j - r; j <= c.j + r; ++j)
        for (int i = c.i - r; i <= c.i + r; ++i)
            if (odds.grid().in_bounds(i, j) && odds.known_occupied(i, j)) ++n;
    return n;
}

/// Goal attractiveness: boundariness mass inside the candidate's field of
/// view (the hard sensor wedge: within range and within the view cone),
/// decayed by distance from the start pose and by the number of occupied
/// cells in a box around the candidate. The hard wedge keeps the score
/// local, so candidates that cannot actually see a boundary score zero and
/// the argmax sits near the frontier.
inline double score_goal_candidate(const ViewPoint& xi, const Grid<double>& bd,
                                   const LogOddsMap& odds, const ViewPoint& start,
                                   const GoalScoreParams& params, const SensorSpec& spec) {
    const double res = bd.resolution();
    const int reach = static_cast<int>(std::ceil(spec.r_max / res));
    const double cos_half = std::cos(spec.fov / 2.0);
    CellIndex c = bd.cell_of(xi.x, xi.y);
    const double ux = std::cos(xi.theta), uy = std::sin(xi.theta);
    double mass = 0.0;
    for (int j = c.j - reach; j <= c.j + reach; ++j)
        for (int i = c.i - reach; i <= c.i + reach; ++i) {
            if (!bd.in_bounds(i, j)) continue;
            Vec2 cc = bd.center(i, j);
            double dx = cc.x - xi.x, dy = cc.y - xi.y;
            double d = std::sqrt(dx * dx + dy * dy);
            if (d > spec.r_max) continue;
            if (d > 1e-9 && (ux * dx + uy * dy) / d < cos_half) continue;
            mass += bd.at(i, j);
        }
    double dist = distance(start.position(), xi.position());
    int n_occ = count_occupied_in_box(odds, xi, params.obstacle_box_half_width);
    return mass * std::exp(-params.lambda1 * dist) * std::exp(-params.lambda2 * n_occ);
}

/// Sample candidate view-points uniformly over the known-free cells (with
/// uniform heading) and return the best-scoring one; ties resolve to the
/// earliest sample. Returns nothing when no free cell is known yet.
inline std::optional<ViewPoint> select_goal(const Grid<double>& bd, const LogOddsMap& odds,
                                            const ViewPoint& start, const GoalScoreParams& params,
                                            const SensorSpec& spec, std::mt19937_64& rng) {
    params.validate();
    std::vector<CellIndex> free_cells;
    for (int j = 0; j < odds.height(); ++j)
        for (int i = 0; i < odds.width(); ++i)
            if (odds.known_free(i, j)) free_cells.push_back({i, j});
    if (free_cells.empty()) return std::nullopt;

    std::uniform_int_distribution<std::size_t> pick(0, free_cells.size() - 1);
    std::uniform_real_distribution<double> jitter(0.05, 0.95);
    std::uniform_real_distribution<double> heading(-kPi, kPi);
    const double res = odds.resolution();
    ViewPoint best{};
    double best_score = -1.0;
    for (int s = 0; s < params.sample_count; ++s) {
        CellIndex c = free_cells[pick(rng)];
        // Uniform position inside the cell, clear of its edges.
        ViewPoint candidate{(c.i + jitter(rng)) * res, (c.j + jitter(rng)) * res, heading(rng)};
        double score = score_goal_candidate(candidate, bd, odds, start, params, spec);
        if (score > best_score) {
            best_score = score;
            best = candidate;
        }
    }
    return best;
}

struct RrtParams {
    int max_iterations = 5000;
    double steer_step = 0.0;        // meters; 0 = half the sensor range
    double goal_bias = 0.1;
    int shortcut_attempts = 200;
    double waypoint_spacing = 0.0;  // meters; 0 = two cells
    double inflation_radius = 0.0;  // meters of obstacle inflation for planning

    void validate() const {
        if (max_iterations < 1) throw std::invalid_argument("rrt: max_iterations must be >= 1");
        if (!(goal_bias >= 0.0 && goal_bias <= 1.0))
            throw std::invalid_argument("rrt: goal_bias must be in [0, 1]");
        if (steer_step < 0.0 || waypoint_spacing < 0.0 || inflation_radius < 0.0)
            throw std::invalid_argument("rrt: negative length parameter");
    }
};

namespace detail {

inline Vec2 point_along(const std::vector<Vec2>& pts, const std::vector<double>& prefix,
                        double arc, int& segment) {
    segment = 0;
    int k = static_cast<int>(pts.size()) - 1;
    while (segment + 1 < k && arc >= prefix[segment + 1]) ++segment;
    double len = prefix[segment + 1] - prefix[segment];
    double t = len > 0.0 ? (arc - prefix[segment]) / len : 0.0;
    return pts[segment] + (pts[segment + 1] - pts[segment]) * t;
}

/// Replace randomly chosen sub-paths by straight segments when collision
/// free. Never lengthens the path and never introduces a collision.
inline void shortcut_smooth(std::vector<Vec2>& pts, const TraversabilityMap& trav, int attempts,
                            std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int a = 0; a < attempts; ++a) {
        if (pts.size() < 3) return;
        std::vector<double> prefix(pts.size(), 0.0);
        for (std::size_t i = 1; i < pts.size(); ++i)
            prefix[i] = prefix[i - 1] + distance(pts[i], pts[i - 1]);
        double total = prefix.back();
        if (total <= 0.0) return;
        double u1 = uni(rng) * total;
        double u2 = uni(rng) * total;
        if (u1 > u2) std::swap(u1, u2);
        if (u2 - u1 < 1e-9) continue;
        int s1 = 0, s2 = 0;
        Vec2 p1 = point_along(pts, prefix, u1, s1);
        Vec2 p2 = point_along(pts, prefix, u2, s2);
        if (!trav.segment_free(p1, p2)) continue;
        std::vector<Vec2> next(pts.begin(), pts.begin() + s1 + 1);
        next.push_back(p1);
        next.push_back(p2);
        next.insert(next.end(), pts.begin() + s2 + 1, pts.end());
        pts = std::move(next);
    }
}

inline void drop_duplicate_points(std::vector<Vec2>& pts, double tol) {
    std::vector<Vec2> out;
    for (const Vec2& p : pts)
        if (out.empty() || distance(out.back(), p) > tol) out.push_back(p);
    if (out.size() < 2 && !pts.empty()) out.assign(1, pts.front());
    pts = std::move(out);
}

/// Subdivide long segments so the optimizer has interior vertices to move.
inline void densify(std::vector<Vec2>& pts, double spacing) {
    if (pts.size() < 2 || spacing <= 0.0) return;
    std::vector<Vec2> out;
    out.push_back(pts[0]);
    for (std::size_t s = 1; s < pts.size(); ++s) {
        double len = distance(pts[s - 1], pts[s]);
        int pieces = std::max(1, static_cast<int>(std::ceil(len / spacing)));
        for (int p = 1; p <= pieces; ++p) {
            double t = static_cast<double>(p) / pieces;
            out.push_back(pts[s - 1] + (pts[s] - pts[s - 1]) * t);
        }
    }
    pts = std::move(out);
}

}  // namespace detail

/// Plan a collision-free piecewise-linear path through known-free space
/// with an RRT, then shortcut-smooth and subdivide it. Interior headings
/// follow the outgoing segment direction; start and goal headings are
/// preserved. Returns nothing when no tree connection is found within the
/// iteration budget.
inline std::optional<Path> plan_rrt(const ViewPoint& start, const ViewPoint& goal,
                                    const LogOddsMap& odds, const RrtParams& params,
                                    std::mt19937_64& rng) {
    params.validate();
    TraversabilityMap trav(odds, params.inflation_radius);
    trav.mark_point_free(start.x, start.y);  // the robot stands there
    if (!trav.point_free(start.x, start.y) || !trav.point_free(goal.x, goal.y)) return std::nullopt;

    const double steer = params.steer_step > 0.0 ? params.steer_step : 5.0 * odds.resolution();
    const Vec2 start_p = start.position();
    const Vec2 goal_p = goal.position();

    std::vector<Vec2> pts;
    if (distance(start_p, goal_p) < 1e-12) {
        // Same position: a pure rotation (or the trivial identical query).
        if (wrap_angle(goal.theta - start.theta) == 0.0) return Path{start};
        return Path{start, goal};
    } else if (trav.segment_free(start_p, goal_p)) {
        pts = {start_p, goal_p};
    } else {
        // Tree growth biased toward known-free space: samples are drawn
        // from free cells with in-cell jitter, plus occasional goal pulls.
        std::vector<CellIndex> free_cells;
        for (int j = 0; j < odds.height(); ++j)
            for (int i = 0; i < odds.width(); ++i)
                if (trav.cell_free(i, j)) free_cells.push_back({i, j});
        if (free_cells.empty()) return std::nullopt;

        struct Node {
            Vec2 p;
            int parent;
        };
        std::vector<Node> tree{{start_p, -1}};
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        std::uniform_int_distribution<std::size_t> pick(0, free_cells.size() - 1);
        const double res = odds.resolution();
        int goal_node = -1;
        for (int it = 0; it < params.max_iterations && goal_node < 0; ++it) {
            Vec2 target;
            if (uni(rng) < params.goal_bias) {
                target = goal_p;
            } else {
                CellIndex c = free_cells[pick(rng)];
                target = {(c.i + uni(rng)) * res, (c.j + uni(rng)) * res};
            }
            int nearest = 0;
            double best_d = distance(tree[0].p, target);
            for (std::size_t k = 1; k < tree.size(); ++k) {
                double d = distance(tree[k].p, target);
                if (d < best_d) {
                    best_d = d;
                    nearest = static_cast<int>(k);
                }
            }
            if (best_d < 1e-12) continue;
            Vec2 from = tree[nearest].p;
            Vec2 to = best_d <= steer ? target : from + (target - from) * (steer / best_d);
            if (!trav.point_free(to.x, to.y) || !trav.segment_free(from, to)) continue;
            tree.push_back({to, nearest});
            int added = static_cast<int>(tree.size()) - 1;
            if (distance(to, goal_p) <= steer && trav.segment_free(to, goal_p)) {
                tree.push_back({goal_p, added});
                goal_node = added + 1;
            }
        }
        if (goal_node < 0) return std::nullopt;
        for (int k = goal_node; k >= 0; k = tree[k].parent) {
            pts.push_back(tree[k].p);
            if (tree[k].parent < 0) break;
        }
        std::reverse(pts.begin(), pts.end());
    }

    detail::shortcut_smooth(pts, trav, params.shortcut_attempts, rng);
    detail::drop_duplicate_points(pts, 1e-9);
    double spacing = params.waypoint_spacing > 0.0 ? params.waypoint_spacing
                                                   : 2.0 * odds.resolution();
    detail::densify(pts, spacing);

    Path path(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        double theta;
        if (i == 0)
            theta = start.theta;
        else if (i + 1 == pts.size())
            theta = goal.theta;
        else {
            Vec2 d = pts[i + 1] - pts[i];
            theta = std::atan2(d.y, d.x);
        }
        path[i] = {pts[i].x, pts[i].y, wrap_angle(theta)};
    }
    // Interpolated vertices can land on exact cell boundaries and quantize
    // into a cell the segment itself never crosses; reject such paths so
    // the caller retries rather than ship a path its consumers veto.
    if (!trav.path_free(path)) return std::nullopt;
    return path;
}

}  // namespace gradex
