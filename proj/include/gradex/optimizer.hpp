#pragma once

#include <string>
#include <vector>

#include "gradex/collision.hpp"
#include "gradex/objective.hpp"

namespace gradex {

struct PathInCollisionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OptimizerConfig {
    double step_size = 0.05;      // gradient step scale
    int max_iterations = 100;
    double tolerance = 1e-4;      // stop when an accepted step improves less than this
    double shrink = 0.5;          // backtracking factor for rejected steps
    int max_backtracks = 40;
    bool collision_checks = true;

    void validate() const {
        if (!(step_size > 0.0)) throw std::invalid_argument("optimizer: step_size must be > 0");
        if (max_iterations < 1) throw std::invalid_argument("optimizer: max_iterations must be >= 1");
        if (!(shrink > 0.0 && shrink < 1.0))
            throw std::invalid_argument("optimizer: shrink must be in (0, 1)");
    }
};

struct IterationTrace {
    int iteration = 0;
    double total = 0.0;
    double smoothness = 0.0;
    double info_gain = 0.0;
    int backtracks = 0;
    bool accepted = false;
};

struct OptimizeResult {
    Path path;
    std::vector<IterationTrace> trace;  // accepted iterates, starting with the input
    double f_initial = 0.0;
    double f_final = 0.0;
    int iterations = 0;
    std::string stop_reason;  // "converged" | "max-iterations" | "no-descent"
};

/// Gradient descent over the interior view-points. Every proposed vertex
/// move is collision-checked together with its incident segments against the
/// traversable map; colliding moves are rejected and that vertex's step size
/// is halved for the rest of the episode. A whole step is accepted only if
/// the objective does not increase, with backtracking otherwise, so the
/// sequence of accepted objective values is non-increasing and the endpoints
/// are returned bit-identical.
inline OptimizeResult optimize_path(const Path& input, const Objective& obj,
                                    const OptimizerConfig& cfg, const TraversabilityMap& trav) {
    cfg.validate();
    if (input.size() < 2) throw std::invalid_argument("optimize_path: path needs >= 2 view-points");
    if (cfg.collision_checks && !trav.path_free(input))
        throw PathInCollisionError("optimize_path: input path is not collision-free");

    const int n = obj.interior_count();
    std::vector<double> coords = Objective::pack_interior(input);
    OptimizeResult res;
    Objective::Parts parts = obj.value_parts(coords);
    res.f_initial = parts.total;
    res.trace.push_back({0, parts.total, parts.smoothness, parts.info_gain, 0, true});
    if (n == 0) {
        res.path = input;
        res.f_final = res.f_initial;
        res.stop_reason = "converged";
        return res;
    }

    std::vector<double> vertex_scale(n, 1.0);
    double f_cur = parts.total;
    res.stop_reason = "max-iterations";

    auto vertex_pos = [](const std::vector<double>& c, int v) {
        return Vec2{c[3 * v], c[3 * v + 1]};
    };

    for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
        std::vector<double> grad = obj.gradient(coords);
        bool accepted = false;
        double backoff = 1.0;
        int backtracks = 0;
        std::vector<double> cand;
        Objective::Parts cand_parts;
        for (; backtracks <= cfg.max_backtracks; ++backtracks) {
            cand = coords;
            std::vector<bool> moved(n, false);
            for (int v = 0; v < n; ++v) {
                double step = cfg.step_size * vertex_scale[v] * backoff;
                cand[3 * v] -= step * grad[3 * v];
                cand[3 * v + 1] -= step * grad[3 * v + 1];
                cand[3 * v + 2] -= step * grad[3 * v + 2];
                moved[v] = cand[3 * v] != coords[3 * v] || cand[3 * v + 1] != coords[3 * v + 1];
            }
            if (cfg.collision_checks) {
                // Reject colliding vertex moves until the whole candidate
                // chain is feasible; reverting a vertex can re-expose a
                // neighbor's segment, hence the fixpoint loop.
                bool changed = true;
                while (changed) {
                    changed = false;
                    for (int v = 0; v < n; ++v) {
                        if (!moved[v]) continue;
                        Vec2 p = vertex_pos(cand, v);
                        Vec2 prev = v == 0 ? obj.start().position() : vertex_pos(cand, v - 1);
                        Vec2 next = v == n - 1 ? obj.goal().position() : vertex_pos(cand, v + 1);
                        bool ok = trav.point_free(p.x, p.y) && trav.segment_free(prev, p) &&
                                  trav.segment_free(p, next);
                        if (!ok) {
                            cand[3 * v] = coords[3 * v];
                            cand[3 * v + 1] = coords[3 * v + 1];
                            cand[3 * v + 2] = coords[3 * v + 2];
                            moved[v] = false;
                            vertex_scale[v] *= cfg.shrink;
                            changed = true;
                        }
                    }
                }
            }
            cand_parts = obj.value_parts(cand);
            if (cand_parts.total <= f_cur) {
                accepted = true;
                break;
            }
            backoff *= cfg.shrink;
        }
        if (!accepted) {
            res.stop_reason = "no-descent";
            break;
        }
        double improvement = f_cur - cand_parts.total;
        coords = std::move(cand);
        f_cur = cand_parts.total;
        res.iterations = iter;
        res.trace.push_back(
            {iter, cand_parts.total, cand_parts.smoothness, cand_parts.info_gain, backtracks, true});
        if (improvement < cfg.tolerance) {
            res.stop_reason = "converged";
            break;
        }
    }

    res.path = obj.to_path(coords);
    res.f_final = f_cur;
    return res;
}

}  // namespace gradex
