#pragma once

#include <deque>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include <json.hpp>

#include "gradex/boundariness.hpp"
#include "gradex/optimizer.hpp"
#include "gradex/planner.hpp"
#include "gradex/rng.hpp"
#include "gradex/sensor.hpp"
#include "gradex/world.hpp"

namespace gradex {

struct TerminationCriteria {
    double bd_threshold = 0.5;   // a cell counts as boundary above this score
    int min_boundary_cells = 5;  // keep exploring while more than this many remain
    int gain_window = 3;         // recent path gains tracked for the zero-gain exit
    int max_episodes = 200;      // safety cap

    void validate() const {
        if (min_boundary_cells < 0)
            throw std::invalid_argument("termination: min_boundary_cells must be >= 0");
        if (gain_window < 1) throw std::invalid_argument("termination: gain_window must be >= 1");
        if (max_episodes < 1) throw std::invalid_argument("termination: max_episodes must be >= 1");
    }
};

struct ExplorationConfig {
    SensorSpec sensor;
    BbfParams bbf;
    BoundarinessParams boundariness;
    ObjectiveParams objective;
    OptimizerConfig optimizer;
    GoalScoreParams goal;
    RrtParams rrt;
    TerminationCriteria termination;
    bool optimize = true;
    int retry_budget = 5;
    double sim_noise_std = 0.0;
    std::uint64_t seed = 1;
};

struct CoverageMetrics {
    double free_correct = 0.0;   // ground-truth free cells mapped free
    double free_wrong = 0.0;     // ground-truth free cells mapped occupied
    double free_unknown = 1.0;
    double occ_correct = 0.0;    // ground-truth occupied cells mapped occupied
    double occ_wrong = 0.0;
    double occ_unknown = 1.0;
    double unknown_fraction = 1.0;  // over all cells
    double cumulative_path_length = 0.0;
};

/// Classification fractions of the current belief against the ground truth.
inline CoverageMetrics coverage_metrics(const LogOddsMap& odds, const WorldMap& world,
                                        double cumulative_path_length = 0.0) {
    CoverageMetrics m;
    m.cumulative_path_length = cumulative_path_length;
    long free_total = 0, occ_total = 0;
    long free_ok = 0, free_bad = 0, free_unk = 0;
    long occ_ok = 0, occ_bad = 0, occ_unk = 0;
    long unknown = 0;
    for (int j = 0; j < world.height(); ++j)
        for (int i = 0; i < world.width(); ++i) {
            double v = odds.value(i, j);
            if (v == 0.0) ++unknown;
            if (world.free(i, j)) {
                ++free_total;
                if (v < 0.0) ++free_ok;
                else if (v > 0.0) ++free_bad;
                else ++free_unk;
            } else {
                ++occ_total;
                if (v > 0.0) ++occ_ok;
                else if (v < 0.0) ++occ_bad;
                else ++occ_unk;
            }
        }
    if (free_total > 0) {
        m.free_correct = static_cast<double>(free_ok) / free_total;
        m.free_wrong = static_cast<double>(free_bad) / free_total;
        m.free_unknown = static_cast<double>(free_unk) / free_total;
    }
    if (occ_total > 0) {
        m.occ_correct = static_cast<double>(occ_ok) / occ_total;
        m.occ_wrong = static_cast<double>(occ_bad) / occ_total;
        m.occ_unknown = static_cast<double>(occ_unk) / occ_total;
    }
    m.unknown_fraction = static_cast<double>(unknown) / (world.width() * world.height());
    return m;
}

struct EpisodeRecord {
    int episode = 0;
    ViewPoint goal;
    double path_length = 0.0;  // executed this episode
    double f_pre = 0.0;        // objective of the planned path
    double f_post = 0.0;       // objective after optimization
    double info_gain = 0.0;    // recomputed on the final path, planning-time map
    double window_gain = 0.0;  // visible boundariness fed to the stagnation window
    CoverageMetrics coverage;  // after executing the episode
    // Audit data, kept in memory but not serialized:
    bool descent_monotone = true;
    bool endpoints_pinned = true;
    std::string opt_stop_reason;
    std::vector<IterationTrace> opt_trace;
    Path executed;  // every view-point scanned from, in order
};

struct ExplorationReport {
    std::string status;  // "terminated" | "planner-exhausted" | "max-episodes"
    std::uint64_t seed = 0;
    bool optimization_enabled = true;
    int episodes_run = 0;
    double cumulative_path_length = 0.0;
    CoverageMetrics final_coverage;
    std::vector<EpisodeRecord> episodes;
};

struct ExplorationResult {
    ExplorationReport report;
    LogOddsMap odds;
    Grid<double> bd;
};

struct EpisodeSnapshot {
    int episode;
    const EpisodeRecord& record;
    const LogOddsMap& odds;
    const Grid<double>& bd;
    const Path& planned;
    const Path& optimized;
};

using EpisodeCallback = std::function<void(const EpisodeSnapshot&)>;

/// Loop-top continuation test: keep exploring while enough boundary cells
/// remain above the threshold and the recent paths still saw any boundary.
inline bool exploration_should_continue(const Grid<double>& bd,
                                        const std::deque<double>& gain_window,
                                        const TerminationCriteria& criteria) {
    int boundary_cells = count_above(bd, criteria.bd_threshold);
    double window_sum = std::accumulate(gain_window.begin(), gain_window.end(), 0.0);
    return boundary_cells > criteria.min_boundary_cells && window_sum != 0.0;
}

/// Closed exploration loop: scan, fuse, pick a goal, plan, optimize,
/// execute with scans at every view-point, until the boundary-cell count
/// drops to the threshold or the recent path gains sum to zero.
inline ExplorationResult run_exploration(const WorldMap& world, const ViewPoint& start,
                                         const ExplorationConfig& cfg,
                                         const EpisodeCallback& on_episode = {}) {
    cfg.sensor.validate();
    cfg.bbf.validate();
    cfg.boundariness.validate();
    cfg.termination.validate();
    if (!world.point_free(start.x, start.y))
        throw InvalidPoseError("exploration start pose is not free in the world");

    std::mt19937_64 goal_rng = make_stream(cfg.seed, "goal");
    std::mt19937_64 rrt_rng = make_stream(cfg.seed, "rrt");
    std::mt19937_64 sample_rng = make_stream(cfg.seed, "path-sample");
    std::mt19937_64 noise_rng = make_stream(cfg.seed, "sim-noise");

    RrtParams rrt = cfg.rrt;
    if (rrt.steer_step <= 0.0) rrt.steer_step = 0.5 * cfg.sensor.r_max;

    InverseSensorModel model(cfg.sensor);
    LogOddsMap odds(world.width(), world.height(), world.resolution(), cfg.bbf);
    Grid<double> bd(world.width(), world.height(), world.resolution());

    auto scan_at = [&](const ViewPoint& pose) {
        Scan scan = cfg.sim_noise_std > 0.0
                        ? cast_scan(world, pose, cfg.sensor, noise_rng, cfg.sim_noise_std)
                        : cast_scan(world, pose, cfg.sensor);
        CellBox touched = odds.integrate_scan(scan, model);
        refresh_boundariness(bd, odds, cfg.boundariness, touched);
    };

    ViewPoint pose = start;
    scan_at(pose);

    ExplorationReport report;
    report.seed = cfg.seed;
    report.optimization_enabled = cfg.optimize;

    std::deque<double> gain_window(static_cast<std::size_t>(cfg.termination.gain_window), 1.0);
    double cumulative_length = 0.0;
    report.status = "max-episodes";

    for (int episode = 0; episode < cfg.termination.max_episodes; ++episode) {
        if (!exploration_should_continue(bd, gain_window, cfg.termination)) {
            report.status = "terminated";
            break;
        }

        // Goal selection and seeding; planning failures get fresh samples.
        std::optional<ViewPoint> goal;
        std::optional<Path> planned;
        for (int attempt = 0; attempt < cfg.retry_budget && !planned; ++attempt) {
            goal = select_goal(bd, odds, pose, cfg.goal, cfg.sensor, goal_rng);
            if (!goal) break;
            planned = plan_rrt(pose, *goal, odds, rrt, rrt_rng);
        }
        if (!planned) {
            report.status = "planner-exhausted";
            break;
        }

        EpisodeRecord rec;
        rec.episode = episode;
        rec.goal = *goal;

        PathSamplingPlan plan = make_sampling_plan(*planned, odds.resolution(), sample_rng);
        Path final_path = *planned;
        if (planned->size() >= 2) {
            Objective objective = Objective::for_path(*planned, plan, bd, cfg.sensor,
                                                      cfg.objective);
            std::vector<double> coords = Objective::pack_interior(*planned);
            rec.f_pre = objective.value(coords);
            rec.f_post = rec.f_pre;
            if (cfg.optimize) {
                TraversabilityMap trav(odds, rrt.inflation_radius);
                trav.mark_point_free(pose.x, pose.y);
                OptimizeResult opt = optimize_path(*planned, objective, cfg.optimizer, trav);
                final_path = opt.path;
                rec.f_post = opt.f_final;
                rec.opt_stop_reason = opt.stop_reason;
                rec.opt_trace = opt.trace;
                for (std::size_t t = 1; t < opt.trace.size(); ++t)
                    if (opt.trace[t].total > opt.trace[t - 1].total) rec.descent_monotone = false;
                rec.endpoints_pinned = final_path.front().x == planned->front().x &&
                                       final_path.front().y == planned->front().y &&
                                       final_path.front().theta == planned->front().theta &&
                                       final_path.back().x == planned->back().x &&
                                       final_path.back().y == planned->back().y &&
                                       final_path.back().theta == planned->back().theta;
            }
        }

        PathGainResult gain = path_information_gain(final_path, bd, cfg.sensor, plan);
        rec.info_gain = gain.gain;
        rec.window_gain = path_visible_boundariness(final_path, bd, cfg.sensor, plan);
        gain_window.pop_front();
        gain_window.push_back(rec.window_gain);

        // Traverse: scan at the start, every interior/interpolated
        // view-point, and the goal.
        rec.executed.push_back(final_path.front());
        for (const ViewPoint& vp : gain.sampled_points) rec.executed.push_back(vp);
        if (final_path.size() >= 2) rec.executed.push_back(final_path.back());
        double episode_length = 0.0;
        for (std::size_t i = 0; i < rec.executed.size(); ++i) {
            if (i > 0)
                episode_length += distance(rec.executed[i].position(),
                                           rec.executed[i - 1].position());
            scan_at(rec.executed[i]);
        }
        pose = final_path.back();
        cumulative_length += episode_length;
        rec.path_length = episode_length;
        rec.coverage = coverage_metrics(odds, world, cumulative_length);
        report.episodes.push_back(std::move(rec));
        report.episodes_run = episode + 1;

        if (on_episode)
            on_episode(EpisodeSnapshot{episode, report.episodes.back(), odds, bd, *planned,
                                       final_path});
    }

    report.cumulative_path_length = cumulative_length;
    report.final_coverage = coverage_metrics(odds, world, cumulative_length);
    return ExplorationResult{std::move(report), std::move(odds), std::move(bd)};
}

inline nlohmann::json coverage_to_json(const CoverageMetrics& m) {
    return nlohmann::json{{"free_correct", m.free_correct},
                          {"free_wrong", m.free_wrong},
                          {"free_unknown", m.free_unknown},
                          {"occ_correct", m.occ_correct},
                          {"occ_wrong", m.occ_wrong},
                          {"occ_unknown", m.occ_unknown},
                          {"unknown_fraction", m.unknown_fraction},
                          {"cumulative_path_length", m.cumulative_path_length}};
}

inline nlohmann::json report_to_json(const ExplorationReport& report) {
    nlohmann::json episodes = nlohmann::json::array();
    for (const EpisodeRecord& r : report.episodes) {
        episodes.push_back({{"episode", r.episode},
                            {"goal", {r.goal.x, r.goal.y, r.goal.theta}},
                            {"path_length", r.path_length},
                            {"f_pre", r.f_pre},
                            {"f_post", r.f_post},
                            {"info_gain", r.info_gain},
                            {"window_gain", r.window_gain},
                            {"coverage", coverage_to_json(r.coverage)}});
    }
    return nlohmann::json{{"status", report.status},
                          {"seed", report.seed},
                          {"optimization_enabled", report.optimization_enabled},
                          {"episodes_run", report.episodes_run},
                          {"cumulative_path_length", report.cumulative_path_length},
                          {"final_coverage", coverage_to_json(report.final_coverage)},
                          {"episodes", episodes}};
}

inline std::string report_json_string(const ExplorationReport& report) {
    return report_to_json(report).dump(2) + "\n";
}

}  // namespace gradex
