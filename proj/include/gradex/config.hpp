#pragma once

#include <cstdint>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "gradex/explorer.hpp"
#include "gradex/io.hpp"

namespace gradex {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Flat key=value scenario description: every tunable in one place, so a
/// printed config re-runs a scenario exactly. Angles are given in degrees.
struct ScenarioConfig {
    std::string map = "scenarios/room32.txt";
    std::string out_dir = "out";
    std::uint64_t seed = 1;
    double start_x = 1.5;
    double start_y = 1.5;
    double start_theta_deg = 0.0;

    double sensor_r_max = 3.0;
    double sensor_fov_deg = 90.0;
    double sensor_angular_res_deg = 1.0;
    double sensor_beam_aperture_scale = 1.0;  // beam aperture = scale * angular resolution
    double sensor_eps = 0.45;
    double sim_noise_std = 0.0;

    double bbf_p_occ = 0.9;   // upper clamp as probability
    double bbf_p_free = 0.3;  // lower clamp as probability

    double bd_weight = 0.5;
    double bd_sigma = 0.3;

    double alpha = 0.1;
    double w_x = 1.0;
    double w_y = 1.0;
    double w_theta = 0.1;
    double opt_step = 0.05;
    int opt_max_iters = 100;
    double opt_tolerance = 1e-4;
    double opt_shrink = 0.5;

    double goal_lambda1 = 0.1;
    double goal_lambda2 = 0.05;
    double goal_box_half_width = 1.0;
    int goal_samples = 200;

    int rrt_max_iters = 5000;
    double rrt_steer = 0.0;  // 0 = half the sensor range
    double rrt_goal_bias = 0.1;
    int rrt_shortcuts = 200;
    double rrt_waypoint_spacing = 0.0;  // 0 = two cells
    double inflation_radius = 0.0;

    double term_bd_threshold = 0.5;
    int term_min_boundary_cells = 5;
    int term_gain_window = 3;
    int max_episodes = 200;
    int retry_budget = 5;

    bool optimize = true;
    bool save_maps = false;

    ViewPoint start_pose() const {
        return {start_x, start_y, start_theta_deg * kPi / 180.0};
    }

    SensorSpec sensor() const {
        SensorSpec s;
        s.r_max = sensor_r_max;
        s.fov = sensor_fov_deg * kPi / 180.0;
        s.angular_resolution = sensor_angular_res_deg * kPi / 180.0;
        s.beam_aperture = sensor_beam_aperture_scale * s.angular_resolution;
        s.range_noise_eps = sensor_eps;
        s.validate();
        return s;
    }

    BbfParams bbf() const {
        BbfParams b;
        b.l_max = LogOddsMap::probability_to_log_odds(bbf_p_occ);
        b.l_min = LogOddsMap::probability_to_log_odds(bbf_p_free);
        b.validate();
        return b;
    }

    BoundarinessParams boundariness() const {
        BoundarinessParams b{bd_weight, bd_sigma};
        b.validate();
        return b;
    }

    ObjectiveParams objective() const {
        ObjectiveParams o;
        o.alpha = alpha;
        o.w_diag = {w_x, w_y, w_theta};
        o.validate();
        return o;
    }

    OptimizerConfig optimizer() const {
        OptimizerConfig o;
        o.step_size = opt_step;
        o.max_iterations = opt_max_iters;
        o.tolerance = opt_tolerance;
        o.shrink = opt_shrink;
        o.validate();
        return o;
    }

    GoalScoreParams goal() const {
        GoalScoreParams g;
        g.lambda1 = goal_lambda1;
        g.lambda2 = goal_lambda2;
        g.obstacle_box_half_width = goal_box_half_width;
        g.sample_count = goal_samples;
        g.validate();
        return g;
    }

    RrtParams rrt() const {
        RrtParams r;
        r.max_iterations = rrt_max_iters;
        r.steer_step = rrt_steer;
        r.goal_bias = rrt_goal_bias;
        r.shortcut_attempts = rrt_shortcuts;
        r.waypoint_spacing = rrt_waypoint_spacing;
        r.inflation_radius = inflation_radius;
        r.validate();
        return r;
    }

    TerminationCriteria termination() const {
        TerminationCriteria t;
        t.bd_threshold = term_bd_threshold;
        t.min_boundary_cells = term_min_boundary_cells;
        t.gain_window = term_gain_window;
        t.max_episodes = max_episodes;
        t.validate();
        return t;
    }

    ExplorationConfig exploration() const {
        ExplorationConfig e;
        e.sensor = sensor();
        e.bbf = bbf();
        e.boundariness = boundariness();
        e.objective = objective();
        e.optimizer = optimizer();
        e.goal = goal();
        e.rrt = rrt();
        e.termination = termination();
        e.optimize = optimize;
        e.retry_budget = retry_budget;
        e.sim_noise_std = sim_noise_std;
        e.seed = seed;
        return e;
    }

    // --- key registry -----------------------------------------------------

    using FieldRef = std::variant<double*, int*, bool*, std::uint64_t*, std::string*>;

    struct Entry {
        const char* key;
        FieldRef ref;
    };

    std::vector<Entry> registry() {
        return {
            {"map", &map},
            {"out_dir", &out_dir},
            {"seed", &seed},
            {"start_x", &start_x},
            {"start_y", &start_y},
            {"start_theta_deg", &start_theta_deg},
            {"sensor_r_max", &sensor_r_max},
            {"sensor_fov_deg", &sensor_fov_deg},
            {"sensor_angular_res_deg", &sensor_angular_res_deg},
            {"sensor_beam_aperture_scale", &sensor_beam_aperture_scale},
            {"sensor_eps", &sensor_eps},
            {"sim_noise_std", &sim_noise_std},
            {"bbf_p_occ", &bbf_p_occ},
            {"bbf_p_free", &bbf_p_free},
            {"bd_weight", &bd_weight},
            {"bd_sigma", &bd_sigma},
            {"alpha", &alpha},
            {"w_x", &w_x},
            {"w_y", &w_y},
            {"w_theta", &w_theta},
            {"opt_step", &opt_step},
            {"opt_max_iters", &opt_max_iters},
            {"opt_tolerance", &opt_tolerance},
            {"opt_shrink", &opt_shrink},
            {"goal_lambda1", &goal_lambda1},
            {"goal_lambda2", &goal_lambda2},
            {"goal_box_half_width", &goal_box_half_width},
            {"goal_samples", &goal_samples},
            {"rrt_max_iters", &rrt_max_iters},
            {"rrt_steer", &rrt_steer},
            {"rrt_goal_bias", &rrt_goal_bias},
            {"rrt_shortcuts", &rrt_shortcuts},
            {"rrt_waypoint_spacing", &rrt_waypoint_spacing},
            {"inflation_radius", &inflation_radius},
            {"term_bd_threshold", &term_bd_threshold},
            {"term_min_boundary_cells", &term_min_boundary_cells},
            {"term_gain_window", &term_gain_window},
            {"max_episodes", &max_episodes},
            {"retry_budget", &retry_budget},
            {"optimize", &optimize},
            {"save_maps", &save_maps},
        };
    }

    void set_value(const std::string& key, const std::string& value, const std::string& where) {
        for (Entry& e : registry()) {
            if (key != e.key) continue;
            try {
                std::visit(
                    [&](auto* field) {
                        using T = std::remove_pointer_t<decltype(field)>;
                        if constexpr (std::is_same_v<T, std::string>) {
                            *field = value;
                        } else if constexpr (std::is_same_v<T, bool>) {
                            if (value == "1" || value == "true") *field = true;
                            else if (value == "0" || value == "false") *field = false;
                            else throw std::invalid_argument("expected 0/1/true/false");
                        } else if constexpr (std::is_same_v<T, int>) {
                            std::size_t pos = 0;
                            *field = std::stoi(value, &pos);
                            if (pos != value.size()) throw std::invalid_argument("trailing junk");
                        } else if constexpr (std::is_same_v<T, std::uint64_t>) {
                            std::size_t pos = 0;
                            *field = std::stoull(value, &pos);
                            if (pos != value.size()) throw std::invalid_argument("trailing junk");
                        } else {
                            std::size_t pos = 0;
                            *field = std::stod(value, &pos);
                            if (pos != value.size()) throw std::invalid_argument("trailing junk");
                        }
                    },
                    e.ref);
            } catch (const std::exception& ex) {
                throw ConfigError(where + ": bad value for '" + key + "': " + ex.what());
            }
            return;
        }
        throw ConfigError(where + ": unknown key '" + key + "'");
    }

    static std::string trim(const std::string& s) {
        std::size_t a = s.find_first_not_of(" \t\r");
        if (a == std::string::npos) return "";
        std::size_t b = s.find_last_not_of(" \t\r");
        return s.substr(a, b - a + 1);
    }

    /// Parse `key = value` lines; '#' lines are comments. Diagnostics carry
    /// file and line number.
    void load_file(const std::string& path) {
        std::istringstream in(read_text_file(path));
        std::string line;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            std::string t = trim(line);
            if (t.empty() || t[0] == '#') continue;
            std::string where = path + ":" + std::to_string(line_no);
            std::size_t eq = t.find('=');
            if (eq == std::string::npos)
                throw ConfigError(where + ": expected 'key = value'");
            std::string key = trim(t.substr(0, eq));
            std::string value = trim(t.substr(eq + 1));
            if (key.empty()) throw ConfigError(where + ": empty key");
            set_value(key, value, where);
        }
    }

    /// Apply a single "key=value" override (from the command line).
    void apply_override(const std::string& assignment) {
        std::size_t eq = assignment.find('=');
        if (eq == std::string::npos)
            throw ConfigError("override '" + assignment + "': expected key=value");
        set_value(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)), "override");
    }

    /// Effective configuration in the same format load_file accepts.
    std::string print() {
        std::ostringstream out;
        for (Entry& e : registry()) {
            out << e.key << " = ";
            std::visit(
                [&](auto* field) {
                    using T = std::remove_pointer_t<decltype(field)>;
                    if constexpr (std::is_same_v<T, std::string>) out << *field;
                    else if constexpr (std::is_same_v<T, bool>) out << (*field ? 1 : 0);
                    else if constexpr (std::is_same_v<T, double>) out << fmt_double(*field);
                    else out << *field;
                },
                e.ref);
            out << "\n";
        }
        return out.str();
    }
};

}  // namespace gradex
