#pragma once

#include <array>
#include <span>
#include <stdexcept>
#include <vector>

#include "gradex/autodiff.hpp"
#include "gradex/filter.hpp"

namespace gradex {

struct NumericalError : std::runtime_error {
    int vertex_index;
    NumericalError(const std::string& msg, int vertex)
        : std::runtime_error(msg), vertex_index(vertex) {}
};

struct ObjectiveParams {
    double alpha = 0.1;                           // smoothness weight
    std::array<double, 3> w_diag{1.0, 1.0, 0.1};  // per-coordinate step metric

    void validate() const {
        for (double w : w_diag)
            if (!(w > 0.0)) throw std::invalid_argument("objective: W diagonal must be positive");
        if (!(alpha >= 0.0)) throw std::invalid_argument("objective: alpha must be >= 0");
    }
};

/// Path quality objective over the interior view-points of a path with
/// pinned endpoints: a weighted squared-step smoothness penalty minus the
/// path information gain. Holds a boundariness snapshot and a frozen
/// sampling plan, so it is a fixed deterministic function of the interior
/// vertex coordinates; gradients come from a reverse sweep of the recorded
/// computation.
class Objective {
public:
    Objective(ViewPoint start, ViewPoint goal, int interior_count, PathSamplingPlan plan,
              Grid<double> bd_snapshot, SensorSpec spec, ObjectiveParams params)
        : start_(start), goal_(goal), interior_count_(interior_count), plan_(std::move(plan)),
          bd_(std::move(bd_snapshot)), spec_(spec), params_(params),
          half_(filter_half_width(spec.r_max, bd_.resolution())) {
        params_.validate();
        if (interior_count_ < 0) throw std::invalid_argument("objective: negative interior count");
        excluded_ = {view_box(start_.x, start_.y, bd_.resolution(), half_, bd_.width(), bd_.height()),
                     view_box(goal_.x, goal_.y, bd_.resolution(), half_, bd_.width(), bd_.height())};
    }

    static Objective for_path(const Path& path, const PathSamplingPlan& plan,
                              Grid<double> bd_snapshot, const SensorSpec& spec,
                              const ObjectiveParams& params) {
        if (path.size() < 2) throw std::invalid_argument("objective: path needs >= 2 view-points");
        return Objective(path.front(), path.back(), static_cast<int>(path.size()) - 2, plan,
                         std::move(bd_snapshot), spec, params);
    }

    int interior_count() const { return interior_count_; }
    const ViewPoint& start() const { return start_; }
    const ViewPoint& goal() const { return goal_; }
    const PathSamplingPlan& plan() const { return plan_; }
    const Grid<double>& boundariness() const { return bd_; }
    const SensorSpec& sensor() const { return spec_; }
    const ObjectiveParams& params() const { return params_; }

    static std::vector<double> pack_interior(const Path& path) {
        std::vector<double> coords;
        if (path.size() < 3) return coords;
        coords.reserve((path.size() - 2) * 3);
        for (std::size_t i = 1; i + 1 < path.size(); ++i) {
            coords.push_back(path[i].x);
            coords.push_back(path[i].y);
            coords.push_back(path[i].theta);
        }
        return coords;
    }

    Path to_path(std::span<const double> coords) const {
        Path p;
        p.reserve(interior_count_ + 2);
        p.push_back(start_);
        for (int v = 0; v < interior_count_; ++v)
            p.push_back({coords[3 * v], coords[3 * v + 1], coords[3 * v + 2]});
        p.push_back(goal_);
        return p;
    }

    struct Parts {
        double smoothness = 0.0;  // un-weighted squared-step sum
        double info_gain = 0.0;
        double total = 0.0;       // alpha * smoothness - info_gain
    };

    Parts value_parts(std::span<const double> coords) const {
        check_size(coords.size());
        auto r = evaluate_core<double>(coords, [](double v) { return v; });
        return {r[0], r[1], r[2]};
    }

    double value(std::span<const double> coords) const { return value_parts(coords).total; }

    /// d(total)/d(x, y, theta) for every interior vertex.
    std::vector<double> gradient(std::span<const double> coords) const {
        check_size(coords.size());
        ad::Tape tape;
        tape.reserve(4096 + 512 * (interior_count_ + plan_.samples.size() + 1));
        std::vector<ad::Var> leaves;
        leaves.reserve(coords.size());
        for (double c : coords) leaves.push_back(tape.leaf(c));
        auto r = evaluate_core<ad::Var>(std::span<const ad::Var>(leaves.data(), leaves.size()),
                                        [&](double v) { return tape.constant(v); });
        if (!std::isfinite(r[2].value()))
            throw NumericalError("objective value is not finite", -1);
        std::vector<double> adj = tape.adjoints(r[2].index());
        std::vector<double> grad(coords.size());
        for (std::size_t i = 0; i < grad.size(); ++i) {
            grad[i] = adj[static_cast<std::size_t>(leaves[i].index())];
            if (!std::isfinite(grad[i]))
                throw NumericalError("gradient is not finite", static_cast<int>(i / 3));
        }
        return grad;
    }

private:
    ViewPoint start_, goal_;
    int interior_count_;
    PathSamplingPlan plan_;
    Grid<double> bd_;
    SensorSpec spec_;
    ObjectiveParams params_;
    int half_;
    std::vector<CellBox> excluded_;

    void check_size(std::size_t n) const {
        if (n != static_cast<std::size_t>(interior_count_) * 3)
            throw std::invalid_argument("objective: coordinate count mismatch");
    }

    template <class S>
    void add_view(const S& x, const S& y, const S& th, std::vector<PoseTerm<S>>& out) const {
        using std::cos;
        using std::sin;
        PoseTerm<S> pt{x, y, cos(th), sin(th), {}, {}};
        double px = value_of(x), py = value_of(y);
        pt.own = {static_cast<int>(std::floor(px / bd_.resolution())),
                  static_cast<int>(std::floor(py / bd_.resolution()))};
        pt.box = view_box(px, py, bd_.resolution(), half_, bd_.width(), bd_.height());
        out.push_back(std::move(pt));
    }

    template <class S, class MakeConst>
    std::array<S, 3> evaluate_core(std::span<const S> coords, MakeConst&& mk) const {
        std::vector<std::array<S, 3>> chain;
        chain.reserve(interior_count_ + 2);
        chain.push_back({mk(start_.x), mk(start_.y), mk(start_.theta)});
        for (int v = 0; v < interior_count_; ++v)
            chain.push_back({coords[3 * v], coords[3 * v + 1], coords[3 * v + 2]});
        chain.push_back({mk(goal_.x), mk(goal_.y), mk(goal_.theta)});

        S smooth = mk(0.0);
        for (std::size_t i = 1; i < chain.size(); ++i) {
            S dx = chain[i][0] - chain[i - 1][0];
            S dy = chain[i][1] - chain[i - 1][1];
            S dth = wrap_angle(chain[i][2] - chain[i - 1][2]);
            smooth = smooth + (dx * dx) * params_.w_diag[0] + (dy * dy) * params_.w_diag[1] +
                     (dth * dth) * params_.w_diag[2];
        }

        std::vector<PoseTerm<S>> views;
        views.reserve(static_cast<std::size_t>(interior_count_) + plan_.samples.size());
        for (std::size_t i = 1; i + 1 < chain.size(); ++i)
            add_view(chain[i][0], chain[i][1], chain[i][2], views);
        for (const auto& s : plan_.samples) {
            const auto& a = chain[s.segment];
            const auto& b = chain[s.segment + 1];
            S x = a[0] * (1.0 - s.t) + b[0] * s.t;
            S y = a[1] * (1.0 - s.t) + b[1] * s.t;
            S th = a[2] + wrap_angle(b[2] - a[2]) * s.t;
            add_view(x, y, th, views);
        }

        S zero = mk(0.0);
        S one = mk(1.0);
        S ig = accumulate_path_gain(views, excluded_, bd_, spec_, false, zero, one,
                                    NullCellSink{});
        S total = smooth * params_.alpha - ig;
        return {smooth, ig, total};
    }
};

}  // namespace gradex
