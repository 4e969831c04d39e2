#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>
#include <stdexcept>

#include "gradex/grid.hpp"
#include "gradex/io.hpp"
#include "gradex/sensor.hpp"

namespace gradex {

struct OutOfBeamError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Log-odds clamp bounds for the binary Bayes filter.
struct BbfParams {
    double l_min = std::log(0.3 / 0.7);
    double l_max = std::log(0.9 / 0.1);

    void validate() const {
        if (!(l_min < 0.0 && 0.0 < l_max))
            throw std::invalid_argument("bbf: need l_min < 0 < l_max");
    }
};

/// Moravec–Elfes style inverse sensor model: maps a cell's distance along a
/// beam and its angular offset to an occupancy probability, given the
/// measured range. Cells well before the measurement read as free, cells at
/// the measurement as occupied, and cells beyond it carry no information.
class InverseSensorModel {
public:
    explicit InverseSensorModel(SensorSpec spec) : spec_(spec) { spec_.validate(); }

    const SensorSpec& spec() const { return spec_; }

    /// Occupancy probability of a cell at distance `delta` and angular
    /// offset `theta` from the beam axis, for measured range `range`.
    double occupancy_probability(double delta, double theta, double range) const {
        if (std::abs(theta) > spec_.beam_aperture / 2.0)
            throw OutOfBeamError("cell angular offset exceeds the beam aperture");
        const double eps = spec_.range_noise_eps;
        if (delta > range + eps) return 0.5;
        double o_r;
        if (delta <= range - eps) {
            double q = delta / (range - eps);
            o_r = 1.0 - q * q;
        } else {
            double q = (delta - range) / eps;
            o_r = q * q - 1.0;
        }
        double a = 2.0 * theta / spec_.beam_aperture;
        double o_a = 1.0 - a * a;
        return (1.0 - o_r * o_a) / 2.0;
    }

private:
    SensorSpec spec_;
};

/// Probabilistic occupancy map in log-odds form, fused from scans with a
/// clamped binary Bayes filter. Value 0 = unknown, < 0 = free, > 0 = occupied.
class LogOddsMap {
public:
    LogOddsMap(int width, int height, double resolution, BbfParams params = {})
        : grid_(width, height, resolution, 0.0), params_(params) {
        params_.validate();
    }

    int width() const { return grid_.width(); }
    int height() const { return grid_.height(); }
    double resolution() const { return grid_.resolution(); }
    double l_min() const { return params_.l_min; }
    double l_max() const { return params_.l_max; }
    const Grid<double>& grid() const { return grid_; }

    double value(int i, int j) const { return grid_.at(i, j); }
    void set_value(int i, int j, double v) { grid_.at(i, j) = std::clamp(v, params_.l_min, params_.l_max); }

    bool known_free(int i, int j) const { return grid_.at(i, j) < 0.0; }
    bool known_occupied(int i, int j) const { return grid_.at(i, j) > 0.0; }
    bool unknown(int i, int j) const { return grid_.at(i, j) == 0.0; }

    static double probability_to_log_odds(double p) { return std::log(p / (1.0 - p)); }
    static double log_odds_to_probability(double v) { return 1.0 / (1.0 + std::exp(-v)); }

    /// Fuse one scan. For every beam, every traversed cell whose center lies
    /// within the beam's update band receives the model's log-odds evidence,
    /// clamped to [l_min, l_max]. Cells hit by several beams of the same
    /// scan accumulate each beam's update. Returns the bounding box of
    /// touched cells (empty if none changed).
    CellBox integrate_scan(const Scan& scan, const InverseSensorModel& model) {
        const SensorSpec& spec = model.spec();
        if (!grid_.contains_point(scan.origin.x, scan.origin.y))
            throw InvalidPoseError("scan origin outside map bounds");
        const double res = grid_.resolution();
        const double diag = res * std::sqrt(2.0);
        const Vec2 origin{scan.origin.x, scan.origin.y};
        CellBox touched;
        for (const Beam& beam : scan.beams) {
            // Max-range beams carry no obstacle evidence: only the free band.
            const double band = beam.hit ? std::min(beam.range + spec.range_noise_eps, spec.r_max)
                                         : spec.r_max - spec.range_noise_eps;
            if (band <= 0.0) continue;
            double angle = scan.origin.theta + beam.bearing;
            Vec2 dir{std::cos(angle), std::sin(angle)};
            traverse_grid(origin, dir, band + diag, grid_.width(), grid_.height(), res,
                          [&](int i, int j, double) {
                              double delta = distance(grid_.center(i, j), origin);
                              if (delta > band) return true;
                              double p = model.occupancy_probability(delta, 0.0, beam.range);
                              p = std::clamp(p, 1e-9, 1.0 - 1e-9);
                              double update = probability_to_log_odds(p);
                              if (update != 0.0) {
                                  double v = grid_.at(i, j) + update;
                                  grid_.at(i, j) = std::clamp(v, params_.l_min, params_.l_max);
                                  touched.include(i, j);
                              }
                              return true;
                          });
        }
        return touched;
    }

    Grid<double> to_probability() const {
        Grid<double> p(width(), height(), resolution());
        for (int j = 0; j < height(); ++j)
            for (int i = 0; i < width(); ++i)
                p.at(i, j) = log_odds_to_probability(grid_.at(i, j));
        return p;
    }

    /// PGM snapshot: probability scaled to [0, 255].
    void write_pgm(const std::filesystem::path& path) const {
        std::vector<int> px(grid_.size());
        for (int j = 0; j < height(); ++j)
            for (int i = 0; i < width(); ++i)
                px[static_cast<std::size_t>(j) * width() + i] =
                    static_cast<int>(std::lround(log_odds_to_probability(grid_.at(i, j)) * 255.0));
        write_pgm_file(path, px);
    }

    /// CSV snapshot of raw log-odds, loadable with load_csv.
    void write_csv(const std::filesystem::path& path) const {
        std::ostringstream out;
        out << "# log-odds " << width() << " " << height() << " " << fmt_double(resolution())
            << "\n";
        for (int j = 0; j < height(); ++j) {
            for (int i = 0; i < width(); ++i) {
                out << fmt_double(grid_.at(i, j));
                out << (i + 1 == width() ? '\n' : ',');
            }
        }
        atomic_write_text(path, out.str());
    }

    static LogOddsMap load_csv(const std::filesystem::path& path, BbfParams params = {}) {
        std::istringstream in(read_text_file(path));
        std::string header;
        std::getline(in, header);
        std::istringstream hs(header);
        std::string hash, tag;
        int w = 0, h = 0;
        double res = 0.0;
        hs >> hash >> tag >> w >> h >> res;
        if (hash != "#" || tag != "log-odds" || w <= 0 || h <= 0 || res <= 0.0)
            throw std::runtime_error(path.string() + ": not a log-odds CSV snapshot");
        LogOddsMap map(w, h, res, params);
        std::string line;
        for (int j = 0; j < h; ++j) {
            if (!std::getline(in, line))
                throw std::runtime_error(path.string() + ": truncated log-odds CSV");
            std::istringstream ls(line);
            std::string cell;
            for (int i = 0; i < w; ++i) {
                if (!std::getline(ls, cell, ','))
                    throw std::runtime_error(path.string() + ": short row in log-odds CSV");
                map.grid_.at(i, j) = std::stod(cell);
            }
        }
        return map;
    }

private:
    Grid<double> grid_;
    BbfParams params_;

    void write_pgm_file(const std::filesystem::path& path, const std::vector<int>& px) const {
        gradex::write_pgm(path, width(), height(), px);
    }
};

}  // namespace gradex
