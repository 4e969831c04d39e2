#pragma once

#include <random>
#include <stdexcept>
#include <vector>

#include "gradex/geometry.hpp"
#include "gradex/raycast.hpp"
#include "gradex/world.hpp"

namespace gradex {

struct InvalidPoseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Range-sensor parameters. `fov` is the total field of view swept by the
/// scan; `beam_aperture` is the angular width of a single beam, used by the
/// occupancy model's angular falloff.
struct SensorSpec {
    double r_max = 3.0;                     // maximum range measurement [m]
    double fov = kPi / 2.0;                  // total field of view [rad]
    double beam_aperture = kPi / 180.0;      // per-beam width [rad]
    double angular_resolution = kPi / 180.0; // spacing between beams [rad]
    double range_noise_eps = 0.45;           // sensor's mean deviation error [m]

    void validate() const {
        if (r_max <= 0.0) throw std::invalid_argument("sensor: r_max must be positive");
        if (!(beam_aperture > 0.0 && beam_aperture <= fov && fov <= 2.0 * kPi))
            throw std::invalid_argument("sensor: need 0 < beam_aperture <= fov <= 2*pi");
        if (!(range_noise_eps > 0.0 && range_noise_eps < r_max))
            throw std::invalid_argument("sensor: need 0 < range_noise_eps < r_max");
        if (angular_resolution <= 0.0)
            throw std::invalid_argument("sensor: angular_resolution must be positive");
    }

    int beam_count() const {
        return static_cast<int>(std::floor(fov / angular_resolution + 1e-12)) + 1;
    }
};

struct Beam {
    double bearing = 0.0;  // relative to the sensor heading [rad]
    double range = 0.0;    // measured range in (0, r_max] [m]
    bool hit = false;      // true iff an obstacle lies within r_max
};

struct Scan {
    ViewPoint origin;
    std::vector<Beam> beams;
};

/// Simulate one scan from `pose`. Beams are spaced `angular_resolution`
/// apart across [theta - fov/2, theta + fov/2]; each reports the distance to
/// the point where the ray enters the first occupied cell, capped at r_max.
/// Deterministic: identical inputs produce bit-identical scans.
inline Scan cast_scan(const WorldMap& world, const ViewPoint& pose, const SensorSpec& spec) {
    spec.validate();
    if (!world.contains_point(pose.x, pose.y))
        throw InvalidPoseError("scan pose outside world bounds");
    {
        CellIndex c = world.grid().cell_of(pose.x, pose.y);
        if (world.occupied(c.i, c.j))
            throw InvalidPoseError("scan pose inside an obstacle");
    }

    Scan scan;
    scan.origin = pose;
    const int n = spec.beam_count();
    scan.beams.reserve(n);
    for (int b = 0; b < n; ++b) {
        double bearing = -spec.fov / 2.0 + b * spec.angular_resolution;
        double angle = pose.theta + bearing;
        Vec2 dir{std::cos(angle), std::sin(angle)};
        double range = spec.r_max;
        bool hit = false;
        traverse_grid({pose.x, pose.y}, dir, spec.r_max, world.width(), world.height(),
                      world.resolution(), [&](int i, int j, double t_entry) {
                          if (world.occupied(i, j)) {
                              range = t_entry;
                              hit = true;
                              return false;
                          }
                          return true;
                      });
        if (!hit || range > spec.r_max) {
            range = spec.r_max;
            hit = false;
        }
        if (range <= 0.0) range = world.resolution() * 1e-3;  // origin on a cell edge
        scan.beams.push_back({bearing, range, hit});
    }
    return scan;
}

/// Variant with additive Gaussian range noise (std in meters) on hit beams.
inline Scan cast_scan(const WorldMap& world, const ViewPoint& pose, const SensorSpec& spec,
                      std::mt19937_64& rng, double noise_std) {
    Scan scan = cast_scan(world, pose, spec);
    if (noise_std <= 0.0) return scan;
    std::normal_distribution<double> noise(0.0, noise_std);
    for (auto& beam : scan.beams) {
        if (!beam.hit) continue;
        double r = beam.range + noise(rng);
        beam.range = std::min(std::max(r, 0.5 * world.resolution()), spec.r_max);
    }
    return scan;
}

}  // namespace gradex
