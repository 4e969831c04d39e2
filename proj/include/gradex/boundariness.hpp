#pragma once

#include <cmath>
#include <filesystem>
#include <stdexcept>

#include "gradex/occupancy.hpp"

namespace gradex {

struct BoundarinessParams {
    double weight = 0.5;  // balance between the two score terms
    double sigma = 0.3;   // spread, in log-odds units

    void validate() const {
        if (!(weight >= 0.0 && weight <= 1.0))
            throw std::invalid_argument("boundariness: weight must be in [0, 1]");
        if (!(sigma > 0.0)) throw std::invalid_argument("boundariness: sigma must be positive");
    }
};

/// Score in [0, 1] for how likely cell (i0, j0) is to lie on the boundary
/// between explored and unexplored space. Combines how unknown the cell
/// itself is with how balanced its neighborhood's evidence is. Returns 0 for
/// the degenerate neighborhoods: all neighbors unknown (nothing nearby is
/// explored) or every known neighbor occupied (the cell is walled off).
/// At map edges only in-bounds neighbors enter the sum, and the
/// normalization uses the actual neighbor count.
inline double cell_boundariness(const LogOddsMap& odds, int i0, int j0,
                                const BoundarinessParams& params) {
    if (!odds.grid().in_bounds(i0, j0))
        throw std::out_of_range("cell_boundariness: center index out of bounds");
    double p = 0.0;
    int neighbors = 0;
    bool any_known = false;
    bool any_known_free = false;
    for (int dj = -1; dj <= 1; ++dj) {
        for (int di = -1; di <= 1; ++di) {
            if (di == 0 && dj == 0) continue;
            int i = i0 + di, j = j0 + dj;
            if (!odds.grid().in_bounds(i, j)) continue;
            double v = odds.value(i, j);
            p += v;
            ++neighbors;
            if (v != 0.0) any_known = true;
            if (v < 0.0) any_known_free = true;
        }
    }
    if (!any_known) return 0.0;                 // fully unexplored surroundings
    if (!any_known_free) return 0.0;            // occluded: known neighbors all occupied
    const double w = params.weight;
    const double s2 = params.sigma * params.sigma;
    const double center = odds.value(i0, j0);
    const double n = static_cast<double>(neighbors);
    double first = w * std::exp(-(center * center) / (2.0 * s2));
    double second = (1.0 - w) * std::exp(-(p * p) / (2.0 * n * n * s2));
    return first + second;
}

/// Boundariness of every cell; a pure function of the log-odds map.
inline Grid<double> compute_boundariness_map(const LogOddsMap& odds,
                                             const BoundarinessParams& params) {
    params.validate();
    Grid<double> bd(odds.width(), odds.height(), odds.resolution());
    for (int j = 0; j < odds.height(); ++j)
        for (int i = 0; i < odds.width(); ++i)
            bd.at(i, j) = cell_boundariness(odds, i, j, params);
    return bd;
}

/// Recompute only cells whose score can have changed after an update that
/// touched `touched`: scores depend on the 8-neighborhood, so the touched
/// box dilated by one cell covers them. Equals a full recomputation.
inline void refresh_boundariness(Grid<double>& bd, const LogOddsMap& odds,
                                 const BoundarinessParams& params, const CellBox& touched) {
    if (touched.empty()) return;
    CellBox region = touched.dilated(1).clipped(odds.width(), odds.height());
    for (int j = region.j_min; j <= region.j_max; ++j)
        for (int i = region.i_min; i <= region.i_max; ++i)
            bd.at(i, j) = cell_boundariness(odds, i, j, params);
}

inline int count_above(const Grid<double>& bd, double threshold) {
    int n = 0;
    for (double v : bd.data())
        if (v > threshold) ++n;
    return n;
}

/// Heat-map PGM: darker pixels mean higher boundariness.
inline void write_boundariness_pgm(const std::filesystem::path& path, const Grid<double>& bd) {
    std::vector<int> px(bd.size());
    for (int j = 0; j < bd.height(); ++j)
        for (int i = 0; i < bd.width(); ++i)
            px[static_cast<std::size_t>(j) * bd.width() + i] =
                255 - static_cast<int>(std::lround(bd.at(i, j) * 255.0));
    write_pgm(path, bd.width(), bd.height(), px);
}

}  // namespace gradex
