#pragma once

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "gradex/grid.hpp"
#include "gradex/io.hpp"

namespace gradex {

/// Ground-truth environment: a boolean occupancy grid over a closed
/// rectangular region. The outer ring of cells is always occupied, so every
/// ray eventually terminates inside the map.
class WorldMap {
public:
    WorldMap(int width, int height, double resolution)
        : cells_(width, height, resolution, 0) {
        close_boundary();
    }

    static WorldMap from_grid(Grid<std::uint8_t> cells) {
        WorldMap w(cells.width(), cells.height(), cells.resolution());
        w.cells_ = std::move(cells);
        w.close_boundary();
        return w;
    }

    /// Load from a PGM (P2/P5, pixel < 128 = occupied) or an ASCII grid of
    /// '#' (occupied) / '.' (free) rows. Both formats carry the cell
    /// resolution in a header line; see the bundled scenarios for samples.
    static WorldMap load(const std::string& path) {
        std::string text = read_text_file(path);
        if (text.rfind("P2", 0) == 0 || text.rfind("P5", 0) == 0)
            return parse_pgm(text, path);
        return parse_ascii(text, path);
    }

    int width() const { return cells_.width(); }
    int height() const { return cells_.height(); }
    double resolution() const { return cells_.resolution(); }
    double width_m() const { return cells_.width_m(); }
    double height_m() const { return cells_.height_m(); }
    const Grid<std::uint8_t>& grid() const { return cells_; }

    bool in_bounds(int i, int j) const { return cells_.in_bounds(i, j); }
    bool contains_point(double x, double y) const { return cells_.contains_point(x, y); }

    bool occupied(int i, int j) const { return cells_.at(i, j) != 0; }
    bool free(int i, int j) const { return cells_.at(i, j) == 0; }

    bool point_free(double x, double y) const {
        if (!contains_point(x, y)) return false;
        CellIndex c = cells_.cell_of(x, y);
        return free(c.i, c.j);
    }

    int count_free() const {
        int n = 0;
        for (auto v : cells_.data())
            if (v == 0) ++n;
        return n;
    }

private:
    Grid<std::uint8_t> cells_;

    void close_boundary() {
        for (int i = 0; i < width(); ++i) {
            cells_.at(i, 0) = 1;
            cells_.at(i, height() - 1) = 1;
        }
        for (int j = 0; j < height(); ++j) {
            cells_.at(0, j) = 1;
            cells_.at(width() - 1, j) = 1;
        }
    }

    static double parse_resolution_comment(const std::string& line, const std::string& path) {
        std::istringstream ss(line);
        std::string word;
        while (ss >> word) {
            if (word == "resolution") {
                double r;
                if (ss >> r && r > 0.0) return r;
                throw std::runtime_error(path + ": bad resolution value in header");
            }
        }
        return 0.0;
    }

    static WorldMap parse_pgm(const std::string& text, const std::string& path) {
        std::istringstream in(text);
        std::string magic;
        in >> magic;
        double resolution = 0.0;
        int header[3];  // width, height, maxval
        int have = 0;
        while (have < 3) {
            int c = in.peek();
            if (c == EOF) throw std::runtime_error(path + ": truncated PGM header");
            if (std::isspace(c)) {
                in.get();
                continue;
            }
            if (c == '#') {
                std::string line;
                std::getline(in, line);
                double r = parse_resolution_comment(line, path);
                if (r > 0.0) resolution = r;
                continue;
            }
            if (!(in >> header[have]))
                throw std::runtime_error(path + ": malformed PGM header");
            ++have;
        }
        if (resolution <= 0.0)
            throw std::runtime_error(path + ": missing '# resolution <m>' header comment");
        int w = header[0], h = header[1], maxval = header[2];
        if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 255)
            throw std::runtime_error(path + ": unsupported PGM dimensions/maxval");
        Grid<std::uint8_t> cells(w, h, resolution, 0);
        if (magic == "P2") {
            for (int j = 0; j < h; ++j)
                for (int i = 0; i < w; ++i) {
                    int v;
                    if (!(in >> v)) throw std::runtime_error(path + ": truncated PGM data");
                    cells.at(i, j) = v < 128 ? 1 : 0;
                }
        } else {
            in.get();  // single whitespace after maxval
            for (int j = 0; j < h; ++j)
                for (int i = 0; i < w; ++i) {
                    int v = in.get();
                    if (v == EOF) throw std::runtime_error(path + ": truncated PGM data");
                    cells.at(i, j) = v < 128 ? 1 : 0;
                }
        }
        return from_grid(std::move(cells));
    }

    static WorldMap parse_ascii(const std::string& text, const std::string& path) {
        std::istringstream in(text);
        std::string line;
        double resolution = 0.0;
        std::vector<std::string> rows;
        while (std::getline(in, line)) {
            while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
            if (line.empty()) continue;
            if (rows.empty() && line.rfind("resolution", 0) == 0) {
                resolution = parse_resolution_comment(line, path);
                continue;
            }
            for (char c : line)
                if (c != '#' && c != '.')
                    throw std::runtime_error(path + ": unexpected character '" +
                                             std::string(1, c) + "' in grid row");
            rows.push_back(line);
        }
        if (resolution <= 0.0)
            throw std::runtime_error(path + ": missing 'resolution <m>' header line");
        if (rows.empty()) throw std::runtime_error(path + ": no grid rows");
        int h = static_cast<int>(rows.size());
        int w = static_cast<int>(rows[0].size());
        for (const auto& r : rows)
            if (static_cast<int>(r.size()) != w)
                throw std::runtime_error(path + ": ragged grid rows");
        Grid<std::uint8_t> cells(w, h, resolution, 0);
        for (int j = 0; j < h; ++j)
            for (int i = 0; i < w; ++i)
                cells.at(i, j) = rows[j][i] == '#' ? 1 : 0;
        return from_grid(std::move(cells));
    }
};

}  // namespace gradex
