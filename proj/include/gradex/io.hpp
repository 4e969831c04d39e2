#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace gradex {

/// Round-trip-exact decimal formatting for doubles.
inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Write a file atomically: the target path never holds partial content.
inline void atomic_write_text(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    fs::rename(tmp, path);
}

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Serialize an 8-bit grayscale image as ASCII PGM (P2).
inline std::string pgm_string(int width, int height, const std::vector<int>& pixels) {
    std::ostringstream out;
    out << "P2\n" << width << " " << height << "\n255\n";
    for (int j = 0; j < height; ++j) {
        for (int i = 0; i < width; ++i) {
            out << pixels[static_cast<std::size_t>(j) * width + i];
            out << (i + 1 == width ? '\n' : ' ');
        }
    }
    return out.str();
}

inline void write_pgm(const std::filesystem::path& path, int width, int height,
                      const std::vector<int>& pixels) {
    atomic_write_text(path, pgm_string(width, height, pixels));
}

}  // namespace gradex
