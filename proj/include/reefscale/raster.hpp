#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "reefscale/errors.hpp"

namespace reefscale {

/// 8-bit raster, row-major with interleaved channels (1 = gray, 3 = RGB).
struct Raster {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<std::uint8_t> data;

    Raster() = default;
    Raster(int w, int h, int ch, std::uint8_t fill = 0)
        : width(w), height(h), channels(ch),
          data(static_cast<size_t>(w) * h * ch, fill) {}

    std::uint8_t &at(int row, int col, int ch = 0) {
        return data[(static_cast<size_t>(row) * width + col) * channels + ch];
    }
    std::uint8_t at(int row, int col, int ch = 0) const {
        return data[(static_cast<size_t>(row) * width + col) * channels + ch];
    }
    bool empty() const { return data.empty(); }
};

/// Reads a binary PGM (P5) or PPM (P6) file. Throws DataError on malformed
/// input or unsupported magic/maxval.
Raster read_raster(const std::filesystem::path &path);

/// Writes P5 for 1-channel rasters, P6 for 3-channel ones.
void write_raster(const std::filesystem::path &path, const Raster &raster);

/// Six-parameter pixel-to-world affine in world-file line order:
///   x_scale, y_rot, x_rot, y_scale, x_center_ul, y_center_ul
/// where (x_center_ul, y_center_ul) is the world position of the CENTER of
/// the top-left pixel.
struct WorldFile {
    double x_scale = 0.0;
    double y_rot = 0.0;
    double x_rot = 0.0;
    double y_scale = 0.0;
    double x_center_ul = 0.0;
    double y_center_ul = 0.0;
};

WorldFile read_world_file(const std::filesystem::path &path);
void write_world_file(const std::filesystem::path &path, const WorldFile &wf);

/// Reads the one-line CRS declaration sidecar (e.g. "EPSG:2975").
std::string read_crs_file(const std::filesystem::path &path);
void write_crs_file(const std::filesystem::path &path, const std::string &crs_id);

} // namespace reefscale
