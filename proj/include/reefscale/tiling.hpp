#pragma once

#include <string>
#include <vector>

#include "reefscale/geometry.hpp"
#include "reefscale/raster.hpp"

namespace reefscale {

/// Georeferencing of an orthophoto: north-up, square pixels.
struct OrthophotoMeta {
    int width_px = 0;
    int height_px = 0;
    double gsd = 0.0;              // ground sample distance, meters per pixel
    Point2 origin = Point2::Zero(); // top-left corner of the top-left pixel
    std::string crs_id;

    void validate() const;
};

/// Builds metadata from a raster plus its world-file affine. Rotated grids
/// and non-square pixels are rejected.
OrthophotoMeta make_ortho_meta(const Raster &raster, const WorldFile &wf,
                               const std::string &crs_id);

WorldFile world_file_from_meta(const OrthophotoMeta &meta);

struct PixelWindow {
    int col0 = 0;
    int row0 = 0;
    int width = 0;
    int height = 0;
};

/// One fixed-ground-area cell of the orthophoto.
struct Tile {
    int row = 0;
    int col = 0;
    std::string id;      // "r%04d_c%04d", row-major stable ordering
    PixelWindow window;
    Box2 bounds;         // projected meters
};

std::string tile_id_for(int row, int col);

struct TileGrid {
    OrthophotoMeta meta;
    double tile_side_m = 0.0;  // requested ground side
    int tile_px = 0;           // realized side in pixels
    int n_rows = 0;
    int n_cols = 0;
    std::vector<Tile> tiles;   // row-major, full tiles only

    /// Realized tile ground side, tile_px * gsd.
    double cell_size_m() const { return tile_px * meta.gsd; }
    /// Grid cells intersecting the raster that were discarded as partial.
    long partial_edge_count() const;
};

/// Partitions the orthophoto into tiles of fixed ground area; partial edge
/// tiles are discarded. Throws TileTooSmall when tile_side_m < 2*gsd.
TileGrid compute_tile_grid(const OrthophotoMeta &meta, double tile_side_m);

/// True iff the fraction of pure-black pixels (all channels zero) exceeds
/// black_threshold. Throws EmptyRaster.
bool is_black_tile(const Raster &pixels, double black_threshold);

/// Copies a tile's pixel block out of the orthophoto. Throws WindowOutOfBounds.
Raster extract_tile(const Raster &ortho, const Tile &tile);

} // namespace reefscale
