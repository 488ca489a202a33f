#include "reefscale/tiling.hpp"

#include <cmath>
#include <cstdio>

#include "reefscale/errors.hpp"

namespace reefscale {

void OrthophotoMeta::validate() const {
    if (width_px <= 0 || height_px <= 0)
        throw DataError("orthophoto has empty pixel extent");
    if (!(gsd > 0.0))
        throw DataError("orthophoto gsd must be positive");
}

OrthophotoMeta make_ortho_meta(const Raster &raster, const WorldFile &wf,
                               const std::string &crs_id) {
    if (wf.x_rot != 0.0 || wf.y_rot != 0.0)
        throw DataError("rotated orthophoto grids are not supported");
    if (!(wf.x_scale > 0.0) || !(wf.y_scale < 0.0))
        throw DataError("orthophoto must be north-up (x_scale > 0, y_scale < 0)");
    if (std::abs(wf.x_scale + wf.y_scale) > 1e-12 * wf.x_scale)
        throw DataError("orthophoto pixels must be square");
    OrthophotoMeta meta;
    meta.width_px = raster.width;
    meta.height_px = raster.height;
    meta.gsd = wf.x_scale;
    // World files reference the center of the upper-left pixel.
    meta.origin = Point2(wf.x_center_ul - 0.5 * wf.x_scale,
                         wf.y_center_ul - 0.5 * wf.y_scale);
    meta.crs_id = crs_id;
    meta.validate();
    return meta;
}

WorldFile world_file_from_meta(const OrthophotoMeta &meta) {
    WorldFile wf;
    wf.x_scale = meta.gsd;
    wf.y_scale = -meta.gsd;
    wf.x_rot = 0.0;
    wf.y_rot = 0.0;
    wf.x_center_ul = meta.origin.x() + 0.5 * meta.gsd;
    wf.y_center_ul = meta.origin.y() - 0.5 * meta.gsd;
    return wf;
}

std::string tile_id_for(int row, int col) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "r%04d_c%04d", row, col);
    return buf;
}

long TileGrid::partial_edge_count() const {
    long covering_rows = (meta.height_px + tile_px - 1) / tile_px;
    long covering_cols = (meta.width_px + tile_px - 1) / tile_px;
    return covering_rows * covering_cols - static_cast<long>(n_rows) * n_cols;
}

TileGrid compute_tile_grid(const OrthophotoMeta &meta, double tile_side_m) {
    meta.validate();
    int tile_px = static_cast<int>(std::lround(tile_side_m / meta.gsd));
    if (tile_px < 2)
        throw TileTooSmall("tile side " + std::to_string(tile_side_m) +
                           " m spans fewer than 2 pixels at gsd " +
                           std::to_string(meta.gsd));

    TileGrid grid;
    grid.meta = meta;
    grid.tile_side_m = tile_side_m;
    grid.tile_px = tile_px;
    grid.n_rows = meta.height_px / tile_px;
    grid.n_cols = meta.width_px / tile_px;
    grid.tiles.reserve(static_cast<size_t>(grid.n_rows) * grid.n_cols);

    // Shared edge coordinates so adjacent tiles meet exactly (half-open
    // membership must assign seam points to exactly one tile).
    double cell = grid.cell_size_m();
    std::vector<double> edge_e(static_cast<size_t>(grid.n_cols) + 1);
    std::vector<double> edge_n(static_cast<size_t>(grid.n_rows) + 1);
    for (int c = 0; c <= grid.n_cols; ++c)
        edge_e[static_cast<size_t>(c)] = meta.origin.x() + c * cell;
    for (int r = 0; r <= grid.n_rows; ++r)
        edge_n[static_cast<size_t>(r)] = meta.origin.y() - r * cell;

    for (int r = 0; r < grid.n_rows; ++r) {
        for (int c = 0; c < grid.n_cols; ++c) {
            Tile t;
            t.row = r;
            t.col = c;
            t.id = tile_id_for(r, c);
            t.window = {c * tile_px, r * tile_px, tile_px, tile_px};
            t.bounds = Box2(
                Point2(edge_e[static_cast<size_t>(c)],
                       edge_n[static_cast<size_t>(r) + 1]),
                Point2(edge_e[static_cast<size_t>(c) + 1],
                       edge_n[static_cast<size_t>(r)]));
            grid.tiles.push_back(std::move(t));
        }
    }
    return grid;
}

bool is_black_tile(const Raster &pixels, double black_threshold) {
    if (pixels.width <= 0 || pixels.height <= 0 || pixels.data.empty())
        throw EmptyRaster("cannot classify an empty tile");
    long black = 0;
    long total = static_cast<long>(pixels.width) * pixels.height;
    const uint8_t *p = pixels.data.data();
    for (long i = 0; i < total; ++i) {
        bool all_zero = true;
        for (int ch = 0; ch < pixels.channels; ++ch)
            if (p[i * pixels.channels + ch] != 0) { all_zero = false; break; }
        if (all_zero) ++black;
    }
    return static_cast<double>(black) / static_cast<double>(total) > black_threshold;
}

Raster extract_tile(const Raster &ortho, const Tile &tile) {
    const PixelWindow &w = tile.window;
    if (w.col0 < 0 || w.row0 < 0 || w.width <= 0 || w.height <= 0 ||
        w.col0 + w.width > ortho.width || w.row0 + w.height > ortho.height)
        throw WindowOutOfBounds("tile " + tile.id + " window exceeds raster extent");
    Raster out;
    out.width = w.width;
    out.height = w.height;
    out.channels = ortho.channels;
    out.data.resize(static_cast<size_t>(w.width) * w.height * ortho.channels);
    for (int r = 0; r < w.height; ++r) {
        const uint8_t *src = ortho.data.data() +
            (static_cast<size_t>(w.row0 + r) * ortho.width + w.col0) * ortho.channels;
        uint8_t *dst = out.data.data() +
            static_cast<size_t>(r) * w.width * ortho.channels;
        std::copy(src, src + static_cast<size_t>(w.width) * ortho.channels, dst);
    }
    return out;
}

} // namespace reefscale
