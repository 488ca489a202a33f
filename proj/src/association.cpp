#include "reefscale/association.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "reefscale/errors.hpp"

namespace reefscale {

namespace {

bool tile_contains(const Tile &tile, const Point2 &p) {
    return p.x() >= tile.bounds.min().x() && p.x() < tile.bounds.max().x() &&
           p.y() >= tile.bounds.min().y() && p.y() < tile.bounds.max().y();
}

// Index of the tile containing p under the half-open rule, or -1. The floor
// estimate can be off by one at seams, so neighbors are probed with the exact
// stored bounds.
long find_tile(const TileGrid &grid, const Point2 &p) {
    double cell = grid.cell_size_m();
    long c0 = static_cast<long>(
        std::floor((p.x() - grid.meta.origin.x()) / cell));
    long r0 = static_cast<long>(
        std::floor((grid.meta.origin.y() - p.y()) / cell));
    for (long r = r0 - 1; r <= r0 + 1; ++r) {
        if (r < 0 || r >= grid.n_rows)
            continue;
        for (long c = c0 - 1; c <= c0 + 1; ++c) {
            if (c < 0 || c >= grid.n_cols)
                continue;
            long idx = r * grid.n_cols + c;
            if (tile_contains(grid.tiles[static_cast<size_t>(idx)], p))
                return idx;
        }
    }
    return -1;
}

} // namespace

AssociationMap assign_images_to_tiles(const std::vector<ImageRecord> &images,
                                      const TileGrid &grid) {
    AssociationMap assoc;
    if (grid.n_rows <= 0 || grid.n_cols <= 0)
        return assoc;
    for (const ImageRecord &img : images) {
        long idx = find_tile(grid, img.camera_position);
        if (idx < 0)
            continue;
        assoc[grid.tiles[static_cast<size_t>(idx)].id].image_ids.push_back(
            img.image_id);
    }
    return assoc;
}

void attach_overlap_ratios(AssociationMap &assoc,
                           const std::vector<Footprint> &footprints,
                           const TileGrid &grid) {
    std::unordered_map<std::string, const Footprint *> fp_by_id;
    fp_by_id.reserve(footprints.size());
    for (const Footprint &fp : footprints)
        fp_by_id[fp.image_id] = &fp;

    std::map<std::string, const Tile *> tile_by_id;
    for (const Tile &t : grid.tiles)
        tile_by_id[t.id] = &t;

    for (auto &[tile_id, ta] : assoc) {
        auto tit = tile_by_id.find(tile_id);
        if (tit == tile_by_id.end())
            throw DataError("association references unknown tile " + tile_id);
        ta.overlap_ratios.clear();
        ta.overlap_ratios.reserve(ta.image_ids.size());
        for (const std::string &image_id : ta.image_ids) {
            auto fit = fp_by_id.find(image_id);
            if (fit == fp_by_id.end())
                throw DataError("no footprint for image " + image_id);
            ta.overlap_ratios.push_back(
                overlap_ratio(*fit->second, tit->second->bounds));
        }
    }
}

const char *drop_reason_name(DropReason reason) {
    switch (reason) {
    case DropReason::Black: return "black";
    case DropReason::NoImages: return "no_images";
    case DropReason::LowCoverage: return "low_coverage";
    }
    return "unknown";
}

TileFilterResult filter_tiles(const TileGrid &grid,
                              const std::vector<bool> &black_flags,
                              const AssociationMap &assoc,
                              const std::vector<Footprint> &footprints,
                              double coverage_threshold,
                              bool require_coverage,
                              int coverage_grid_n) {
    if (black_flags.size() != grid.tiles.size())
        throw DataError("black flag list does not match the tile grid");
    if (require_coverage &&
        !(coverage_threshold > 0.0 && coverage_threshold <= 1.0))
        throw std::invalid_argument("coverage threshold must lie in (0,1]");

    std::unordered_map<std::string, const Footprint *> fp_by_id;
    fp_by_id.reserve(footprints.size());
    for (const Footprint &fp : footprints)
        fp_by_id[fp.image_id] = &fp;

    TileFilterResult result;
    for (size_t i = 0; i < grid.tiles.size(); ++i) {
        const Tile &tile = grid.tiles[i];
        if (black_flags[i]) {
            result.dropped.emplace_back(tile.id, DropReason::Black);
            continue;
        }
        auto it = assoc.find(tile.id);
        if (it == assoc.end() || it->second.image_ids.empty()) {
            result.dropped.emplace_back(tile.id, DropReason::NoImages);
            continue;
        }
        if (require_coverage) {
            std::vector<Footprint> local;
            local.reserve(it->second.image_ids.size());
            for (const std::string &id : it->second.image_ids) {
                auto fit = fp_by_id.find(id);
                if (fit == fp_by_id.end())
                    throw DataError("tile " + tile.id +
                                    " references unknown footprint " + id);
                local.push_back(*fit->second);
            }
            double cov = coverage_fraction(local, tile.bounds, coverage_grid_n);
            if (cov < coverage_threshold) {
                result.dropped.emplace_back(tile.id, DropReason::LowCoverage);
                continue;
            }
        }
        result.retained.push_back(tile.id);
    }
    return result;
}

} // namespace reefscale
