#pragma once

#include <map>
#include <string>
#include <vector>

#include "reefscale/geometry.hpp"
#include "reefscale/tiling.hpp"

namespace reefscale {

/// Images whose camera position falls inside a tile, with the fraction of
/// each image's footprint area lying inside that tile (Eq. 2's ratio).
struct TileAssociation {
    std::vector<std::string> image_ids;
    std::vector<double> overlap_ratios; // aligned; filled by attach_overlap_ratios
};

using AssociationMap = std::map<std::string, TileAssociation>;

/// Assigns each image to the tile containing its camera position. Tile
/// bounds are half-open [min_e, max_e) × [min_n, max_n), so seam points land
/// in exactly one tile; images outside the grid stay unassigned.
AssociationMap assign_images_to_tiles(const std::vector<ImageRecord> &images,
                                      const TileGrid &grid);

/// Computes s(x∩t)/s(x) for every assigned image against its tile.
void attach_overlap_ratios(AssociationMap &assoc,
                           const std::vector<Footprint> &footprints,
                           const TileGrid &grid);

enum class DropReason { Black, NoImages, LowCoverage };

const char *drop_reason_name(DropReason reason);

struct TileFilterResult {
    std::vector<std::string> retained;                        // tile ids
    std::vector<std::pair<std::string, DropReason>> dropped;  // tile id, why
};

/// Applies the tile retention rules, in precedence order: black-flagged tiles
/// first, then tiles with no assigned imagery, then (when require_coverage)
/// tiles whose sampled footprint coverage falls below coverage_threshold.
/// black_flags aligns with grid.tiles; coverage counts only the footprints of
/// images assigned to the tile by the center rule.
TileFilterResult filter_tiles(const TileGrid &grid,
                              const std::vector<bool> &black_flags,
                              const AssociationMap &assoc,
                              const std::vector<Footprint> &footprints,
                              double coverage_threshold,
                              bool require_coverage,
                              int coverage_grid_n = 64);

} // namespace reefscale
