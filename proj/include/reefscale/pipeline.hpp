#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "reefscale/io.hpp"

namespace reefscale {

struct PipelineConfig {
    // inputs
    fs::path orthophoto;
    fs::path world_file;
    fs::path crs_file;
    fs::path images_csv;
    fs::path predictions_csv;
    fs::path output_dir;

    // tiling & filtering
    double tile_side_m = 1.5;
    double coverage_threshold = 0.95;
    double black_threshold = 0.5;
    bool require_coverage = true;

    // labeling
    AggregationMethod method = AggregationMethod::Distilled;
    double binarize_threshold = 0.5;
    int min_class_count = 0;
    double presence_threshold = 0.5;
    ClassCatalog catalog = ClassCatalog::reef_default();

    // split
    std::array<double, 3> split_ratios = {0.6, 0.2, 0.2};
    uint64_t seed = 0;

    // acquisition
    CameraModel camera;
    VideoTiming timing{23.976, 2.997, 0, 0.0, 18.0, false};

    void validate() const;
    static PipelineConfig from_json_file(const fs::path &path);
};

struct PipelineSummary {
    long tiles_total = 0; // grid cells covering the raster, partials included
    long tiles_kept = 0;
    long dropped_black = 0;
    long dropped_no_images = 0;
    long dropped_low_coverage = 0;
    long dropped_partial_edge = 0;
    long images_total = 0;
    std::vector<std::pair<std::string, long>> class_counts; // presence per class

    std::vector<std::pair<std::string, double>> rows() const;
};

struct PipelineResult {
    TileGrid grid;
    AssociationMap assoc;
    TileFilterResult filter;
    SoftLabelSet labels; // post-pruning
    PipelineSummary summary;
};

/// Full flow: tiling → black filter → association → coverage filter →
/// aggregation → pruning. Writes manifest.jsonl, labels.csv and summary.txt
/// into config.output_dir; failures are reported with stage context and never
/// leave partial outputs behind.
PipelineResult run_pipeline(const PipelineConfig &config);

/// One nodata-aware georeferenced raster for a class: one cell per grid tile,
/// probability scaled to 0–254, missing tiles = 255. Writes base.pgm/.pgw/.crs.
void emit_prediction_map(const SoftLabelSet &labels, const TileGrid &grid,
                         const std::string &class_name, const fs::path &base);

/// Maps for every class in the label set, named <dir>/map_<class>.
void emit_prediction_maps(const SoftLabelSet &labels, const TileGrid &grid,
                          const fs::path &dir);

constexpr uint8_t kMapNodata = 255;

} // namespace reefscale
