#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "reefscale/association.hpp"
#include "reefscale/eval.hpp"
#include "reefscale/geometry.hpp"
#include "reefscale/labeling.hpp"
#include "reefscale/split.hpp"
#include "reefscale/sync.hpp"
#include "reefscale/synth.hpp"
#include "reefscale/tiling.hpp"

namespace reefscale {

namespace fs = std::filesystem;

/// Shortest round-trip decimal rendering of a double.
std::string format_double(double v);

// --- survey imagery ---------------------------------------------------------
// header: image_id,timestamp_utc,easting,northing,depth_m,roll_deg,pitch_deg,yaw_deg
void write_images_csv(const fs::path &path, const std::vector<ImageRecord> &images);
std::vector<ImageRecord> read_images_csv(const fs::path &path);

// header: image_id,class,prob
void write_predictions_csv(const fs::path &path,
                           const std::vector<ImageRecord> &images);
std::map<std::string, std::map<std::string, double>>
read_predictions_csv(const fs::path &path);

// GeoJSON FeatureCollection of Polygons carrying an image_id property.
void write_footprints_geojson(const fs::path &path,
                              const std::vector<Footprint> &footprints);
std::vector<Footprint> read_footprints_geojson(const fs::path &path);

// header: timestamp_utc,easting,northing,depth_m,roll_deg,pitch_deg,yaw_deg
void write_track_csv(const fs::path &path, const GpsTrack &track);
GpsTrack read_track_csv(const fs::path &path);

// header: frame_idx (one extracted video frame index per row)
std::vector<long> read_frames_csv(const fs::path &path);

// --- tiles & association ----------------------------------------------------
// header: tile_id,row,col,col0,row0,width,height,min_e,min_n,max_e,max_n
void write_tiles_csv(const fs::path &path, const TileGrid &grid);

// header: tile_id,image_id,overlap_ratio
void write_associations_csv(const fs::path &path, const AssociationMap &assoc);
AssociationMap read_associations_csv(const fs::path &path);

// --- labels & evaluation ----------------------------------------------------
// header: tile_id,class,value
void write_labels_csv(const fs::path &path, const SoftLabelSet &labels);
std::map<PairKey, double> read_labels_csv(const fs::path &path);

/// Joins reference and prediction maps on identical key sets; a missing key
/// raises DataError naming the first offender.
PairedScores pair_scores(const std::map<PairKey, double> &reference,
                         const std::map<PairKey, double> &predicted);

void write_metrics_report(const fs::path &path,
                          const std::vector<std::pair<std::string, double>> &metrics);

// --- split ------------------------------------------------------------------
// header: sample_id,group_key,labels  (labels semicolon-joined)
void write_samples_csv(const fs::path &path,
                       const std::vector<SampleLabels> &samples);
std::vector<SampleLabels> read_samples_csv(const fs::path &path);

// header: sample_id,subset
void write_assignment_csv(const fs::path &path,
                          const std::vector<SampleLabels> &samples,
                          const SplitAssignment &assignment);

// header: class,train_freq,val_freq,test_freq,total
void write_split_report_csv(const fs::path &path,
                            const std::vector<ClassSplitRow> &rows);

// --- synthetic scenes -------------------------------------------------------
void write_scene_json(const fs::path &path, const SyntheticScene &scene);
SyntheticScene read_scene_json(const fs::path &path);

// header: tile_id,class,value (0/1 ground truth)
void write_oracle_csv(const fs::path &path, const OracleLabels &oracle);

// --- manifest ---------------------------------------------------------------
/// One JSON object per line per retained tile: tile_id, bounds, pixel window,
/// per-class soft labels, contributing images with overlap ratios.
void write_manifest_jsonl(const fs::path &path, const TileGrid &grid,
                          const SoftLabelSet &labels,
                          const AssociationMap &assoc);

/// Writes to `path` atomically via a temp file and rename.
void atomic_write_text(const fs::path &path, const std::string &content);

} // namespace reefscale
