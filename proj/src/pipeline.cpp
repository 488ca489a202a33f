#include "reefscale/pipeline.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "reefscale/errors.hpp"

namespace reefscale {

void PipelineConfig::validate() const {
    if (!(tile_side_m > 0.0))
        throw DataError("tile_side_m must be positive");
    auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!in_unit(coverage_threshold))
        throw DataError("coverage_threshold must lie in [0,1]");
    if (!in_unit(black_threshold))
        throw DataError("black_threshold must lie in [0,1]");
    if (!(binarize_threshold > 0.0 && binarize_threshold < 1.0))
        throw DataError("binarize_threshold must lie in (0,1)");
    if (!in_unit(presence_threshold))
        throw DataError("presence_threshold must lie in [0,1]");
    if (min_class_count < 0)
        throw DataError("min_class_count must be nonnegative");
    double sum = split_ratios[0] + split_ratios[1] + split_ratios[2];
    for (double r : split_ratios)
        if (!(r > 0.0))
            throw DataError("split ratios must be positive");
    if (std::abs(sum - 1.0) > 1e-9)
        throw DataError("split ratios must sum to 1");
    if (!(camera.fov_h_deg > 0.0 && camera.fov_h_deg < 180.0) ||
        !(camera.fov_v_deg > 0.0 && camera.fov_v_deg < 180.0))
        throw DataError("camera FOVs must lie in (0,180) degrees");
    catalog.validate();
}

PipelineConfig PipelineConfig::from_json_file(const fs::path &path) {
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open config " + path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception &e) {
        throw DataError(path.string() + ": invalid JSON: " + e.what());
    }

    PipelineConfig cfg;
    try {
        auto get_path = [&](const char *key, fs::path &out) {
            if (doc.contains(key))
                out = doc.at(key).get<std::string>();
        };
        get_path("orthophoto", cfg.orthophoto);
        get_path("world_file", cfg.world_file);
        get_path("crs_file", cfg.crs_file);
        get_path("images_csv", cfg.images_csv);
        get_path("predictions_csv", cfg.predictions_csv);
        get_path("output_dir", cfg.output_dir);

        cfg.tile_side_m = doc.value("tile_side_m", cfg.tile_side_m);
        cfg.coverage_threshold =
            doc.value("coverage_threshold", cfg.coverage_threshold);
        cfg.black_threshold = doc.value("black_threshold", cfg.black_threshold);
        cfg.require_coverage = doc.value("require_coverage", cfg.require_coverage);
        if (doc.contains("method"))
            cfg.method = parse_aggregation_method(doc.at("method").get<std::string>());
        cfg.binarize_threshold =
            doc.value("binarize_threshold", cfg.binarize_threshold);
        cfg.min_class_count = doc.value("min_class_count", cfg.min_class_count);
        cfg.presence_threshold =
            doc.value("presence_threshold", cfg.presence_threshold);

        if (doc.contains("split")) {
            const auto &s = doc.at("split");
            if (s.contains("ratios")) {
                auto r = s.at("ratios").get<std::vector<double>>();
                if (r.size() != 3)
                    throw DataError("split.ratios must have 3 entries");
                cfg.split_ratios = {r[0], r[1], r[2]};
            }
            cfg.seed = s.value("seed", cfg.seed);
        }
        if (doc.contains("seed"))
            cfg.seed = doc.at("seed").get<uint64_t>();

        if (doc.contains("camera")) {
            const auto &c = doc.at("camera");
            cfg.camera.fov_h_deg = c.value("fov_h_deg", cfg.camera.fov_h_deg);
            cfg.camera.fov_v_deg = c.value("fov_v_deg", cfg.camera.fov_v_deg);
        }
        if (doc.contains("timing")) {
            const auto &t = doc.at("timing");
            cfg.timing.fv = t.value("fv", cfg.timing.fv);
            cfg.timing.fc = t.value("fc", cfg.timing.fc);
            cfg.timing.anchor_frame = t.value("anchor_frame", cfg.timing.anchor_frame);
            cfg.timing.anchor_utc = t.value("anchor_utc", cfg.timing.anchor_utc);
            cfg.timing.leap_offset_s =
                t.value("leap_offset_s", cfg.timing.leap_offset_s);
            cfg.timing.anchor_is_gps_time =
                t.value("anchor_is_gps_time", cfg.timing.anchor_is_gps_time);
        }
        if (doc.contains("catalog")) {
            const auto &c = doc.at("catalog");
            ClassCatalog cat;
            cat.aerial_classes =
                c.at("aerial_classes").get<std::vector<std::string>>();
            if (c.contains("merge_rules"))
                for (const auto &[target, sources] : c.at("merge_rules").items())
                    for (const auto &s : sources)
                        cat.merge_rules[target].insert(s.get<std::string>());
            if (c.contains("drop_list"))
                for (const auto &s : c.at("drop_list"))
                    cat.drop_list.insert(s.get<std::string>());
            cfg.catalog = std::move(cat);
        }
    } catch (const nlohmann::json::exception &e) {
        throw DataError(path.string() + ": malformed config: " + e.what());
    }
    cfg.validate();
    return cfg;
}

std::vector<std::pair<std::string, double>> PipelineSummary::rows() const {
    std::vector<std::pair<std::string, double>> out = {
        {"tiles_total", static_cast<double>(tiles_total)},
        {"tiles_kept", static_cast<double>(tiles_kept)},
        {"dropped_black", static_cast<double>(dropped_black)},
        {"dropped_no_images", static_cast<double>(dropped_no_images)},
        {"dropped_low_coverage", static_cast<double>(dropped_low_coverage)},
        {"dropped_partial_edge", static_cast<double>(dropped_partial_edge)},
        {"images_total", static_cast<double>(images_total)},
    };
    for (const auto &[cls, count] : class_counts)
        out.emplace_back("class_count." + cls, static_cast<double>(count));
    return out;
}

namespace {

template <typename F>
auto stage(const char *name, F &&f) -> decltype(f()) {
    try {
        return f();
    } catch (const std::exception &e) {
        throw DataError(std::string(name) + ": " + e.what());
    }
}

} // namespace

PipelineResult run_pipeline(const PipelineConfig &config) {
    config.validate();

    PipelineResult result;

    auto [ortho, meta] = stage("ingest", [&] {
        Raster raster = read_raster(config.orthophoto);
        WorldFile wf = read_world_file(config.world_file);
        std::string crs = read_crs_file(config.crs_file);
        OrthophotoMeta m = make_ortho_meta(raster, wf, crs);
        return std::make_pair(std::move(raster), m);
    });

    result.grid = stage("tiling", [&] {
        return compute_tile_grid(meta, config.tile_side_m);
    });

    std::vector<ImageRecord> images = stage("ingest images", [&] {
        auto imgs = read_images_csv(config.images_csv);
        auto preds = read_predictions_csv(config.predictions_csv);
        for (ImageRecord &img : imgs) {
            auto it = preds.find(img.image_id);
            if (it != preds.end())
                img.teacher_probs = it->second;
        }
        return imgs;
    });

    std::vector<Footprint> footprints = stage("footprints", [&] {
        std::vector<Footprint> fps;
        fps.reserve(images.size());
        for (const ImageRecord &img : images)
            fps.push_back(project_footprint(img.camera_position, img.depth_m,
                                            img.attitude, config.camera,
                                            img.image_id));
        return fps;
    });

    result.assoc = stage("association", [&] {
        AssociationMap assoc = assign_images_to_tiles(images, result.grid);
        attach_overlap_ratios(assoc, footprints, result.grid);
        return assoc;
    });

    result.filter = stage("filtering", [&] {
        std::vector<bool> black(result.grid.tiles.size(), false);
        for (size_t i = 0; i < result.grid.tiles.size(); ++i)
            black[i] = is_black_tile(extract_tile(ortho, result.grid.tiles[i]),
                                     config.black_threshold);
        return filter_tiles(result.grid, black, result.assoc, footprints,
                            config.coverage_threshold, config.require_coverage);
    });

    SoftLabelSet raw = stage("aggregation", [&] {
        std::map<std::string, ClassVector> image_probs;
        for (const ImageRecord &img : images)
            image_probs[img.image_id] =
                remap_classes(img.teacher_probs, config.catalog);
        return aggregate_tiles(result.assoc, result.filter.retained, image_probs,
                               config.catalog.aerial_classes, config.method,
                               config.binarize_threshold);
    });

    result.labels = stage("pruning", [&] {
        return prune_rare_classes(raw, config.min_class_count,
                                  config.presence_threshold);
    });

    PipelineSummary &summary = result.summary;
    summary.dropped_partial_edge = result.grid.partial_edge_count();
    summary.tiles_kept = static_cast<long>(result.filter.retained.size());
    for (const auto &[tile_id, reason] : result.filter.dropped) {
        switch (reason) {
        case DropReason::Black: ++summary.dropped_black; break;
        case DropReason::NoImages: ++summary.dropped_no_images; break;
        case DropReason::LowCoverage: ++summary.dropped_low_coverage; break;
        }
    }
    summary.tiles_total = summary.tiles_kept + summary.dropped_black +
                          summary.dropped_no_images +
                          summary.dropped_low_coverage +
                          summary.dropped_partial_edge;
    summary.images_total = static_cast<long>(images.size());
    for (size_t c = 0; c < result.labels.classes.size(); ++c) {
        long count = 0;
        for (const auto &[tile_id, values] : result.labels.labels)
            if (values[static_cast<Eigen::Index>(c)] >= config.presence_threshold)
                ++count;
        summary.class_counts.emplace_back(result.labels.classes[c], count);
    }

    stage("outputs", [&] {
        fs::create_directories(config.output_dir);
        write_manifest_jsonl(config.output_dir / "manifest.jsonl", result.grid,
                             result.labels, result.assoc);
        write_labels_csv(config.output_dir / "labels.csv", result.labels);
        write_metrics_report(config.output_dir / "summary.txt", summary.rows());
        return 0;
    });

    return result;
}

void emit_prediction_map(const SoftLabelSet &labels, const TileGrid &grid,
                         const std::string &class_name, const fs::path &base) {
    auto cit = std::find(labels.classes.begin(), labels.classes.end(), class_name);
    if (cit == labels.classes.end())
        throw UnknownClass("no scores for class " + class_name);
    auto c = static_cast<Eigen::Index>(cit - labels.classes.begin());

    Raster map;
    map.width = grid.n_cols;
    map.height = grid.n_rows;
    map.channels = 1;
    map.data.assign(static_cast<size_t>(grid.n_cols) * grid.n_rows, kMapNodata);
    for (const Tile &t : grid.tiles) {
        auto it = labels.labels.find(t.id);
        if (it == labels.labels.end())
            continue;
        double p = it->second[c];
        map.data[static_cast<size_t>(t.row) * grid.n_cols + t.col] =
            static_cast<uint8_t>(std::lround(p * 254.0));
    }

    fs::path pgm = base;
    pgm += ".pgm";
    fs::path tmp = pgm;
    tmp += ".tmp";
    write_raster(tmp, map);
    fs::rename(tmp, pgm);

    WorldFile wf;
    double cell = grid.cell_size_m();
    wf.x_scale = cell;
    wf.y_scale = -cell;
    wf.x_center_ul = grid.meta.origin.x() + 0.5 * cell;
    wf.y_center_ul = grid.meta.origin.y() - 0.5 * cell;
    fs::path pgw = base;
    pgw += ".pgw";
    write_world_file(pgw, wf);

    fs::path crs = base;
    crs += ".crs";
    write_crs_file(crs, grid.meta.crs_id);
}

void emit_prediction_maps(const SoftLabelSet &labels, const TileGrid &grid,
                          const fs::path &dir) {
    fs::create_directories(dir);
    for (const std::string &cls : labels.classes)
        emit_prediction_map(labels, grid, cls, dir / ("map_" + cls));
}

} // namespace reefscale
