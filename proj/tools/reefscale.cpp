#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "reefscale/errors.hpp"
#include "reefscale/pipeline.hpp"

namespace rs = reefscale;
using rs::fs::path;

namespace {

std::vector<double> parse_number_list(const std::string &text, size_t expect,
                                      const char *what) {
    std::vector<double> values;
    std::string cur;
    auto flush = [&] {
        if (cur.empty())
            throw CLI::ValidationError(std::string(what) + ": empty component");
        values.push_back(std::stod(cur));
        cur.clear();
    };
    for (char c : text) {
        if (c == ',')
            flush();
        else
            cur += c;
    }
    flush();
    if (values.size() != expect)
        throw CLI::ValidationError(std::string(what) + ": expected " +
                                   std::to_string(expect) + " comma-separated values");
    return values;
}

std::vector<std::string> parse_name_list(const std::string &text) {
    std::vector<std::string> names;
    std::string cur;
    for (char c : text) {
        if (c == ',') {
            if (!cur.empty())
                names.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty())
        names.push_back(cur);
    return names;
}

rs::TileGrid grid_from_files(const path &ortho, const path &world,
                             const path &crs, double tile_side) {
    rs::Raster raster = rs::read_raster(ortho);
    rs::WorldFile wf = rs::read_world_file(world);
    std::string crs_id = rs::read_crs_file(crs);
    return rs::compute_tile_grid(rs::make_ortho_meta(raster, wf, crs_id),
                                 tile_side);
}

// Rebuilds a dense label set from a tile_id,class,value table.
rs::SoftLabelSet labels_from_csv(const path &file) {
    auto values = rs::read_labels_csv(file);
    rs::SoftLabelSet labels;
    std::set<std::string> classes;
    for (const auto &[key, v] : values)
        classes.insert(key.class_name);
    labels.classes.assign(classes.begin(), classes.end());
    std::set<std::string> tiles;
    for (const auto &[key, v] : values)
        tiles.insert(key.tile_id);
    for (const std::string &tile : tiles) {
        rs::ClassVector vec(static_cast<Eigen::Index>(labels.classes.size()));
        for (size_t c = 0; c < labels.classes.size(); ++c) {
            auto it = values.find(rs::PairKey{tile, labels.classes[c]});
            if (it == values.end())
                throw rs::DataError(file.string() + ": tile " + tile +
                                    " lacks a value for class " +
                                    labels.classes[c]);
            vec[static_cast<Eigen::Index>(c)] = it->second;
        }
        labels.labels[tile] = std::move(vec);
    }
    labels.validate();
    return labels;
}

struct FootprintsArgs {
    std::string config, images, frames, track, images_out, out;
};

int cmd_footprints(const FootprintsArgs &a) {
    rs::PipelineConfig cfg;
    if (!a.config.empty())
        cfg = rs::PipelineConfig::from_json_file(a.config);

    std::vector<rs::ImageRecord> images;
    if (!a.images.empty()) {
        images = rs::read_images_csv(a.images);
    } else {
        if (a.frames.empty() || a.track.empty())
            throw rs::DataError(
                "footprints needs either --images or both --frames and --track");
        std::vector<long> frames = rs::read_frames_csv(a.frames);
        rs::GpsTrack track = rs::read_track_csv(a.track);
        rs::validate_frame_rates(cfg.timing.fv, cfg.timing.fc);
        for (long idx : frames) {
            double t = rs::frame_timestamp(cfg.timing, idx);
            rs::TrackFix fix = rs::interpolate_track(track, t);
            rs::ImageRecord rec;
            char buf[32];
            std::snprintf(buf, sizeof(buf), "frame_%06ld", idx);
            rec.image_id = buf;
            rec.timestamp_utc = t;
            rec.camera_position = fix.position;
            rec.depth_m = fix.depth_m;
            rec.attitude = fix.attitude;
            images.push_back(std::move(rec));
        }
    }

    std::vector<rs::Footprint> footprints;
    footprints.reserve(images.size());
    for (const rs::ImageRecord &img : images)
        footprints.push_back(rs::project_footprint(img.camera_position,
                                                   img.depth_m, img.attitude,
                                                   cfg.camera, img.image_id));
    rs::write_footprints_geojson(a.out, footprints);
    if (!a.images_out.empty())
        rs::write_images_csv(a.images_out, images);
    std::cout << "wrote " << footprints.size() << " footprints to " << a.out
              << "\n";
    return 0;
}

struct TileArgs {
    std::string ortho, world, crs, out;
    double tile_side = 1.5;
};

int cmd_tile(const TileArgs &a) {
    rs::TileGrid grid = grid_from_files(a.ortho, a.world, a.crs, a.tile_side);
    rs::write_tiles_csv(a.out, grid);
    std::cout << "wrote " << grid.tiles.size() << " tiles (" << grid.n_rows
              << "x" << grid.n_cols << ", " << grid.partial_edge_count()
              << " partial cells discarded) to " << a.out << "\n";
    return 0;
}

struct AssociateArgs {
    std::string config, images, footprints, ortho, world, crs, out;
    double tile_side = 1.5;
};

int cmd_associate(const AssociateArgs &a) {
    rs::TileGrid grid = grid_from_files(a.ortho, a.world, a.crs, a.tile_side);
    auto images = rs::read_images_csv(a.images);

    std::vector<rs::Footprint> footprints;
    if (!a.footprints.empty()) {
        footprints = rs::read_footprints_geojson(a.footprints);
    } else {
        rs::PipelineConfig cfg;
        if (!a.config.empty())
            cfg = rs::PipelineConfig::from_json_file(a.config);
        footprints.reserve(images.size());
        for (const rs::ImageRecord &img : images)
            footprints.push_back(rs::project_footprint(img.camera_position,
                                                       img.depth_m, img.attitude,
                                                       cfg.camera, img.image_id));
    }

    rs::AssociationMap assoc = rs::assign_images_to_tiles(images, grid);
    rs::attach_overlap_ratios(assoc, footprints, grid);
    rs::write_associations_csv(a.out, assoc);
    std::cout << "wrote associations for " << assoc.size() << " tiles to "
              << a.out << "\n";
    return 0;
}

struct AggregateArgs {
    std::string config, associations, predictions, method = "distilled", out;
    double threshold = 0.5;
};

int cmd_aggregate(const AggregateArgs &a) {
    rs::PipelineConfig cfg;
    if (!a.config.empty())
        cfg = rs::PipelineConfig::from_json_file(a.config);

    rs::AssociationMap assoc = rs::read_associations_csv(a.associations);
    auto preds = rs::read_predictions_csv(a.predictions);
    std::map<std::string, rs::ClassVector> image_probs;
    for (const auto &[image_id, probs] : preds)
        image_probs[image_id] = rs::remap_classes(probs, cfg.catalog);

    std::vector<std::string> tiles;
    tiles.reserve(assoc.size());
    for (const auto &[tile_id, ta] : assoc)
        tiles.push_back(tile_id);

    rs::SoftLabelSet labels = rs::aggregate_tiles(
        assoc, tiles, image_probs, cfg.catalog.aerial_classes,
        rs::parse_aggregation_method(a.method), a.threshold);
    rs::write_labels_csv(a.out, labels);
    std::cout << "wrote " << labels.labels.size() << " tile labels ("
              << a.method << ") to " << a.out << "\n";
    return 0;
}

struct SplitArgs {
    std::string samples, ratios = "0.6,0.2,0.2", out, report;
    uint64_t seed = 0;
};

int cmd_split(const SplitArgs &a) {
    auto samples = rs::read_samples_csv(a.samples);
    auto r = parse_number_list(a.ratios, 3, "--ratios");
    rs::SplitAssignment assignment =
        rs::temporal_split(samples, {r[0], r[1], r[2]}, a.seed);
    rs::write_assignment_csv(a.out, samples, assignment);
    if (!a.report.empty())
        rs::write_split_report_csv(a.report,
                                   rs::split_report(assignment, samples));
    long counts[3] = {0, 0, 0};
    for (rs::Subset s : assignment.subsets)
        ++counts[static_cast<int>(s)];
    std::cout << "split " << samples.size() << " samples into train/val/test = "
              << counts[0] << "/" << counts[1] << "/" << counts[2] << "\n";
    return 0;
}

struct EvalArgs {
    std::string labels, preds, out;
    double auc_threshold = 0.5;
};

int cmd_eval(const EvalArgs &a) {
    auto reference = rs::read_labels_csv(a.labels);
    auto predicted = rs::read_labels_csv(a.preds);
    rs::PairedScores pairs = rs::pair_scores(reference, predicted);

    std::vector<std::pair<std::string, double>> metrics = {
        {"rmse", rs::rmse(pairs)},
        {"mae", rs::mae(pairs)},
        {"kl", rs::binary_kl(pairs)},
    };
    try {
        metrics.emplace_back(
            "auc_micro", rs::roc_auc(pairs, a.auc_threshold, rs::AucAveraging::Micro));
    } catch (const rs::DegenerateLabels &e) {
        std::cerr << "note: auc_micro skipped: " << e.what() << "\n";
    }
    try {
        metrics.emplace_back(
            "auc_macro", rs::roc_auc(pairs, a.auc_threshold, rs::AucAveraging::Macro));
    } catch (const rs::DegenerateLabels &e) {
        std::cerr << "note: auc_macro skipped: " << e.what() << "\n";
    }

    if (a.out.empty()) {
        for (const auto &[key, value] : metrics)
            std::cout << key << ": " << rs::format_double(value) << "\n";
    } else {
        rs::write_metrics_report(a.out, metrics);
        std::cout << "wrote metrics for " << pairs.keys.size() << " pairs to "
                  << a.out << "\n";
    }
    return 0;
}

struct MapArgs {
    std::string labels, ortho, world, crs, cls, out;
    double tile_side = 1.5;
};

int cmd_map(const MapArgs &a) {
    rs::TileGrid grid = grid_from_files(a.ortho, a.world, a.crs, a.tile_side);
    rs::SoftLabelSet labels = labels_from_csv(a.labels);
    if (!a.cls.empty()) {
        rs::fs::create_directories(a.out);
        rs::emit_prediction_map(labels, grid, a.cls,
                                path(a.out) / ("map_" + a.cls));
        std::cout << "wrote 1 prediction map to " << a.out << "\n";
    } else {
        rs::emit_prediction_maps(labels, grid, a.out);
        std::cout << "wrote " << labels.classes.size()
                  << " prediction maps to " << a.out << "\n";
    }
    return 0;
}

struct SimulateArgs {
    std::string extent = "0,0,15,15";
    std::string classes = "ClassA,ClassB,ClassC,ClassD";
    std::string track_start = "0.15,0.1";
    std::string out;
    int n_regions = 12;
    int n_lines = 50;
    double line_length = 14.8, line_spacing = 0.3, along_step = 0.2;
    double depth = 0.5, speed = 1.0, gsd = 0.025, tile_side = 1.5;
    double fov_h = 70.0, fov_v = 53.13;
    double pos_std = 0.0, att_std = 0.0, teacher_blur = 0.0;
    uint64_t seed = 42;
};

int cmd_simulate(const SimulateArgs &a) {
    auto e = parse_number_list(a.extent, 4, "--extent");
    rs::Box2 extent(rs::Point2(e[0], e[1]), rs::Point2(e[2], e[3]));
    auto classes = parse_name_list(a.classes);
    auto start = parse_number_list(a.track_start, 2, "--track-start");

    rs::SyntheticScene scene =
        rs::generate_scene(a.seed, extent, a.n_regions, classes);

    rs::LawnmowerTrack track;
    track.start = rs::Point2(start[0], start[1]);
    track.line_length_m = a.line_length;
    track.line_spacing_m = a.line_spacing;
    track.n_lines = a.n_lines;
    track.along_step_m = a.along_step;
    track.depth_m = a.depth;
    track.speed_mps = a.speed;

    rs::CameraModel cam{a.fov_h, a.fov_v};
    rs::SurveyNoise noise{a.pos_std, a.att_std, a.teacher_blur};
    std::vector<rs::ImageRecord> images =
        rs::simulate_survey(scene, track, cam, noise, a.seed + 1);

    path dir(a.out);
    rs::fs::create_directories(dir);
    rs::write_scene_json(dir / "scene.json", scene);
    rs::write_images_csv(dir / "images.csv", images);
    rs::write_predictions_csv(dir / "predictions.csv", images);

    // Flat mid-gray orthophoto over the extent.
    rs::Raster ortho;
    ortho.width = static_cast<int>(std::lround(extent.sizes().x() / a.gsd));
    ortho.height = static_cast<int>(std::lround(extent.sizes().y() / a.gsd));
    ortho.channels = 1;
    ortho.data.assign(static_cast<size_t>(ortho.width) * ortho.height, 128);
    rs::write_raster(dir / "ortho.pgm", ortho);

    rs::OrthophotoMeta meta;
    meta.width_px = ortho.width;
    meta.height_px = ortho.height;
    meta.gsd = a.gsd;
    meta.origin = rs::Point2(extent.min().x(), extent.max().y());
    meta.crs_id = "LOCAL";
    rs::write_world_file(dir / "ortho.pgw", rs::world_file_from_meta(meta));
    rs::write_crs_file(dir / "ortho.crs", meta.crs_id);

    rs::TileGrid grid = rs::compute_tile_grid(meta, a.tile_side);
    rs::write_oracle_csv(dir / "oracle.csv",
                         rs::oracle_tile_labels(scene, grid.tiles));

    // Ready-to-run pipeline config over the emitted fixture.
    nlohmann::ordered_json cfg = {
        {"orthophoto", (dir / "ortho.pgm").string()},
        {"world_file", (dir / "ortho.pgw").string()},
        {"crs_file", (dir / "ortho.crs").string()},
        {"images_csv", (dir / "images.csv").string()},
        {"predictions_csv", (dir / "predictions.csv").string()},
        {"output_dir", (dir / "out").string()},
        {"tile_side_m", a.tile_side},
        {"method", "distilled"},
        {"camera", {{"fov_h_deg", a.fov_h}, {"fov_v_deg", a.fov_v}}},
        {"catalog", {{"aerial_classes", classes}}},
    };
    rs::atomic_write_text(dir / "config.json", cfg.dump(2) + "\n");

    std::cout << "simulated " << images.size() << " images over "
              << scene.regions.size() << " regions into " << a.out << "\n";
    return 0;
}

struct RunArgs {
    std::string config, method, out;
    double tile_side = -1.0, coverage_threshold = -1.0, black_threshold = -1.0;
    double threshold = -1.0;
    bool no_coverage_filter = false;
    bool seed_given = false;
    uint64_t seed = 0;
};

int cmd_run(const RunArgs &a, const CLI::App *sub) {
    rs::PipelineConfig cfg = rs::PipelineConfig::from_json_file(a.config);
    if (!a.method.empty())
        cfg.method = rs::parse_aggregation_method(a.method);
    if (sub->count("--tile-side"))
        cfg.tile_side_m = a.tile_side;
    if (sub->count("--coverage-threshold"))
        cfg.coverage_threshold = a.coverage_threshold;
    if (sub->count("--black-threshold"))
        cfg.black_threshold = a.black_threshold;
    if (sub->count("--threshold"))
        cfg.binarize_threshold = a.threshold;
    if (sub->count("--seed"))
        cfg.seed = a.seed;
    if (!a.out.empty())
        cfg.output_dir = a.out;
    if (a.no_coverage_filter)
        cfg.require_coverage = false;

    rs::PipelineResult result = rs::run_pipeline(cfg);
    for (const auto &[key, value] : result.summary.rows())
        std::cout << key << ": " << rs::format_double(value) << "\n";
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"reefscale: footprint-weighted distillation of underwater "
                 "predictions onto orthophoto tiles"};
    app.require_subcommand(1);

    FootprintsArgs fa;
    CLI::App *footprints = app.add_subcommand(
        "footprints", "Project camera footprints from survey imagery");
    footprints->add_option("--config", fa.config, "Pipeline config JSON");
    footprints->add_option("--images", fa.images, "Survey images CSV");
    footprints->add_option("--frames", fa.frames, "Extracted frame index CSV");
    footprints->add_option("--track", fa.track, "GPS track CSV");
    footprints->add_option("--images-out", fa.images_out,
                           "Also write synchronized records as images CSV");
    footprints->add_option("--out", fa.out, "Output GeoJSON")->required();

    TileArgs ta;
    CLI::App *tile =
        app.add_subcommand("tile", "Partition an orthophoto into tiles");
    tile->add_option("--ortho", ta.ortho, "Orthophoto raster")->required();
    tile->add_option("--world", ta.world, "World file")->required();
    tile->add_option("--crs", ta.crs, "CRS sidecar")->required();
    tile->add_option("--tile-side", ta.tile_side, "Tile side in meters");
    tile->add_option("--out", ta.out, "Output tiles CSV")->required();

    AssociateArgs aa;
    CLI::App *associate = app.add_subcommand(
        "associate", "Assign images to the tiles holding their camera centers");
    associate->add_option("--config", aa.config, "Pipeline config JSON");
    associate->add_option("--images", aa.images, "Survey images CSV")->required();
    associate->add_option("--footprints", aa.footprints,
                          "Footprints GeoJSON (else projected from config camera)");
    associate->add_option("--ortho", aa.ortho, "Orthophoto raster")->required();
    associate->add_option("--world", aa.world, "World file")->required();
    associate->add_option("--crs", aa.crs, "CRS sidecar")->required();
    associate->add_option("--tile-side", aa.tile_side, "Tile side in meters");
    associate->add_option("--out", aa.out, "Output associations CSV")->required();

    AggregateArgs ga;
    CLI::App *aggregate = app.add_subcommand(
        "aggregate", "Aggregate per-image predictions into tile labels");
    aggregate->add_option("--config", ga.config, "Pipeline config JSON");
    aggregate->add_option("--associations", ga.associations, "Associations CSV")
        ->required();
    aggregate->add_option("--predictions", ga.predictions, "Predictions CSV")
        ->required();
    aggregate
        ->add_option("--method", ga.method, "hard | weighted | distilled")
        ->check(CLI::IsMember({"hard", "weighted", "distilled"}));
    aggregate->add_option("--threshold", ga.threshold,
                          "Binarization threshold for hard/weighted");
    aggregate->add_option("--out", ga.out, "Output labels CSV")->required();

    SplitArgs sa;
    CLI::App *split =
        app.add_subcommand("split", "Stratified train/val/test split");
    split->add_option("--samples", sa.samples, "Samples CSV")->required();
    split->add_option("--ratios", sa.ratios, "train,val,test ratios");
    split->add_option("--seed", sa.seed, "Random seed");
    split->add_option("--out", sa.out, "Output assignment CSV")->required();
    split->add_option("--report", sa.report, "Optional per-class report CSV");

    EvalArgs ea;
    CLI::App *eval =
        app.add_subcommand("eval", "Metrics between two label tables");
    eval->add_option("--labels", ea.labels, "Reference labels CSV")->required();
    eval->add_option("--preds", ea.preds, "Predicted labels CSV")->required();
    eval->add_option("--auc-threshold", ea.auc_threshold,
                     "Reference positivity threshold for AUC");
    eval->add_option("--out", ea.out, "Metrics report path (stdout if omitted)");

    MapArgs ma;
    CLI::App *map =
        app.add_subcommand("map", "Emit georeferenced prediction rasters");
    map->add_option("--labels", ma.labels, "Labels CSV")->required();
    map->add_option("--ortho", ma.ortho, "Orthophoto raster")->required();
    map->add_option("--world", ma.world, "World file")->required();
    map->add_option("--crs", ma.crs, "CRS sidecar")->required();
    map->add_option("--tile-side", ma.tile_side, "Tile side in meters");
    map->add_option("--class", ma.cls, "Emit only this class");
    map->add_option("--out", ma.out, "Output directory")->required();

    SimulateArgs za;
    CLI::App *simulate = app.add_subcommand(
        "simulate", "Generate a synthetic survey fixture with oracle labels");
    simulate->add_option("--seed", za.seed, "Random seed");
    simulate->add_option("--extent", za.extent, "minx,miny,maxx,maxy meters");
    simulate->add_option("--n-regions", za.n_regions, "Number of class regions");
    simulate->add_option("--classes", za.classes, "Comma-separated class names");
    simulate->add_option("--track-start", za.track_start, "First capture x,y");
    simulate->add_option("--line-length", za.line_length, "Survey line length");
    simulate->add_option("--line-spacing", za.line_spacing, "Line spacing");
    simulate->add_option("--n-lines", za.n_lines, "Number of survey lines");
    simulate->add_option("--along-step", za.along_step, "Capture spacing");
    simulate->add_option("--depth", za.depth, "Camera height above seabed");
    simulate->add_option("--speed", za.speed, "Survey speed m/s");
    simulate->add_option("--gsd", za.gsd, "Orthophoto ground sample distance");
    simulate->add_option("--tile-side", za.tile_side, "Tile side in meters");
    simulate->add_option("--fov-h", za.fov_h, "Horizontal FOV degrees");
    simulate->add_option("--fov-v", za.fov_v, "Vertical FOV degrees");
    simulate->add_option("--pos-std", za.pos_std, "Position noise std dev");
    simulate->add_option("--att-std", za.att_std, "Attitude noise std dev");
    simulate->add_option("--teacher-blur", za.teacher_blur,
                         "Teacher probability noise std dev");
    simulate->add_option("--out", za.out, "Output directory")->required();

    RunArgs ra;
    CLI::App *run = app.add_subcommand("run", "Run the full pipeline");
    run->add_option("--config", ra.config, "Pipeline config JSON")->required();
    run->add_option("--method", ra.method, "hard | weighted | distilled")
        ->check(CLI::IsMember({"hard", "weighted", "distilled"}));
    run->add_option("--tile-side", ra.tile_side, "Tile side in meters");
    run->add_option("--coverage-threshold", ra.coverage_threshold,
                    "Minimum footprint coverage");
    run->add_option("--black-threshold", ra.black_threshold,
                    "Maximum black-pixel fraction");
    run->add_option("--threshold", ra.threshold, "Binarization threshold");
    run->add_option("--seed", ra.seed, "Random seed");
    run->add_option("--out", ra.out, "Output directory override");
    run->add_flag("--no-coverage-filter", ra.no_coverage_filter,
                  "Keep tiles regardless of footprint coverage (inference mode)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return 2;
    }

    try {
        if (app.got_subcommand(footprints))
            return cmd_footprints(fa);
        if (app.got_subcommand(tile))
            return cmd_tile(ta);
        if (app.got_subcommand(associate))
            return cmd_associate(aa);
        if (app.got_subcommand(aggregate))
            return cmd_aggregate(ga);
        if (app.got_subcommand(split))
            return cmd_split(sa);
        if (app.got_subcommand(eval))
            return cmd_eval(ea);
        if (app.got_subcommand(map))
            return cmd_map(ma);
        if (app.got_subcommand(simulate))
            return cmd_simulate(za);
        if (app.got_subcommand(run))
            return cmd_run(ra, run);
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
