#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>
#include <string>

#include <unistd.h>

#include "reefscale/pipeline.hpp"

using namespace reefscale;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("reefscale_pipe_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// 6 m x 6 m gray orthophoto at 0.05 m/px (120 px), 4x4 tiles of 1.5 m,
// with the top-left tile blacked out.
PipelineConfig tiny_fixture(const fs::path &dir) {
    Raster ortho(120, 120, 1, 128);
    for (int r = 0; r < 30; ++r)
        for (int c = 0; c < 30; ++c)
            ortho.at(r, c) = 0;
    write_raster(dir / "ortho.pgm", ortho);

    WorldFile wf;
    wf.x_scale = 0.05;
    wf.y_scale = -0.05;
    wf.x_center_ul = 0.025;      // corner at 0
    wf.y_center_ul = 6.0 - 0.025; // corner at 6
    write_world_file(dir / "ortho.pgw", wf);
    write_crs_file(dir / "ortho.crs", "EPSG:2975");

    // dense 0.25 m capture lattice over the south-west 3x3 m quadrant,
    // wide-footprint cameras -> full coverage of the visited tiles
    std::vector<ImageRecord> images;
    int idx = 0;
    for (double e = 0.125; e < 3.0; e += 0.25) {
        for (double n = 0.125; n < 3.0; n += 0.25) {
            ImageRecord img;
            img.image_id = "img_" + std::to_string(idx++);
            img.timestamp_utc = idx;
            img.camera_position = Point2(e, n);
            img.depth_m = 0.5;
            img.teacher_probs["Rock"] = 0.9;
            img.teacher_probs["Sand"] = e < 1.5 ? 0.8 : 0.0;
            img.teacher_probs["Algae_assembly"] = 0.6;
            images.push_back(img);
        }
    }
    write_images_csv(dir / "images.csv", images);
    write_predictions_csv(dir / "predictions.csv", images);

    PipelineConfig cfg;
    cfg.orthophoto = dir / "ortho.pgm";
    cfg.world_file = dir / "ortho.pgw";
    cfg.crs_file = dir / "ortho.crs";
    cfg.images_csv = dir / "images.csv";
    cfg.predictions_csv = dir / "predictions.csv";
    cfg.output_dir = dir / "out";
    cfg.tile_side_m = 1.5;
    cfg.camera = {90.0, 60.0};
    return cfg;
}

} // namespace

TEST_CASE("config validation") {
    PipelineConfig cfg;
    CHECK_NOTHROW(cfg.validate());

    PipelineConfig bad = cfg;
    bad.tile_side_m = 0.0;
    CHECK_THROWS_AS(bad.validate(), DataError);
    bad = cfg;
    bad.coverage_threshold = 1.5;
    CHECK_THROWS_AS(bad.validate(), DataError);
    bad = cfg;
    bad.binarize_threshold = 1.0;
    CHECK_THROWS_AS(bad.validate(), DataError);
    bad = cfg;
    bad.split_ratios = {0.5, 0.5, 0.5};
    CHECK_THROWS_AS(bad.validate(), DataError);
    bad = cfg;
    bad.camera.fov_h_deg = 180.0;
    CHECK_THROWS_AS(bad.validate(), DataError);
    bad = cfg;
    bad.min_class_count = -1;
    CHECK_THROWS_AS(bad.validate(), DataError);
}

TEST_CASE("config file parsing with overrides and defaults") {
    TempDir dir;
    fs::path f = dir.path / "config.json";
    atomic_write_text(f, R"({
  "orthophoto": "o.pgm",
  "world_file": "o.pgw",
  "crs_file": "o.crs",
  "images_csv": "i.csv",
  "predictions_csv": "p.csv",
  "output_dir": "out",
  "tile_side_m": 2.0,
  "method": "weighted",
  "min_class_count": 3,
  "split": {"ratios": [0.5, 0.3, 0.2], "seed": 9},
  "camera": {"fov_h_deg": 80.0},
  "timing": {"fv": 30.0, "fc": 3.0, "anchor_is_gps_time": true},
  "catalog": {"aerial_classes": ["A", "B"]}
})");
    PipelineConfig cfg = PipelineConfig::from_json_file(f);
    CHECK(cfg.orthophoto == fs::path("o.pgm"));
    CHECK(cfg.tile_side_m == 2.0);
    CHECK(cfg.method == AggregationMethod::Weighted);
    CHECK(cfg.min_class_count == 3);
    CHECK(cfg.split_ratios[1] == 0.3);
    CHECK(cfg.seed == 9);
    CHECK(cfg.camera.fov_h_deg == 80.0);
    CHECK(cfg.camera.fov_v_deg == 60.0); // untouched default
    CHECK(cfg.timing.fv == 30.0);
    CHECK(cfg.timing.anchor_is_gps_time);
    CHECK(cfg.catalog.aerial_classes == std::vector<std::string>{"A", "B"});
    CHECK(cfg.coverage_threshold == 0.95); // default preserved

    atomic_write_text(f, "{\"tile_side_m\": -1}");
    CHECK_THROWS_AS(PipelineConfig::from_json_file(f), DataError);
    atomic_write_text(f, "{nonsense");
    CHECK_THROWS_AS(PipelineConfig::from_json_file(f), DataError);
    CHECK_THROWS_AS(PipelineConfig::from_json_file(dir.path / "nope.json"),
                    DataError);
}

TEST_CASE("pipeline on a small survey: summary conservation and outputs") {
    TempDir dir;
    PipelineConfig cfg = tiny_fixture(dir.path);

    PipelineResult res = run_pipeline(cfg);
    const PipelineSummary &s = res.summary;

    CHECK(s.tiles_total == 16);
    CHECK(s.dropped_partial_edge == 0);
    CHECK(s.tiles_total == s.tiles_kept + s.dropped_black +
                               s.dropped_no_images + s.dropped_low_coverage +
                               s.dropped_partial_edge);
    CHECK(s.images_total == 144); // 12 x 12 lattice
    CHECK(s.dropped_black == 1);  // the blacked-out corner tile
    // images visit the 2x2 south-west quadrant; the black tile is elsewhere
    CHECK(s.tiles_kept == 4);
    CHECK(s.dropped_no_images == 11);
    CHECK(s.dropped_low_coverage == 0);

    // dropped black tile is the top-left one
    bool found = false;
    for (const auto &[tile_id, reason] : res.filter.dropped)
        if (tile_id == "r0000_c0000") {
            CHECK(reason == DropReason::Black);
            found = true;
        }
    CHECK(found);

    // teacher probs remapped onto the default 12-class catalog
    CHECK(res.labels.classes == ClassCatalog::reef_default().aerial_classes);
    const ClassVector &sw = res.labels.labels.at("r0003_c0000");
    ClassCatalog cat = ClassCatalog::reef_default();
    CHECK(sw[cat.index_of("Rock")] > 0.9); // many overlapping r*0.9 factors
    CHECK(sw[cat.index_of("Algae")] > 0.5);
    CHECK(sw[cat.index_of("Millepore")] == 0.0);
    // Sand soft label decays east of the 1.5 m line
    const ClassVector &east = res.labels.labels.at("r0003_c0001");
    CHECK(sw[cat.index_of("Sand")] > east[cat.index_of("Sand")]);

    // outputs landed
    CHECK(fs::exists(cfg.output_dir / "manifest.jsonl"));
    CHECK(fs::exists(cfg.output_dir / "labels.csv"));
    CHECK(fs::exists(cfg.output_dir / "summary.txt"));
    std::istringstream manifest(slurp(cfg.output_dir / "manifest.jsonl"));
    std::string line;
    size_t lines = 0;
    while (std::getline(manifest, line))
        if (!line.empty())
            ++lines;
    CHECK(lines == 4);
    std::string summary_text = slurp(cfg.output_dir / "summary.txt");
    CHECK(summary_text.find("tiles_total: 16") != std::string::npos);
    CHECK(summary_text.find("class_count.Rock: 4") != std::string::npos);
}

TEST_CASE("pipeline run is deterministic") {
    TempDir dir;
    PipelineConfig cfg = tiny_fixture(dir.path);
    run_pipeline(cfg);
    std::string manifest1 = slurp(cfg.output_dir / "manifest.jsonl");
    std::string labels1 = slurp(cfg.output_dir / "labels.csv");
    run_pipeline(cfg);
    CHECK(slurp(cfg.output_dir / "manifest.jsonl") == manifest1);
    CHECK(slurp(cfg.output_dir / "labels.csv") == labels1);
}

TEST_CASE("survey outside the grid drops every tile as no_images") {
    TempDir dir;
    PipelineConfig cfg = tiny_fixture(dir.path);

    // relocate all cameras far east of the orthophoto
    std::vector<ImageRecord> images = read_images_csv(cfg.images_csv);
    for (ImageRecord &img : images)
        img.camera_position += Point2(100.0, 0.0);
    write_images_csv(cfg.images_csv, images);

    PipelineResult res = run_pipeline(cfg);
    CHECK(res.summary.tiles_kept == 0);
    CHECK(res.summary.dropped_no_images == 15);
    CHECK(res.summary.dropped_black == 1);
    CHECK(res.labels.labels.empty());
    CHECK(slurp(cfg.output_dir / "manifest.jsonl").empty());
}

TEST_CASE("min_class_count prunes rare classes from the outputs") {
    TempDir dir;
    PipelineConfig cfg = tiny_fixture(dir.path);
    cfg.min_class_count = 3;
    PipelineResult res = run_pipeline(cfg);
    // Sand is strong only on the western kept tiles (2 of 4) -> pruned
    ClassCatalog cat = ClassCatalog::reef_default();
    bool has_sand = false, has_rock = false;
    for (const std::string &cls : res.labels.classes) {
        has_sand |= cls == "Sand";
        has_rock |= cls == "Rock";
    }
    CHECK(has_rock);
    CHECK_FALSE(has_sand);
    for (const auto &[cls, count] : res.summary.class_counts)
        CHECK(cls != "Sand");
}

TEST_CASE("stage failures carry stage context") {
    TempDir dir;
    PipelineConfig cfg = tiny_fixture(dir.path);
    cfg.orthophoto = dir.path / "missing.pgm";
    CHECK_THROWS_WITH_AS(run_pipeline(cfg), doctest::Contains("ingest:"),
                         DataError);

    cfg = tiny_fixture(dir.path);
    atomic_write_text(cfg.predictions_csv, "wrong,header\n");
    CHECK_THROWS_WITH_AS(run_pipeline(cfg),
                         doctest::Contains("ingest images:"), DataError);
}

TEST_CASE("prediction maps quantize labels with nodata holes") {
    TempDir dir;
    OrthophotoMeta meta;
    meta.width_px = 60;
    meta.height_px = 40;
    meta.gsd = 0.05;
    meta.origin = Point2(0.0, 2.0);
    meta.crs_id = "EPSG:2975";
    TileGrid grid = compute_tile_grid(meta, 1.0); // 2 rows x 3 cols

    SoftLabelSet labels;
    labels.method = AggregationMethod::Distilled;
    labels.classes = {"A", "B"};
    ClassVector v(2);
    v << 1.0, 0.0;
    labels.labels["r0000_c0000"] = v;
    v << 0.5, 0.25;
    labels.labels["r0001_c0002"] = v;
    // r0000_c0001, r0000_c0002, r0001_c0000, r0001_c0001 missing -> nodata

    emit_prediction_maps(labels, grid, dir.path / "maps");
    Raster map_a = read_raster(dir.path / "maps" / "map_A.pgm");
    CHECK(map_a.width == 3);
    CHECK(map_a.height == 2);
    CHECK(map_a.at(0, 0) == 254);             // p=1 -> full scale
    CHECK(map_a.at(1, 2) == 127);             // 0.5*254 rounded
    CHECK(map_a.at(0, 1) == kMapNodata);
    CHECK(map_a.at(1, 0) == kMapNodata);
    Raster map_b = read_raster(dir.path / "maps" / "map_B.pgm");
    CHECK(map_b.at(0, 0) == 0);
    CHECK(map_b.at(1, 2) == 64); // 0.25*254 = 63.5 -> 64

    // georeferencing sidecars: one cell per tile
    WorldFile wf = read_world_file(dir.path / "maps" / "map_A.pgw");
    CHECK(wf.x_scale == doctest::Approx(1.0));
    CHECK(wf.y_scale == doctest::Approx(-1.0));
    CHECK(wf.x_center_ul == doctest::Approx(0.5));
    CHECK(wf.y_center_ul == doctest::Approx(1.5));
    CHECK(read_crs_file(dir.path / "maps" / "map_A.crs") == "EPSG:2975");

    CHECK_THROWS_AS(
        emit_prediction_map(labels, grid, "missing", dir.path / "maps" / "x"),
        UnknownClass);
}
