#include "reefscale/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "reefscale/errors.hpp"

namespace reefscale {

using ordered_json = nlohmann::ordered_json;

std::string format_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc())
        throw DataError("failed to format a number");
    return std::string(buf, end);
}

void atomic_write_text(const fs::path &path, const std::string &content) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw DataError("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out)
            throw DataError("failed to write " + tmp.string());
    }
    fs::rename(tmp, path);
}

namespace {

std::string load_text(const fs::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DataError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> split_line(const std::string &line, char delim = ',') {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == delim) {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

double parse_num(const std::string &s, const fs::path &path, size_t lineno) {
    try {
        size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size())
            throw std::invalid_argument(s);
        return v;
    } catch (const std::exception &) {
        throw DataError(path.string() + ":" + std::to_string(lineno) +
                        ": not a number: '" + s + "'");
    }
}

long parse_long(const std::string &s, const fs::path &path, size_t lineno) {
    try {
        size_t pos = 0;
        long v = std::stol(s, &pos);
        if (pos != s.size())
            throw std::invalid_argument(s);
        return v;
    } catch (const std::exception &) {
        throw DataError(path.string() + ":" + std::to_string(lineno) +
                        ": not an integer: '" + s + "'");
    }
}

// Lines of a CSV body after validating the exact header.
std::vector<std::string> csv_body(const fs::path &path, const std::string &header) {
    std::istringstream in(load_text(path));
    std::string line;
    if (!std::getline(in, line))
        throw DataError(path.string() + ": empty file");
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    if (line != header)
        throw DataError(path.string() + ": expected header '" + header +
                        "', got '" + line + "'");
    std::vector<std::string> rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (!line.empty())
            rows.push_back(line);
    }
    return rows;
}

constexpr const char *kImagesHeader =
    "image_id,timestamp_utc,easting,northing,depth_m,roll_deg,pitch_deg,yaw_deg";
constexpr const char *kPredictionsHeader = "image_id,class,prob";
constexpr const char *kTrackHeader =
    "timestamp_utc,easting,northing,depth_m,roll_deg,pitch_deg,yaw_deg";
constexpr const char *kFramesHeader = "frame_idx";
constexpr const char *kTilesHeader =
    "tile_id,row,col,col0,row0,width,height,min_e,min_n,max_e,max_n";
constexpr const char *kAssociationsHeader = "tile_id,image_id,overlap_ratio";
constexpr const char *kLabelsHeader = "tile_id,class,value";
constexpr const char *kSamplesHeader = "sample_id,group_key,labels";
constexpr const char *kAssignmentHeader = "sample_id,subset";
constexpr const char *kSplitReportHeader =
    "class,train_freq,val_freq,test_freq,total";

} // namespace

void write_images_csv(const fs::path &path, const std::vector<ImageRecord> &images) {
    std::string out(kImagesHeader);
    out += '\n';
    for (const ImageRecord &img : images) {
        out += img.image_id;
        out += ',' + format_double(img.timestamp_utc);
        out += ',' + format_double(img.camera_position.x());
        out += ',' + format_double(img.camera_position.y());
        out += ',' + format_double(img.depth_m);
        out += ',' + format_double(img.attitude.roll_deg);
        out += ',' + format_double(img.attitude.pitch_deg);
        out += ',' + format_double(img.attitude.yaw_deg);
        out += '\n';
    }
    atomic_write_text(path, out);
}

std::vector<ImageRecord> read_images_csv(const fs::path &path) {
    std::vector<ImageRecord> images;
    size_t lineno = 1;
    for (const std::string &row : csv_body(path, kImagesHeader)) {
        ++lineno;
        auto f = split_line(row);
        if (f.size() != 8)
            throw DataError(path.string() + ":" + std::to_string(lineno) +
                            ": expected 8 fields");
        ImageRecord img;
        img.image_id = f[0];
        img.timestamp_utc = parse_num(f[1], path, lineno);
        img.camera_position = Point2(parse_num(f[2], path, lineno),
                                     parse_num(f[3], path, lineno));
        img.depth_m = parse_num(f[4], path, lineno);
        img.attitude.roll_deg = parse_num(f[5], path, lineno);
        img.attitude.pitch_deg = parse_num(f[6], path, lineno);
        img.attitude.yaw_deg = parse_num(f[7], path, lineno);
        images.push_back(std::move(img));
    }
    return images;
}

void write_predictions_csv(const fs::path &path,
                           const std::vector<ImageRecord> &images) {
    std::string out(kPredictionsHeader);
    out += '\n';
    for (const ImageRecord &img : images)
        for (const auto &[cls, prob] : img.teacher_probs)
            out += img.image_id + ',' + cls + ',' + format_double(prob) + '\n';
    atomic_write_text(path, out);
}

std::map<std::string, std::map<std::string, double>>
read_predictions_csv(const fs::path &path) {
    std::map<std::string, std::map<std::string, double>> preds;
    size_t lineno = 1;
    for (const std::string &row : csv_body(path, kPredictionsHeader)) {
        ++lineno;
        auto f = split_line(row);
        if (f.size() != 3)
            throw DataError(path.string() + ":" + std::to_string(lineno) +
                            ": expected 3 fields");
        preds[f[0]][f[1]] = parse_num(f[2], path, lineno);
    }
    return preds;
}

void write_footprints_geojson(const fs::path &path,
                              const std::vector<Footprint> &footprints) {
    ordered_json features = ordered_json::array();
    for (const Footprint &fp : footprints) {
        ordered_json ring = ordered_json::array();
        for (const Point2 &p : fp.corners)
            ring.push_back({p.x(), p.y()});
        ring.push_back({fp.corners[0].x(), fp.corners[0].y()});
        ordered_json feature = {
            {"type", "Feature"},
            {"properties", {{"image_id", fp.image_id}}},
            {"geometry",
             {{"type", "Polygon"}, {"coordinates", ordered_json::array({ring})}}},
        };
        features.push_back(std::move(feature));
    }
    ordered_json doc = {{"type", "FeatureCollection"}, {"features", features}};
    atomic_write_text(path, doc.dump(2) + "\n");
}

std::vector<Footprint> read_footprints_geojson(const fs::path &path) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(load_text(path));
    } catch (const nlohmann::json::exception &e) {
        throw DataError(path.string() + ": invalid JSON: " + e.what());
    }
    if (doc.value("type", "") != "FeatureCollection" || !doc.contains("features"))
        throw DataError(path.string() + ": not a GeoJSON FeatureCollection");

    std::vector<Footprint> footprints;
    for (const auto &feature : doc["features"]) {
        const auto &geom = feature.at("geometry");
        if (geom.value("type", "") != "Polygon")
            throw DataError(path.string() + ": footprint geometry must be Polygon");
        const auto &ring = geom.at("coordinates").at(0);
        if (ring.size() != 5)
            throw DataError(path.string() +
                            ": footprint ring must close with 5 points");
        Footprint fp;
        fp.image_id = feature.at("properties").at("image_id").get<std::string>();
        for (int i = 0; i < 4; ++i)
            fp.corners[static_cast<size_t>(i)] =
                Point2(ring.at(i).at(0).get<double>(),
                       ring.at(i).at(1).get<double>());
        footprints.push_back(std::move(fp));
    }
    return footprints;
}

void write_track_csv(const fs::path &path, const GpsTrack &track) {
    std::string out(kTrackHeader);
    out += '\n';
    for (const TrackFix &fix : track.fixes) {
        out += format_double(fix.timestamp);
        out += ',' + format_double(fix.position.x());
        out += ',' + format_double(fix.position.y());
        out += ',' + format_double(fix.depth_m);
        out += ',' + format_double(fix.attitude.roll_deg);
        out += ',' + format_double(fix.attitude.pitch_deg);
        out += ',' + format_double(fix.attitude.yaw_deg);
        out += '\n';
    }
    atomic_write_text(path, out);
}

GpsTrack read_track_csv(const fs::path &path) {
    GpsTrack track;
    size_t lineno = 1;
    for (const std::string &row : csv_body(path, kTrackHeader)) {
        ++lineno;
        auto f = split_line(row);
        if (f.size() != 7)
            throw DataError(path.string() + ":" + std::to_string(lineno) +
                            ": expected 7 fields");
        TrackFix fix;
        fix.timestamp = parse_num(f[0], path, lineno);
        fix.position = Point2(parse_num(f[1], path, lineno),
                              parse_num(f[2], path, lineno));
        fix.depth_m = parse_num(f[3], path, lineno);
        fix.attitude.roll_deg = parse_num(f[4], path, lineno);
        fix.attitude.pitch_deg = parse_num(f[5], path, lineno);
        fix.attitude.yaw_deg = parse_num(f[6], path, lineno);
        track.fixes.push_back(fix);
    }
    track.validate();
    return track;
}

std::vector<long> read_frames_csv(const fs::path &path) {
    std::vector<long> frames;
    size_t lineno = 1;
    for (const std::string &row : csv_body(path, kFramesHeader)) {
        ++lineno;
        frames.push_back(parse_long(row, path, lineno));
    }
    return frames;
}

void write_tiles_csv(const fs::path &path, const TileGrid &grid) {
    std::string out(kTilesHeader);
    out += '\n';
    for (const Tile &t : grid.tiles) {
        out += t.id;
        out += ',' + std::to_string(t.row) + ',' + std::to_string(t.col);
        out += ',' + std::to_string(t.window.col0) + ',' +
               std::to_string(t.window.row0);
        out += ',' + std::to_string(t.window.width) + ',' +
               std::to_string(t.window.height);
        out += ',' + format_double(t.bounds.min().x());
        out += ',' + format_double(t.bounds.min().y());
        out += ',' + format_double(t.bounds.max().x());
        out += ',' + format_double(t.bounds.max().y());
        out += '\n';
    }
    atomic_write_text(path, out);
}

void write_associations_csv(const fs::path &path, const AssociationMap &assoc) {
    std::string out(kAssociationsHeader);
    out += '\n';
    for (const auto &[tile_id, ta] : assoc)
        for (size_t i = 0; i < ta.image_ids.size(); ++i)
            out += tile_id + ',' + ta.image_ids[i] + ',' +
                   format_double(ta.overlap_ratios[i]) + '\n';
    atomic_write_text(path, out);
}

AssociationMap read_associations_csv(const fs::path &path) {
    AssociationMap assoc;
    size_t lineno = 1;
    for (const std::string &row : csv_body(path, kAssociationsHeader)) {
        ++lineno;
        auto f = split_line(row);
        if (f.size() != 3)
            throw DataError(path.string() + ":" + std::to_string(lineno) +
                            ": expected 3 fields");
        TileAssociation &ta = assoc[f[0]];
        ta.image_ids.push_back(f[1]);
        ta.overlap_ratios.push_back(parse_num(f[2], path, lineno));
    }
    return assoc;
}

void write_labels_csv(const fs::path &path, const SoftLabelSet &labels) {
    std::string out(kLabelsHeader);
    out += '\n';
    for (const auto &[tile_id, values] : labels.labels)
        for (size_t c = 0; c < labels.classes.size(); ++c)
            out += tile_id + ',' + labels.classes[c] + ',' +
                   format_double(values[static_cast<Eigen::Index>(c)]) + '\n';
    atomic_write_text(path, out);
}

std::map<PairKey, double> read_labels_csv(const fs::path &path) {
    std::map<PairKey, double> values;
    size_t lineno = 1;
    for (const std::string &row : csv_body(path, kLabelsHeader)) {
        ++lineno;
        auto f = split_line(row);
        if (f.size() != 3)
            throw DataError(path.string() + ":" + std::to_string(lineno) +
                            ": expected 3 fields");
        PairKey key{f[0], f[1]};
        if (!values.emplace(key, parse_num(f[2], path, lineno)).second)
            throw DataError(path.string() + ":" + std::to_string(lineno) +
                            ": duplicate key " + f[0] + "/" + f[1]);
    }
    return values;
}

PairedScores pair_scores(const std::map<PairKey, double> &reference,
                         const std::map<PairKey, double> &predicted) {
    for (const auto &[key, v] : reference)
        if (!predicted.count(key))
            throw DataError("prediction missing for tile " + key.tile_id +
                            " class " + key.class_name);
    for (const auto &[key, v] : predicted)
        if (!reference.count(key))
            throw DataError("reference missing for tile " + key.tile_id +
                            " class " + key.class_name);

    PairedScores pairs;
    pairs.keys.reserve(reference.size());
    pairs.reference.resize(static_cast<Eigen::Index>(reference.size()));
    pairs.predicted.resize(static_cast<Eigen::Index>(reference.size()));
    Eigen::Index i = 0;
    for (const auto &[key, v] : reference) {
        pairs.keys.push_back(key);
        pairs.reference[i] = v;
        pairs.predicted[i] = predicted.at(key);
        ++i;
    }
    pairs.validate();
    return pairs;
}

void write_metrics_report(
    const fs::path &path,
    const std::vector<std::pair<std::string, double>> &metrics) {
    std::string out;
    for (const auto &[key, value] : metrics)
        out += key + ": " + format_double(value) + '\n';
    atomic_write_text(path, out);
}

void write_samples_csv(const fs::path &path,
                       const std::vector<SampleLabels> &samples) {
    std::string out(kSamplesHeader);
    out += '\n';
    for (const SampleLabels &s : samples) {
        std::string joined;
        for (const std::string &lab : s.label_set) {
            if (!joined.empty())
                joined += ';';
            joined += lab;
        }
        out += s.sample_id + ',' + s.group_key + ',' + joined + '\n';
    }
    atomic_write_text(path, out);
}

std::vector<SampleLabels> read_samples_csv(const fs::path &path) {
    std::vector<SampleLabels> samples;
    size_t lineno = 1;
    for (const std::string &row : csv_body(path, kSamplesHeader)) {
        ++lineno;
        auto f = split_line(row);
        if (f.size() != 3)
            throw DataError(path.string() + ":" + std::to_string(lineno) +
                            ": expected 3 fields");
        SampleLabels s;
        s.sample_id = f[0];
        s.group_key = f[1];
        if (!f[2].empty())
            for (const std::string &lab : split_line(f[2], ';'))
                if (!lab.empty())
                    s.label_set.insert(lab);
        samples.push_back(std::move(s));
    }
    return samples;
}

void write_assignment_csv(const fs::path &path,
                          const std::vector<SampleLabels> &samples,
                          const SplitAssignment &assignment) {
    if (assignment.subsets.size() != samples.size())
        throw DataError("assignment does not cover the sample list");
    std::string out(kAssignmentHeader);
    out += '\n';
    for (size_t i = 0; i < samples.size(); ++i)
        out += samples[i].sample_id + ',' + subset_name(assignment.subsets[i]) +
               '\n';
    atomic_write_text(path, out);
}

void write_split_report_csv(const fs::path &path,
                            const std::vector<ClassSplitRow> &rows) {
    std::string out(kSplitReportHeader);
    out += '\n';
    for (const ClassSplitRow &r : rows)
        out += r.class_name + ',' + format_double(r.train_freq) + ',' +
               format_double(r.val_freq) + ',' + format_double(r.test_freq) +
               ',' + std::to_string(r.total) + '\n';
    atomic_write_text(path, out);
}

void write_scene_json(const fs::path &path, const SyntheticScene &scene) {
    ordered_json regions = ordered_json::array();
    for (const SceneRegion &r : scene.regions) {
        ordered_json poly = ordered_json::array();
        for (const Point2 &p : r.polygon)
            poly.push_back({p.x(), p.y()});
        regions.push_back({{"class", r.class_name}, {"polygon", poly}});
    }
    ordered_json doc = {
        {"seed", scene.seed},
        {"extent",
         {scene.extent.min().x(), scene.extent.min().y(), scene.extent.max().x(),
          scene.extent.max().y()}},
        {"classes", scene.class_list},
        {"regions", regions},
    };
    atomic_write_text(path, doc.dump(2) + "\n");
}

SyntheticScene read_scene_json(const fs::path &path) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(load_text(path));
    } catch (const nlohmann::json::exception &e) {
        throw DataError(path.string() + ": invalid JSON: " + e.what());
    }
    SyntheticScene scene;
    try {
        scene.seed = doc.at("seed").get<uint64_t>();
        const auto &e = doc.at("extent");
        scene.extent = Box2(Point2(e.at(0).get<double>(), e.at(1).get<double>()),
                            Point2(e.at(2).get<double>(), e.at(3).get<double>()));
        scene.class_list = doc.at("classes").get<std::vector<std::string>>();
        for (const auto &r : doc.at("regions")) {
            SceneRegion region;
            region.class_name = r.at("class").get<std::string>();
            for (const auto &p : r.at("polygon"))
                region.polygon.emplace_back(p.at(0).get<double>(),
                                            p.at(1).get<double>());
            scene.regions.push_back(std::move(region));
        }
    } catch (const nlohmann::json::exception &e) {
        throw DataError(path.string() + ": malformed scene: " + e.what());
    }
    return scene;
}

void write_oracle_csv(const fs::path &path, const OracleLabels &oracle) {
    std::string out(kLabelsHeader);
    out += '\n';
    for (const auto &[tile_id, presence] : oracle.presence)
        for (size_t c = 0; c < oracle.classes.size(); ++c)
            out += tile_id + ',' + oracle.classes[c] + ',' +
                   std::to_string(presence[c]) + '\n';
    atomic_write_text(path, out);
}

void write_manifest_jsonl(const fs::path &path, const TileGrid &grid,
                          const SoftLabelSet &labels,
                          const AssociationMap &assoc) {
    std::map<std::string, const Tile *> by_id;
    for (const Tile &t : grid.tiles)
        by_id[t.id] = &t;

    std::string out;
    for (const auto &[tile_id, values] : labels.labels) {
        auto it = by_id.find(tile_id);
        if (it == by_id.end())
            throw DataError("manifest tile " + tile_id + " not in grid");
        const Tile &t = *it->second;

        ordered_json rec;
        rec["tile_id"] = tile_id;
        rec["bounds"] = {t.bounds.min().x(), t.bounds.min().y(),
                         t.bounds.max().x(), t.bounds.max().y()};
        rec["window"] = {{"col0", t.window.col0},
                         {"row0", t.window.row0},
                         {"width", t.window.width},
                         {"height", t.window.height}};
        ordered_json lab = ordered_json::object();
        for (size_t c = 0; c < labels.classes.size(); ++c)
            lab[labels.classes[c]] = values[static_cast<Eigen::Index>(c)];
        rec["labels"] = lab;

        ordered_json images = ordered_json::array();
        auto ait = assoc.find(tile_id);
        if (ait != assoc.end())
            for (size_t i = 0; i < ait->second.image_ids.size(); ++i)
                images.push_back({{"image_id", ait->second.image_ids[i]},
                                  {"overlap_ratio", ait->second.overlap_ratios[i]}});
        rec["images"] = images;
        out += rec.dump() + '\n';
    }
    atomic_write_text(path, out);
}

} // namespace reefscale
