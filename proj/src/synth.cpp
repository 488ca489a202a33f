#include "reefscale/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "reefscale/errors.hpp"

namespace reefscale {

namespace synth_detail {

uint64_t Rng::next() {
    // splitmix64 stream: portable across platforms and standard libraries.
    state_ += 0x9e3779b97f4a7c15ull;
    uint64_t x = state_;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

double Rng::uniform() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = 0.0;
    while (u1 == 0.0)
        u1 = uniform();
    double u2 = uniform();
    double mag = std::sqrt(-2.0 * std::log(u1));
    spare_ = mag * std::sin(2.0 * M_PI * u2);
    have_spare_ = true;
    return mag * std::cos(2.0 * M_PI * u2);
}

namespace {

// Projection interval of a polygon onto an axis.
std::pair<double, double> project_onto(const Polygon &poly, const Point2 &axis) {
    double lo = poly[0].dot(axis), hi = lo;
    for (const Point2 &p : poly) {
        double v = p.dot(axis);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return {lo, hi};
}

bool separated_by_edges(const Polygon &a, const Polygon &b) {
    for (size_t i = 0; i < a.size(); ++i) {
        Point2 edge = a[(i + 1) % a.size()] - a[i];
        Point2 normal(-edge.y(), edge.x());
        auto [alo, ahi] = project_onto(a, normal);
        auto [blo, bhi] = project_onto(b, normal);
        if (ahi < blo || bhi < alo)
            return true;
    }
    return false;
}

} // namespace

bool convex_polygons_intersect(const Polygon &a, const Polygon &b) {
    if (a.empty() || b.empty())
        return false;
    return !separated_by_edges(a, b) && !separated_by_edges(b, a);
}

} // namespace synth_detail

SyntheticScene generate_scene(uint64_t seed, const Box2 &extent, int n_regions,
                              const std::vector<std::string> &class_list) {
    if (n_regions < 0)
        throw std::invalid_argument("n_regions must be nonnegative");
    if (n_regions > 0 && class_list.empty())
        throw EmptyInput("scene with regions needs at least one class");

    SyntheticScene scene;
    scene.extent = extent;
    scene.class_list = class_list;
    scene.seed = seed;

    synth_detail::Rng rng(seed);
    double span_x = extent.sizes().x();
    double span_y = extent.sizes().y();
    for (int i = 0; i < n_regions; ++i) {
        double cx = extent.min().x() + rng.uniform() * span_x;
        double cy = extent.min().y() + rng.uniform() * span_y;
        double hw = (0.05 + 0.20 * rng.uniform()) * span_x * 0.5;
        double hh = (0.05 + 0.20 * rng.uniform()) * span_y * 0.5;
        double x0 = std::max(cx - hw, extent.min().x());
        double x1 = std::min(cx + hw, extent.max().x());
        double y0 = std::max(cy - hh, extent.min().y());
        double y1 = std::min(cy + hh, extent.max().y());

        SceneRegion region;
        region.class_name = class_list[static_cast<size_t>(i) % class_list.size()];
        region.polygon = {Point2(x0, y0), Point2(x1, y0), Point2(x1, y1),
                          Point2(x0, y1)};
        scene.regions.push_back(std::move(region));
    }
    return scene;
}

std::vector<ImageRecord> simulate_survey(const SyntheticScene &scene,
                                         const LawnmowerTrack &track,
                                         const CameraModel &cam,
                                         const SurveyNoise &noise,
                                         uint64_t seed) {
    if (track.n_lines <= 0 || !(track.along_step_m > 0.0) ||
        !(track.line_length_m >= 0.0))
        throw std::invalid_argument("degenerate lawnmower track");
    if (!(track.speed_mps > 0.0))
        throw std::invalid_argument("track speed must be positive");

    synth_detail::Rng rng(seed);
    std::vector<ImageRecord> records;
    int steps_per_line =
        static_cast<int>(std::floor(track.line_length_m / track.along_step_m)) + 1;

    double travelled = 0.0;
    int idx = 0;
    for (int line = 0; line < track.n_lines; ++line) {
        double east = track.start.x() + line * track.line_spacing_m;
        bool northbound = (line % 2 == 0);
        for (int s = 0; s < steps_per_line; ++s) {
            double along = s * track.along_step_m;
            double north = northbound
                               ? track.start.y() + along
                               : track.start.y() + track.line_length_m - along;
            if (s > 0)
                travelled += track.along_step_m;

            ImageRecord rec;
            char buf[32];
            std::snprintf(buf, sizeof(buf), "img_%05d", idx++);
            rec.image_id = buf;
            rec.timestamp_utc = travelled / track.speed_mps;
            rec.camera_position =
                Point2(east + noise.pos_std_m * (noise.pos_std_m > 0 ? rng.normal() : 0.0),
                       north + noise.pos_std_m * (noise.pos_std_m > 0 ? rng.normal() : 0.0));
            rec.depth_m = track.depth_m;
            rec.attitude.roll_deg =
                noise.attitude_std_deg > 0 ? noise.attitude_std_deg * rng.normal() : 0.0;
            rec.attitude.pitch_deg =
                noise.attitude_std_deg > 0 ? noise.attitude_std_deg * rng.normal() : 0.0;
            double yaw = northbound ? 0.0 : 180.0;
            rec.attitude.yaw_deg =
                yaw + (noise.attitude_std_deg > 0 ? noise.attitude_std_deg * rng.normal()
                                                  : 0.0);

            Footprint fp = project_footprint(rec.camera_position, rec.depth_m,
                                             rec.attitude, cam, rec.image_id);
            Polygon fp_poly = fp.polygon();
            for (const std::string &cls : scene.class_list) {
                double p = 0.0;
                for (const SceneRegion &region : scene.regions) {
                    if (region.class_name != cls)
                        continue;
                    if (synth_detail::convex_polygons_intersect(region.polygon,
                                                                fp_poly)) {
                        p = 1.0;
                        break;
                    }
                }
                if (noise.teacher_blur_std > 0.0)
                    p = std::clamp(p + noise.teacher_blur_std * rng.normal(), 0.0,
                                   1.0);
                rec.teacher_probs[cls] = p;
            }
            records.push_back(std::move(rec));
        }
        travelled += track.line_spacing_m;
    }
    return records;
}

OracleLabels oracle_tile_labels(const SyntheticScene &scene,
                                const std::vector<Tile> &tiles) {
    OracleLabels oracle;
    oracle.classes = scene.class_list;
    for (const Tile &tile : tiles) {
        Polygon rect = {
            Point2(tile.bounds.min().x(), tile.bounds.min().y()),
            Point2(tile.bounds.max().x(), tile.bounds.min().y()),
            Point2(tile.bounds.max().x(), tile.bounds.max().y()),
            Point2(tile.bounds.min().x(), tile.bounds.max().y()),
        };
        std::vector<int> presence(scene.class_list.size(), 0);
        for (const SceneRegion &region : scene.regions) {
            if (!synth_detail::convex_polygons_intersect(region.polygon, rect))
                continue;
            for (size_t c = 0; c < scene.class_list.size(); ++c)
                if (scene.class_list[c] == region.class_name)
                    presence[c] = 1;
        }
        oracle.presence[tile.id] = std::move(presence);
    }
    return oracle;
}

} // namespace reefscale
