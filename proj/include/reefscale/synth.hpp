#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "reefscale/geometry.hpp"
#include "reefscale/tiling.hpp"

namespace reefscale {

struct SceneRegion {
    std::string class_name;
    Polygon polygon; // convex, CCW
};

/// A flat seabed populated with convex class regions.
struct SyntheticScene {
    Box2 extent;
    std::vector<std::string> class_list;
    std::vector<SceneRegion> regions;
    uint64_t seed = 0;
};

/// Seeded placement of axis-aligned rectangular class regions, classes
/// assigned round-robin. Reproducible for a given seed.
SyntheticScene generate_scene(uint64_t seed, const Box2 &extent, int n_regions,
                              const std::vector<std::string> &class_list);

/// Boustrophedon survey lines running south→north, stepping east.
struct LawnmowerTrack {
    Point2 start = Point2::Zero(); // first capture of the first line
    double line_length_m = 0.0;    // extent of each line (northing)
    double line_spacing_m = 0.0;   // easting between adjacent lines
    int n_lines = 0;
    double along_step_m = 0.0;     // distance between captures on a line
    double depth_m = 1.0;          // camera height above the seabed
    double speed_mps = 1.0;        // synthesizes capture timestamps
};

struct SurveyNoise {
    double pos_std_m = 0.0;
    double attitude_std_deg = 0.0;
    double teacher_blur_std = 0.0; // Gaussian smear of the perfect teacher
};

/// Walks the track, capturing one image per step. The perfect teacher emits
/// p_c = 1 iff a class-c region intersects the image footprint, else 0;
/// optional seeded Gaussian noise perturbs pose and teacher outputs.
std::vector<ImageRecord> simulate_survey(const SyntheticScene &scene,
                                         const LawnmowerTrack &track,
                                         const CameraModel &cam,
                                         const SurveyNoise &noise,
                                         uint64_t seed);

struct OracleLabels {
    std::vector<std::string> classes;
    std::map<std::string, std::vector<int>> presence; // tile_id → 0/1 per class
};

/// Binary ground truth: class present iff one of its regions intersects the
/// tile rectangle. Uses a separating-axis test local to this module so
/// agreement with the pipeline is evidence, not tautology.
OracleLabels oracle_tile_labels(const SyntheticScene &scene,
                                const std::vector<Tile> &tiles);

namespace synth_detail {
/// Separating-axis intersection for convex polygons (closed: touching counts).
bool convex_polygons_intersect(const Polygon &a, const Polygon &b);

/// Deterministic RNG stream used by the generators.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}
    double uniform();        // [0,1)
    double normal();         // standard Gaussian, Box–Muller
private:
    uint64_t next();
    uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};
} // namespace synth_detail

} // namespace reefscale
