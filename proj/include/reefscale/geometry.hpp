#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include <array>
#include <map>
#include <string>
#include <vector>

#include "reefscale/errors.hpp"

namespace reefscale {

using Point2 = Eigen::Vector2d;        // (easting, northing) in projected meters
using Polygon = std::vector<Point2>;   // vertex list, implicitly closed
using Box2 = Eigen::AlignedBox2d;

/// Camera attitude in degrees. Pitch tilts the optical axis toward +north,
/// roll toward +east, yaw is a compass heading (clockwise from north).
struct Attitude {
    double roll_deg = 0.0;   // in (-90, 90)
    double pitch_deg = 0.0;  // in (-90, 90)
    double yaw_deg = 0.0;    // normalized to [0, 360)
};

struct CameraModel {
    double fov_h_deg = 90.0;  // horizontal field of view, (0, 180)
    double fov_v_deg = 60.0;  // vertical field of view, (0, 180)
};

/// Convex quadrilateral on the seabed covered by one image.
/// Corners are counter-clockwise; shoelace area is positive.
struct Footprint {
    std::array<Point2, 4> corners;
    std::string image_id;

    Polygon polygon() const { return Polygon(corners.begin(), corners.end()); }
};

/// One underwater image: navigation metadata plus teacher class probabilities.
struct ImageRecord {
    std::string image_id;
    Point2 camera_position = Point2::Zero();  // (easting, northing), meters
    double depth_m = 0.0;                     // camera-to-seabed distance, > 0
    Attitude attitude;
    double timestamp_utc = 0.0;               // UTC seconds
    std::map<std::string, double> teacher_probs;  // class -> probability in [0,1]
};

/// Rotation from camera frame (x=right, y=forward, z=down) to world frame
/// (x=east, y=north, z=down). Positive pitch tilts the optical axis toward
/// +north, positive roll toward +east, yaw is applied last as a compass
/// heading.
Eigen::Matrix3d attitude_rotation(const Attitude &att);

/// Intersects the four field-of-view corner rays with a flat seabed plane
/// `depth_m` below the camera. Throws NonPositiveDepth, RayAboveHorizon.
Footprint project_footprint(const Point2 &pos, double depth_m, const Attitude &att,
                            const CameraModel &cam, const std::string &image_id = "");

/// Signed shoelace area; positive for counter-clockwise vertex order.
/// Returns 0 for fewer than 3 vertices.
double signed_area(const Polygon &poly);

/// Shoelace area of a simple polygon. Throws DegeneratePolygon for fewer
/// than 3 vertices or zero area.
double polygon_area(const Polygon &poly);

/// Clips a convex polygon against an axis-aligned box (successive half-plane
/// clipping). Result is convex, counter-clockwise if the input is, possibly
/// empty.
Polygon clip_polygon_to_box(const Polygon &poly, const Box2 &box);

inline Polygon clip_footprint_to_tile(const Footprint &fp, const Box2 &tile_bounds) {
    return clip_polygon_to_box(fp.polygon(), tile_bounds);
}

/// area(fp ∩ tile) / area(fp), clamped to [0,1].
double overlap_ratio(const Footprint &fp, const Box2 &tile_bounds);

/// True if p lies inside or on the boundary of a convex counter-clockwise
/// polygon.
bool point_in_convex(const Polygon &poly, const Point2 &p);

/// Fraction of a grid_n x grid_n lattice of tile-interior cell centers covered
/// by at least one footprint. Deterministic; grid_n must be >= 8.
double coverage_fraction(const std::vector<Footprint> &fps, const Box2 &tile_bounds,
                         int grid_n = 64);

} // namespace reefscale
