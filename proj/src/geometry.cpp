#include "reefscale/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace reefscale {

namespace {

constexpr double kDegToRad = M_PI / 180.0;

} // namespace

Eigen::Matrix3d attitude_rotation(const Attitude &att) {
    const double cr = std::cos(att.roll_deg * kDegToRad);
    const double sr = std::sin(att.roll_deg * kDegToRad);
    const double cp = std::cos(att.pitch_deg * kDegToRad);
    const double sp = std::sin(att.pitch_deg * kDegToRad);
    const double cy = std::cos(att.yaw_deg * kDegToRad);
    const double sy = std::sin(att.yaw_deg * kDegToRad);

    // Roll: optical axis (0,0,1) -> (sin r, 0, cos r), east-ward tilt.
    Eigen::Matrix3d roll;
    roll << cr, 0.0, sr,
            0.0, 1.0, 0.0,
            -sr, 0.0, cr;

    // Pitch: optical axis -> (0, sin p, cos p), north-ward tilt.
    Eigen::Matrix3d pitch;
    pitch << 1.0, 0.0, 0.0,
             0.0, cp, sp,
             0.0, -sp, cp;

    // Yaw: compass heading, rotates north toward east in the horizontal plane.
    Eigen::Matrix3d yaw;
    yaw << cy, sy, 0.0,
           -sy, cy, 0.0,
           0.0, 0.0, 1.0;

    return yaw * pitch * roll;
}

Footprint project_footprint(const Point2 &pos, double depth_m, const Attitude &att,
                            const CameraModel &cam, const std::string &image_id) {
    if (!(depth_m > 0.0)) {
        throw NonPositiveDepth("project_footprint: depth must be > 0, got " +
                               std::to_string(depth_m));
    }

    const double th = std::tan(0.5 * cam.fov_h_deg * kDegToRad);
    const double tv = std::tan(0.5 * cam.fov_v_deg * kDegToRad);

    // Camera-frame corner ray directions, counter-clockwise once projected
    // with identity attitude (x=right spans fov_h, y=forward spans fov_v).
    const std::array<Eigen::Vector3d, 4> rays = {
        Eigen::Vector3d(th, -tv, 1.0),
        Eigen::Vector3d(th, tv, 1.0),
        Eigen::Vector3d(-th, tv, 1.0),
        Eigen::Vector3d(-th, -tv, 1.0),
    };

    const Eigen::Matrix3d rot = attitude_rotation(att);

    Footprint fp;
    fp.image_id = image_id;
    for (size_t i = 0; i < rays.size(); ++i) {
        const Eigen::Vector3d dir = rot * rays[i];
        if (!(dir.z() > 0.0)) {
            throw RayAboveHorizon("project_footprint: corner ray " + std::to_string(i) +
                                  " does not intersect the seabed plane");
        }
        const double t = depth_m / dir.z();
        fp.corners[i] = pos + t * dir.head<2>();
    }

    // Attitude may mirror the projected order; normalize to counter-clockwise.
    if (signed_area(fp.polygon()) < 0.0) {
        std::swap(fp.corners[0], fp.corners[3]);
        std::swap(fp.corners[1], fp.corners[2]);
    }
    return fp;
}

double signed_area(const Polygon &poly) {
    if (poly.size() < 3) {
        return 0.0;
    }
    double twice = 0.0;
    for (size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
        twice += poly[j].x() * poly[i].y() - poly[i].x() * poly[j].y();
    }
    return 0.5 * twice;
}

double polygon_area(const Polygon &poly) {
    if (poly.size() < 3) {
        throw DegeneratePolygon("polygon_area: need at least 3 vertices, got " +
                                std::to_string(poly.size()));
    }
    const double area = signed_area(poly);
    if (area == 0.0) {
        throw DegeneratePolygon("polygon_area: polygon has zero area");
    }
    return area;
}

namespace {

// Clip against one axis-aligned half-plane. `axis` selects the coordinate,
// `keep_ge` the side; intersection points get the boundary coordinate exactly,
// which makes repeated clipping idempotent.
Polygon clip_half_plane(const Polygon &poly, int axis, double bound, bool keep_ge) {
    Polygon out;
    const size_t n = poly.size();
    if (n == 0) {
        return out;
    }
    out.reserve(n + 1);
    auto inside = [&](const Point2 &p) {
        return keep_ge ? p[axis] >= bound : p[axis] <= bound;
    };
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        const Point2 &a = poly[j];
        const Point2 &b = poly[i];
        const bool ina = inside(a);
        const bool inb = inside(b);
        if (ina != inb) {
            const double t = (bound - a[axis]) / (b[axis] - a[axis]);
            Point2 p;
            p[axis] = bound;
            p[1 - axis] = a[1 - axis] + t * (b[1 - axis] - a[1 - axis]);
            out.push_back(p);
        }
        if (inb) {
            out.push_back(b);
        }
    }
    return out;
}

} // namespace

Polygon clip_polygon_to_box(const Polygon &poly, const Box2 &box) {
    Polygon p = clip_half_plane(poly, 0, box.min().x(), true);
    p = clip_half_plane(p, 0, box.max().x(), false);
    p = clip_half_plane(p, 1, box.min().y(), true);
    p = clip_half_plane(p, 1, box.max().y(), false);
    return p;
}

double overlap_ratio(const Footprint &fp, const Box2 &tile_bounds) {
    const double fp_area = polygon_area(fp.polygon());
    const Polygon clipped = clip_footprint_to_tile(fp, tile_bounds);
    const double clip_area = signed_area(clipped);
    return std::clamp(clip_area / fp_area, 0.0, 1.0);
}

bool point_in_convex(const Polygon &poly, const Point2 &p) {
    if (poly.size() < 3) {
        return false;
    }
    for (size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
        const Point2 edge = poly[i] - poly[j];
        const Point2 rel = p - poly[j];
        if (edge.x() * rel.y() - edge.y() * rel.x() < 0.0) {
            return false;
        }
    }
    return true;
}

double coverage_fraction(const std::vector<Footprint> &fps, const Box2 &tile_bounds,
                         int grid_n) {
    if (grid_n < 8) {
        throw std::invalid_argument("coverage_fraction: grid_n must be >= 8");
    }
    if (fps.empty()) {
        return 0.0;
    }
    std::vector<Polygon> polys;
    polys.reserve(fps.size());
    for (const Footprint &fp : fps) {
        polys.push_back(fp.polygon());
    }
    const Point2 size = tile_bounds.sizes();
    long covered = 0;
    for (int row = 0; row < grid_n; ++row) {
        for (int col = 0; col < grid_n; ++col) {
            const Point2 p = tile_bounds.min() +
                             Point2((col + 0.5) / grid_n * size.x(),
                                    (row + 0.5) / grid_n * size.y());
            for (const Polygon &poly : polys) {
                if (point_in_convex(poly, p)) {
                    ++covered;
                    break;
                }
            }
        }
    }
    return static_cast<double>(covered) / (static_cast<double>(grid_n) * grid_n);
}

} // namespace reefscale
