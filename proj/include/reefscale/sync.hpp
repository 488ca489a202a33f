#pragma once

#include <string>
#include <vector>

#include "reefscale/geometry.hpp"

namespace reefscale {

/// Relates extracted frame indices to UTC time.
struct VideoTiming {
    double fv = 0.0;          // video frame rate, frames/s
    double fc = 0.0;          // cutting frame rate, frames/s
    long anchor_frame = 0;    // frame index of the time anchor
    double anchor_utc = 0.0;  // seconds
    double leap_offset_s = 18.0; // GPS − UTC
    bool anchor_is_gps_time = false;
};

/// Checks fc divides fv (within 1e-6 relative) and returns the integer ratio.
/// A non-divisor cutting rate would skip or duplicate frames.
long validate_frame_rates(double fv, double fc);

/// UTC timestamp of an extracted frame. The leap offset is subtracted only
/// when the anchor was read from a GPS-time source.
double frame_timestamp(const VideoTiming &timing, long frame_idx);

struct TrackFix {
    double timestamp = 0.0; // UTC seconds
    Point2 position = Point2::Zero();
    double depth_m = 0.0;
    Attitude attitude;
};

struct GpsTrack {
    std::vector<TrackFix> fixes; // time-ordered

    void validate() const;
    double start_time() const { return fixes.front().timestamp; }
    double end_time() const { return fixes.back().timestamp; }
};

/// Linear interpolation of position and depth; attitude angles follow the
/// shortest arc (yaw wraps at 360°). Throws OutOfTrackRange outside the track.
TrackFix interpolate_track(const GpsTrack &track, double t);

} // namespace reefscale
