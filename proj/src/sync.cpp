#include "reefscale/sync.hpp"

#include <algorithm>
#include <cmath>

#include "reefscale/errors.hpp"

namespace reefscale {

long validate_frame_rates(double fv, double fc) {
    if (!(fv > 0.0) || !(fc > 0.0))
        throw NonDivisorRate("frame rates must be positive");
    double ratio = fv / fc;
    double rounded = std::round(ratio);
    if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-6 * ratio)
        throw NonDivisorRate("cutting rate " + std::to_string(fc) +
                             " does not divide video rate " + std::to_string(fv));
    return static_cast<long>(rounded);
}

double frame_timestamp(const VideoTiming &timing, long frame_idx) {
    validate_frame_rates(timing.fv, timing.fc);
    double t = timing.anchor_utc +
               static_cast<double>(frame_idx - timing.anchor_frame) / timing.fc;
    if (timing.anchor_is_gps_time)
        t -= timing.leap_offset_s;
    return t;
}

void GpsTrack::validate() const {
    if (fixes.empty())
        throw EmptyInput("GPS track has no fixes");
    for (size_t i = 1; i < fixes.size(); ++i)
        if (!(fixes[i].timestamp > fixes[i - 1].timestamp))
            throw DataError("GPS track timestamps must strictly increase");
}

namespace {

double lerp_angle(double a_deg, double b_deg, double u) {
    return a_deg + u * std::remainder(b_deg - a_deg, 360.0);
}

double wrap_yaw(double deg) {
    double w = std::fmod(deg, 360.0);
    if (w < 0.0)
        w += 360.0;
    return w;
}

} // namespace

TrackFix interpolate_track(const GpsTrack &track, double t) {
    track.validate();
    if (track.fixes.size() < 2)
        throw DataError("track interpolation needs at least 2 fixes");
    if (t < track.start_time() || t > track.end_time())
        throw OutOfTrackRange("timestamp " + std::to_string(t) +
                              " outside track span");

    auto it = std::lower_bound(track.fixes.begin(), track.fixes.end(), t,
                               [](const TrackFix &f, double v) {
                                   return f.timestamp < v;
                               });
    if (it != track.fixes.end() && it->timestamp == t)
        return *it;
    const TrackFix &b = *it;
    const TrackFix &a = *(it - 1);
    double u = (t - a.timestamp) / (b.timestamp - a.timestamp);

    TrackFix out;
    out.timestamp = t;
    out.position = a.position + u * (b.position - a.position);
    out.depth_m = a.depth_m + u * (b.depth_m - a.depth_m);
    out.attitude.roll_deg = lerp_angle(a.attitude.roll_deg, b.attitude.roll_deg, u);
    out.attitude.pitch_deg =
        lerp_angle(a.attitude.pitch_deg, b.attitude.pitch_deg, u);
    out.attitude.yaw_deg =
        wrap_yaw(lerp_angle(a.attitude.yaw_deg, b.attitude.yaw_deg, u));
    return out;
}

} // namespace reefscale
