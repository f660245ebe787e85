#include "a2asl/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "a2asl/errors.hpp"
#include "a2asl/linkbudget.hpp"

namespace a2asl {

double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

double norm(Vec3 v) { return std::sqrt(dot(v, v)); }

Trajectory::Trajectory(std::vector<Waypoint> waypoints) : waypoints_(std::move(waypoints)) {
    if (waypoints_.empty()) {
        throw ConfigError("trajectory needs at least one waypoint");
    }
    for (std::size_t i = 1; i < waypoints_.size(); ++i) {
        if (!(waypoints_[i].time_s > waypoints_[i - 1].time_s)) {
            throw ConfigError("trajectory waypoint times must be strictly increasing");
        }
    }
}

Vec3 Trajectory::position_at(double t) const {
    if (waypoints_.empty()) {
        throw ConfigError("position requested on an empty trajectory");
    }
    if (t <= waypoints_.front().time_s) {
        return waypoints_.front().position;
    }
    if (t >= waypoints_.back().time_s) {
        return waypoints_.back().position;
    }
    auto hi = std::upper_bound(waypoints_.begin(), waypoints_.end(), t,
                               [](double v, const Waypoint& w) { return v < w.time_s; });
    auto lo = std::prev(hi);
    const double frac = (t - lo->time_s) / (hi->time_s - lo->time_s);
    return lo->position + frac * (hi->position - lo->position);
}

Vec3 Trajectory::velocity_at(double t) const {
    if (waypoints_.empty()) {
        throw ConfigError("velocity requested on an empty trajectory");
    }
    if (t < waypoints_.front().time_s || t >= waypoints_.back().time_s) {
        return {};
    }
    auto hi = std::upper_bound(waypoints_.begin(), waypoints_.end(), t,
                               [](double v, const Waypoint& w) { return v < w.time_s; });
    auto lo = std::prev(hi);
    return (1.0 / (hi->time_s - lo->time_s)) * (hi->position - lo->position);
}

Trajectory Trajectory::shifted(Vec3 offset) const {
    std::vector<Waypoint> moved = waypoints_;
    for (auto& w : moved) {
        w.position = w.position + offset;
    }
    return Trajectory(std::move(moved));
}

Vec3 position_at(const NodeKinematics& node, double t) { return node.trajectory.position_at(t); }

double distance_m(const NodeKinematics& a, const NodeKinematics& b, double t) {
    return norm(position_at(a, t) - position_at(b, t));
}

double radial_speed_mps(const NodeKinematics& a, const NodeKinematics& b, double t) {
    const Vec3 los = position_at(b, t) - position_at(a, t);
    const double d = norm(los);
    if (d == 0.0) {
        return 0.0;
    }
    const Vec3 rel_v = b.trajectory.velocity_at(t) - a.trajectory.velocity_at(t);
    return dot(rel_v, los) / d;
}

double doppler_shift_hz(double speed_mps, double carrier_freq_hz) {
    return std::abs(speed_mps) / PhysConstants::c * carrier_freq_hz;
}

double max_speed_for_scs(double scs_hz, double tolerable_fraction, double carrier_freq_hz) {
    if (!(tolerable_fraction > 0.0 && tolerable_fraction <= 1.0)) {
        throw std::domain_error("tolerable Doppler fraction must lie in (0, 1]");
    }
    return tolerable_fraction * scs_hz * PhysConstants::c / carrier_freq_hz;
}

double max_distance_over(const NodeKinematics& a, const NodeKinematics& b, double t_begin,
                         double t_end) {
    std::vector<double> times{t_begin, t_end};
    for (const auto* node : {&a, &b}) {
        for (const auto& w : node->trajectory.waypoints()) {
            if (w.time_s > t_begin && w.time_s < t_end) {
                times.push_back(w.time_s);
            }
        }
    }
    double best = 0.0;
    for (double t : times) {
        best = std::max(best, distance_m(a, b, t));
    }
    return best;
}

}  // namespace a2asl
