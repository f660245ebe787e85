#ifndef A2ASL_MOBILITY_HPP
#define A2ASL_MOBILITY_HPP

#include <cstdint>
#include <vector>

namespace a2asl {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend Vec3 operator*(double s, Vec3 v) { return {s * v.x, s * v.y, s * v.z}; }
    friend bool operator==(const Vec3&, const Vec3&) = default;
};

double dot(Vec3 a, Vec3 b);
double norm(Vec3 v);

struct Waypoint {
    double time_s = 0.0;
    Vec3 position;  // metres

    friend bool operator==(const Waypoint&, const Waypoint&) = default;
};

/// Piecewise-linear trajectory with constant extrapolation outside the
/// waypoint span.
class Trajectory {
public:
    Trajectory() = default;
    /// Throws ConfigError on an empty list or non-increasing times.
    explicit Trajectory(std::vector<Waypoint> waypoints);

    static Trajectory stationary(Vec3 p) { return Trajectory({{0.0, p}}); }

    Vec3 position_at(double t) const;
    /// Velocity of the segment containing t. Zero outside the span. At a
    /// waypoint the outgoing segment wins.
    Vec3 velocity_at(double t) const;

    const std::vector<Waypoint>& waypoints() const { return waypoints_; }
    bool empty() const { return waypoints_.empty(); }

    /// Copy of this trajectory translated by offset.
    Trajectory shifted(Vec3 offset) const;

private:
    std::vector<Waypoint> waypoints_;
};

using NodeId = std::uint32_t;

struct NodeKinematics {
    NodeId node_id = 0;
    Trajectory trajectory;
    double clock_offset_s = 0.0;
};

Vec3 position_at(const NodeKinematics& node, double t);

double distance_m(const NodeKinematics& a, const NodeKinematics& b, double t);

/// Rate of change of the a-b distance (positive when receding). Symmetric in
/// its arguments; zero for co-located nodes.
double radial_speed_mps(const NodeKinematics& a, const NodeKinematics& b, double t);

/// |v| / c * f0.
double doppler_shift_hz(double speed_mps, double carrier_freq_hz);

/// Largest speed whose Doppler shift stays within tolerable_fraction * scs.
double max_speed_for_scs(double scs_hz, double tolerable_fraction, double carrier_freq_hz);

/// Largest a-b distance over [t_begin, t_end]. Exact for piecewise-linear
/// paths: the distance is convex between joint breakpoints, so the maximum
/// sits on a breakpoint or an interval end.
double max_distance_over(const NodeKinematics& a, const NodeKinematics& b, double t_begin,
                         double t_end);

}  // namespace a2asl

#endif
