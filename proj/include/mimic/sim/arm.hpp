#pragma once

#include <array>
#include <stdexcept>

namespace mimic::sim {

class SimError : public std::runtime_error {
public:
    explicit SimError(const std::string& msg) : std::runtime_error(msg) {}
};

class UnreachableError : public SimError {
public:
    explicit UnreachableError(const std::string& msg) : SimError(msg) {}
};

struct Vec2 {
    double x = 0.0, y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
double norm(Vec2 a);

struct JointLimits {
    double lo, hi;
};

/// Planar 2-link arm with a wrist-tilt joint and a scalar gripper. All
/// kinematics are in the arm frame (base at the origin); the scene places
/// the base in world coordinates.
struct ArmConfig {
    double l1 = 0.5, l2 = 0.4;
    Vec2 base{0.5, 0.12};
    JointLimits shoulder{-0.3, 3.45};   // radians
    JointLimits elbow{0.0, 2.9};        // elbow-up branch only
    JointLimits wrist{0.0, 2.2};        // pour tilt
    JointLimits grip{0.0, 1.0};

    double min_reach() const { return l1 > l2 ? l1 - l2 : l2 - l1; }
    double max_reach() const { return l1 + l2; }
};

struct EndEffector {
    Vec2 pos;      // arm frame
    double tilt;   // pass-through wrist angle
};

/// Angles are clamped to the joint limits before evaluation.
EndEffector forward_kinematics(const ArmConfig& cfg, double theta1, double theta2,
                               double tilt = 0.0);

/// Elbow-up (theta2 >= 0) solution; FK(IK(p)) lands within 1e-6 of p.
/// Throws UnreachableError outside the reachable annulus.
std::array<double, 2> inverse_kinematics(const ArmConfig& cfg, Vec2 target);

}  // namespace mimic::sim
