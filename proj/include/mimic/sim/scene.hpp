#pragma once

#include <array>
#include <span>

#include "mimic/core/rng.hpp"
#include "mimic/sim/arm.hpp"

namespace mimic::sim {

enum class Task { pour, place };

const char* task_name(Task t);
Task task_from_name(const std::string& name);

struct Pose {
    Vec2 pos;
    double theta = 0.0;
};

/// Full simulator state. The held cup rides on the end effector; the target
/// object is a cup (pour) or a box (place). Object positions are clamped to
/// the unit workspace, joint angles to the arm limits.
struct Scene {
    ArmConfig arm;
    Task task = Task::pour;
    double theta1 = 0.0, theta2 = 0.0;
    double tilt = 0.0;
    double gripper = 0.0;
    Pose held;
    Pose target;
    bool target_visible = true;
    bool held_visible = true;

    static constexpr int kActionDim = 4;

    /// End effector in world coordinates.
    Vec2 end_effector() const;

    /// [theta1, theta2, tilt, gripper]
    std::array<double, 4> joint_state() const;

    /// Clamp to limits, write the joints, and re-attach the held cup.
    void apply_action(std::span<const double> action);
    void set_joints(double t1, double t2, double tl, double gr);
};

/// A fresh scene for one episode: home pose from a fixed home point, target
/// pose sampled uniformly in the workspace band, rejecting targets outside
/// the reachable annulus or too close to the start.
Scene sample_scene(Task task, core::Rng& rng, const ArmConfig& cfg = {});

/// Pre-target hover point the experts steer to.
Vec2 approach_point(const Scene& scene);

}  // namespace mimic::sim
