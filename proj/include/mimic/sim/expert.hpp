#pragma once

#include <vector>

#include "mimic/sim/scene.hpp"

namespace mimic::sim {

using JointVector = std::array<double, 4>;

/// Scripted demonstration: 60% of the horizon interpolates joint space from
/// the start pose to the approach point; the remaining 40% holds position
/// while ramping the wrist tilt to 2.0 rad (pour) or the gripper to 1
/// (place). Every step respects joint limits. T=2 degenerates to
/// [start, end]. Throws UnreachableError if the approach point cannot be
/// reached.
std::vector<JointVector> expert_policy(const Scene& scene, int horizon);

struct SuccessReport {
    bool reached = false;
    bool completed = false;
};

/// reached: some step's end effector within `radius` of the target.
/// completed: reached and, while within the radius, tilt >= 1.5 (pour) or
/// gripper >= 0.9 (place). Default radius 0.05 world units.
SuccessReport success_check(const std::vector<Scene>& trajectory, Task task,
                            double radius = 0.05);

/// Replay a joint sequence through a scene, collecting the visited states.
std::vector<Scene> playback(Scene scene, const std::vector<JointVector>& joints);

}  // namespace mimic::sim
