#include "mimic/sim/expert.hpp"

#include <algorithm>
#include <cmath>

namespace mimic::sim {

std::vector<JointVector> expert_policy(const Scene& scene, int horizon) {
    if (horizon < 2) throw SimError("expert horizon must be at least 2");
    auto reach = inverse_kinematics(scene.arm, approach_point(scene) - scene.arm.base);
    const double s1 = scene.theta1, s2 = scene.theta2;
    const double pour_tilt = 2.0;

    std::vector<JointVector> seq(static_cast<std::size_t>(horizon));
    for (int t = 0; t < horizon; ++t) {
        double u = static_cast<double>(t) / (horizon - 1);
        JointVector j{};
        if (u <= 0.6) {
            double v = u / 0.6;
            j[0] = s1 + v * (reach[0] - s1);
            j[1] = s2 + v * (reach[1] - s2);
            j[2] = 0.0;
            j[3] = 0.0;
        } else {
            double v = (u - 0.6) / 0.4;
            j[0] = reach[0];
            j[1] = reach[1];
            j[2] = scene.task == Task::pour ? pour_tilt * v : 0.0;
            j[3] = scene.task == Task::place ? v : 0.0;
        }
        seq[static_cast<std::size_t>(t)] = j;
    }
    return seq;
}

std::vector<Scene> playback(Scene scene, const std::vector<JointVector>& joints) {
    std::vector<Scene> out;
    out.reserve(joints.size());
    for (const auto& j : joints) {
        scene.apply_action(j);
        out.push_back(scene);
    }
    return out;
}

SuccessReport success_check(const std::vector<Scene>& trajectory, Task task, double radius) {
    if (trajectory.empty()) throw SimError("success_check on empty trajectory");
    if (radius <= 0.0) throw SimError("success radius must be positive");
    SuccessReport rep;
    for (const auto& s : trajectory) {
        double d = norm(s.end_effector() - s.target.pos);
        if (d > radius) continue;
        rep.reached = true;
        if (task == Task::pour ? s.tilt >= 1.5 : s.gripper >= 0.9) rep.completed = true;
    }
    return rep;
}

}  // namespace mimic::sim
