#include "mimic/sim/scene.hpp"

#include <algorithm>
#include <cmath>

namespace mimic::sim {

const char* task_name(Task t) { return t == Task::pour ? "pour" : "place"; }

Task task_from_name(const std::string& name) {
    if (name == "pour") return Task::pour;
    if (name == "place") return Task::place;
    throw SimError("unknown task '" + name + "' (expected pour or place)");
}

namespace {

double clamp(double v, double lo, double hi) { return std::min(hi, std::max(lo, v)); }

constexpr Vec2 kHomePoint{0.24, 0.52};

}  // namespace

Vec2 Scene::end_effector() const {
    auto ee = forward_kinematics(arm, theta1, theta2, tilt);
    return arm.base + ee.pos;
}

std::array<double, 4> Scene::joint_state() const { return {theta1, theta2, tilt, gripper}; }

void Scene::set_joints(double t1, double t2, double tl, double gr) {
    theta1 = clamp(t1, arm.shoulder.lo, arm.shoulder.hi);
    theta2 = clamp(t2, arm.elbow.lo, arm.elbow.hi);
    tilt = clamp(tl, arm.wrist.lo, arm.wrist.hi);
    gripper = clamp(gr, arm.grip.lo, arm.grip.hi);
    Vec2 ee = end_effector();
    held.pos = {clamp(ee.x, 0.0, 1.0), clamp(ee.y, 0.0, 1.0)};
    held.theta = tilt;
}

void Scene::apply_action(std::span<const double> action) {
    if (action.size() != 4) throw SimError("action must have 4 components");
    set_joints(action[0], action[1], action[2], action[3]);
}

Scene sample_scene(Task task, core::Rng& rng, const ArmConfig& cfg) {
    Scene s;
    s.arm = cfg;
    s.task = task;
    auto home = inverse_kinematics(cfg, kHomePoint - cfg.base);
    s.set_joints(home[0], home[1], 0.0, 0.0);

    for (int attempt = 0; attempt < 1000; ++attempt) {
        Vec2 cand{rng.uniform(0.15, 0.88), rng.uniform(0.38, 0.80)};
        double r = norm(cand - cfg.base);
        if (r < cfg.min_reach() + 0.12 || r > cfg.max_reach() - 0.09) continue;
        if (norm(cand - s.end_effector()) < 0.18) continue;
        Scene probe = s;
        probe.target = {cand, 0.0};
        try {
            inverse_kinematics(cfg, approach_point(probe) - cfg.base);
        } catch (const UnreachableError&) {
            continue;
        }
        s.target = {cand, 0.0};
        return s;
    }
    throw SimError("could not sample a reachable target pose");
}

Vec2 approach_point(const Scene& scene) {
    return scene.target.pos + Vec2{0.0, 0.035};
}

}  // namespace mimic::sim
