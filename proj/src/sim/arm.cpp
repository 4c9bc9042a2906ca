#include "mimic/sim/arm.hpp"

#include <algorithm>
#include <cmath>

namespace mimic::sim {

double norm(Vec2 a) { return std::sqrt(a.x * a.x + a.y * a.y); }

namespace {
double clamp(double v, JointLimits lim) { return std::min(lim.hi, std::max(lim.lo, v)); }
}  // namespace

EndEffector forward_kinematics(const ArmConfig& cfg, double theta1, double theta2,
                               double tilt) {
    theta1 = clamp(theta1, cfg.shoulder);
    theta2 = clamp(theta2, cfg.elbow);
    tilt = clamp(tilt, cfg.wrist);
    const double a = theta1, b = theta1 + theta2;
    Vec2 p{cfg.l1 * std::cos(a) + cfg.l2 * std::cos(b),
           cfg.l1 * std::sin(a) + cfg.l2 * std::sin(b)};
    return {p, tilt};
}

std::array<double, 2> inverse_kinematics(const ArmConfig& cfg, Vec2 target) {
    const double r2 = target.x * target.x + target.y * target.y;
    const double r = std::sqrt(r2);
    const double eps = 1e-9;
    if (r > cfg.max_reach() + eps || r < cfg.min_reach() - eps)
        throw UnreachableError("target at radius " + std::to_string(r) +
                               " outside reachable annulus [" +
                               std::to_string(cfg.min_reach()) + ", " +
                               std::to_string(cfg.max_reach()) + "]");
    double c2 = (r2 - cfg.l1 * cfg.l1 - cfg.l2 * cfg.l2) / (2.0 * cfg.l1 * cfg.l2);
    c2 = std::min(1.0, std::max(-1.0, c2));
    const double theta2 = std::acos(c2);  // elbow-up branch
    const double theta1 = std::atan2(target.y, target.x) -
                          std::atan2(cfg.l2 * std::sin(theta2), cfg.l1 + cfg.l2 * c2);
    if (theta1 < cfg.shoulder.lo - 1e-9 || theta1 > cfg.shoulder.hi + 1e-9)
        throw UnreachableError("target needs shoulder angle " + std::to_string(theta1) +
                               " outside limits");
    if (theta2 > cfg.elbow.hi + 1e-9)
        throw UnreachableError("target needs elbow angle " + std::to_string(theta2) +
                               " outside limits");
    return {theta1, theta2};
}

}  // namespace mimic::sim
