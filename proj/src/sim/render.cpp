#include "mimic/sim/render.hpp"

#include <algorithm>
#include <cmath>

namespace mimic::sim {

const char* view_name(View v) { return v == View::agent ? "agent" : "demonstrator"; }

namespace {

struct Rgb {
    float r, g, b;
};

struct Palette {
    Rgb bg, link1, link2, held_cup, target_cup, box, jaw;
};

constexpr Palette kAgentPalette = {
    {0.93f, 0.93f, 0.96f},  // bg
    {0.20f, 0.35f, 0.85f},  // link1
    {0.25f, 0.55f, 0.90f},  // link2
    {0.95f, 0.55f, 0.15f},  // held cup
    {0.15f, 0.70f, 0.30f},  // target cup
    {0.55f, 0.35f, 0.15f},  // box
    {0.10f, 0.10f, 0.12f},  // jaws
};

constexpr Palette kDemoPalette = {
    {0.90f, 0.88f, 0.86f},
    {0.80f, 0.20f, 0.25f},
    {0.90f, 0.40f, 0.30f},
    {0.88f, 0.48f, 0.22f},
    {0.20f, 0.62f, 0.38f},
    {0.48f, 0.30f, 0.18f},
    {0.16f, 0.10f, 0.10f},
};

struct Canvas {
    RenderedFrame& f;
    double px_per_world;

    void blend(int r, int c, Rgb col, double cov) {
        if (cov <= 0.0 || r < 0 || r >= f.h || c < 0 || c >= f.w) return;
        float a = static_cast<float>(std::min(1.0, cov));
        f.at(r, c, 0) += a * (col.r - f.at(r, c, 0));
        f.at(r, c, 1) += a * (col.g - f.at(r, c, 1));
        f.at(r, c, 2) += a * (col.b - f.at(r, c, 2));
    }

    Vec2 pixel_center(int r, int c) const {
        return {(c + 0.5) / f.w, 1.0 - (r + 0.5) / f.h};
    }

    // Anti-aliased capsule between two world points; half-width in pixels.
    void stroke(Vec2 a, Vec2 b, double hw_px, Rgb col) {
        double hw = hw_px / px_per_world;
        double margin = hw + 1.5 / px_per_world;
        int c0 = static_cast<int>(std::floor((std::min(a.x, b.x) - margin) * f.w));
        int c1 = static_cast<int>(std::ceil((std::max(a.x, b.x) + margin) * f.w));
        int r0 = static_cast<int>(std::floor((1.0 - std::max(a.y, b.y) - margin) * f.h));
        int r1 = static_cast<int>(std::ceil((1.0 - std::min(a.y, b.y) + margin) * f.h));
        Vec2 ab = b - a;
        double len2 = ab.x * ab.x + ab.y * ab.y;
        for (int r = std::max(0, r0); r <= std::min(f.h - 1, r1); ++r)
            for (int c = std::max(0, c0); c <= std::min(f.w - 1, c1); ++c) {
                Vec2 p = pixel_center(r, c);
                double t = len2 > 0 ? ((p.x - a.x) * ab.x + (p.y - a.y) * ab.y) / len2 : 0.0;
                t = std::min(1.0, std::max(0.0, t));
                Vec2 q = a + t * ab;
                double d_px = norm(p - q) * px_per_world;
                blend(r, c, col, hw_px + 0.5 - d_px);
            }
    }

    // Filled axis-aligned rectangle with 1px soft edge.
    void fill_rect(Vec2 center, double hx, double hy, Rgb col) {
        double margin = 1.5 / px_per_world;
        int c0 = static_cast<int>(std::floor((center.x - hx - margin) * f.w));
        int c1 = static_cast<int>(std::ceil((center.x + hx + margin) * f.w));
        int r0 = static_cast<int>(std::floor((1.0 - center.y - hy - margin) * f.h));
        int r1 = static_cast<int>(std::ceil((1.0 - center.y + hy + margin) * f.h));
        for (int r = std::max(0, r0); r <= std::min(f.h - 1, r1); ++r)
            for (int c = std::max(0, c0); c <= std::min(f.w - 1, c1); ++c) {
                Vec2 p = pixel_center(r, c);
                double dx = std::abs(p.x - center.x) - hx;
                double dy = std::abs(p.y - center.y) - hy;
                double d = std::max(dx, dy) * px_per_world;  // negative inside
                blend(r, c, col, 0.5 - d);
            }
    }
};

Vec2 rotate(Vec2 v, double theta) {
    double ct = std::cos(theta), st = std::sin(theta);
    return {ct * v.x - st * v.y, st * v.x + ct * v.y};
}

// U-profile cup: two walls and a bottom, rotated about the cup center.
void draw_cup(Canvas& cv, Vec2 center, double theta, Rgb col) {
    const double w = 0.076, h = 0.085, hw_px = 1.3;
    Vec2 bl = center + rotate({-w / 2, -h / 2}, theta);
    Vec2 br = center + rotate({w / 2, -h / 2}, theta);
    Vec2 tl = center + rotate({-w / 2, h / 2}, theta);
    Vec2 tr = center + rotate({w / 2, h / 2}, theta);
    cv.stroke(bl, br, hw_px, col);
    cv.stroke(bl, tl, hw_px, col);
    cv.stroke(br, tr, hw_px, col);
}

}  // namespace

RenderedFrame render(const Scene& scene, View view, int size) {
    RenderedFrame f;
    f.h = f.w = size;
    const Palette& pal = view == View::agent ? kAgentPalette : kDemoPalette;
    f.pix.assign(static_cast<std::size_t>(size) * size * 3, 0.f);
    for (int r = 0; r < size; ++r)
        for (int c = 0; c < size; ++c) {
            f.at(r, c, 0) = pal.bg.r;
            f.at(r, c, 1) = pal.bg.g;
            f.at(r, c, 2) = pal.bg.b;
        }
    Canvas cv{f, static_cast<double>(size)};

    const bool mirrored = view == View::demonstrator;
    const double arm_scale = mirrored ? 1.1 : 1.0;
    auto to_view = [&](Vec2 p) -> Vec2 {
        if (!mirrored) return p;
        return {1.0 - p.x - 0.05, p.y - 0.05};
    };

    // Arm geometry, links scaled about the base for the demonstrator body.
    const ArmConfig& arm = scene.arm;
    double a1 = scene.theta1, a12 = scene.theta1 + scene.theta2;
    Vec2 elbow = arm.base + Vec2{arm_scale * arm.l1 * std::cos(a1),
                                 arm_scale * arm.l1 * std::sin(a1)};
    Vec2 tip = elbow + Vec2{arm_scale * arm.l2 * std::cos(a12),
                            arm_scale * arm.l2 * std::sin(a12)};

    // target object first, then arm, held cup, jaws on top
    if (scene.target_visible) {
        if (scene.task == Task::pour)
            draw_cup(cv, to_view(scene.target.pos), mirrored ? -scene.target.theta
                                                             : scene.target.theta,
                     pal.target_cup);
        else
            cv.fill_rect(to_view(scene.target.pos), 0.055, 0.042, pal.box);
    }

    cv.stroke(to_view(arm.base), to_view(elbow), 2.0, pal.link1);
    cv.stroke(to_view(elbow), to_view(tip), 2.0, pal.link2);

    if (scene.held_visible) {
        double cup_theta = mirrored ? -scene.held.theta : scene.held.theta;
        draw_cup(cv, to_view(tip), cup_theta, pal.held_cup);
    }

    // gripper jaws: separation encodes the gripper scalar
    Vec2 dir{std::cos(a12), std::sin(a12)};
    Vec2 perp{-dir.y, dir.x};
    double sep = 0.020 + 0.034 * scene.gripper;
    for (double side : {-1.0, 1.0}) {
        Vec2 j0 = tip + (side * sep / 2) * perp;
        Vec2 j1 = j0 + 0.038 * dir;
        cv.stroke(to_view(j0), to_view(j1), 1.0, pal.jaw);
    }

    for (auto& v : f.pix) v = std::min(1.f, std::max(0.f, v));
    return f;
}

}  // namespace mimic::sim
