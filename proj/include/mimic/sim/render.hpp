#pragma once

#include <vector>

#include "mimic/sim/scene.hpp"

namespace mimic::sim {

enum class View { agent, demonstrator };

const char* view_name(View v);

/// H x W x 3 pixels in [0,1], row-major HWC. Rendering is a pure function of
/// (scene, view, size): identical inputs give bitwise-identical frames.
struct RenderedFrame {
    int h = 0, w = 0;
    std::vector<float> pix;  // h*w*3

    float& at(int r, int c, int ch) { return pix[(static_cast<std::size_t>(r) * w + c) * 3 + ch]; }
    float at(int r, int c, int ch) const {
        return pix[(static_cast<std::size_t>(r) * w + c) * 3 + ch];
    }
};

/// Agent view: frontal camera, the robot palette. Demonstrator view: the
/// same scene mirrored horizontally, arm links scaled 1.1x, a distinct
/// palette, and the camera offset by (+0.05,+0.05) world units.
RenderedFrame render(const Scene& scene, View view, int size = 64);

}  // namespace mimic::sim
