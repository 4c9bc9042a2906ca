#pragma once

#include <span>
#include <string>

namespace mimic::util {

/// Write an 8-bit RGB PNG from row-major HWC pixels in [0,1] (values are
/// clamped and rounded). For human inspection only; the numeric pipeline
/// never reads these back.
void write_png(const std::string& path, std::span<const float> hwc, int h, int w);

}  // namespace mimic::util
