#include "mimic/util/png.hpp"

#include <zlib.h>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "mimic/core/tensor.hpp"

namespace mimic::util {

namespace {

void put_u32be(std::vector<unsigned char>& v, std::uint32_t x) {
    v.push_back(static_cast<unsigned char>(x >> 24));
    v.push_back(static_cast<unsigned char>(x >> 16));
    v.push_back(static_cast<unsigned char>(x >> 8));
    v.push_back(static_cast<unsigned char>(x));
}

void write_chunk(std::ofstream& os, const char type[4],
                 const std::vector<unsigned char>& payload) {
    std::vector<unsigned char> head;
    put_u32be(head, static_cast<std::uint32_t>(payload.size()));
    os.write(reinterpret_cast<const char*>(head.data()), 4);
    os.write(type, 4);
    if (!payload.empty())
        os.write(reinterpret_cast<const char*>(payload.data()),
                 static_cast<std::streamsize>(payload.size()));
    std::uint32_t crc = crc32(0, reinterpret_cast<const Bytef*>(type), 4);
    if (!payload.empty()) crc = crc32(crc, payload.data(), static_cast<uInt>(payload.size()));
    std::vector<unsigned char> tail;
    put_u32be(tail, crc);
    os.write(reinterpret_cast<const char*>(tail.data()), 4);
}

}  // namespace

void write_png(const std::string& path, std::span<const float> hwc, int h, int w) {
    if (static_cast<std::size_t>(h) * w * 3 != hwc.size())
        throw core::IoError(path + ": pixel buffer does not match " + std::to_string(h) + "x" +
                            std::to_string(w) + "x3");
    // filter byte 0 per scanline
    std::vector<unsigned char> raw(static_cast<std::size_t>(h) * (1 + 3 * w));
    std::size_t k = 0, src = 0;
    for (int r = 0; r < h; ++r) {
        raw[k++] = 0;
        for (int i = 0; i < 3 * w; ++i, ++src) {
            float v = hwc[src];
            v = v < 0.f ? 0.f : (v > 1.f ? 1.f : v);
            raw[k++] = static_cast<unsigned char>(std::lround(v * 255.f));
        }
    }
    uLongf bound = compressBound(static_cast<uLong>(raw.size()));
    std::vector<unsigned char> z(bound);
    if (compress2(z.data(), &bound, raw.data(), static_cast<uLong>(raw.size()), 6) != Z_OK)
        throw core::IoError(path + ": deflate failed");
    z.resize(bound);

    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw core::IoError(path + ": cannot open for writing");
    static const unsigned char sig[8] = {137, 80, 78, 71, 13, 10, 26, 10};
    os.write(reinterpret_cast<const char*>(sig), 8);

    std::vector<unsigned char> ihdr;
    put_u32be(ihdr, static_cast<std::uint32_t>(w));
    put_u32be(ihdr, static_cast<std::uint32_t>(h));
    ihdr.push_back(8);   // bit depth
    ihdr.push_back(2);   // truecolor
    ihdr.push_back(0);
    ihdr.push_back(0);
    ihdr.push_back(0);
    write_chunk(os, "IHDR", ihdr);
    write_chunk(os, "IDAT", z);
    write_chunk(os, "IEND", {});
    if (!os) throw core::IoError(path + ": write failed");
}

}  // namespace mimic::util
