#include "mimic/core/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

namespace mimic::core {

namespace {

constexpr char kMagic[4] = {'M', 'I', 'M', 'W'};

void write_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32(std::istream& is, const std::string& path, const char* what) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    if (!is) throw IoError(path + ": truncated reading " + what);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void write_f32_le(std::ostream& os, std::span<const float> data) {
    // Little-endian host assumed; serialize via byte copy to stay warnings-clean.
    static_assert(sizeof(float) == 4);
    os.write(reinterpret_cast<const char*>(data.data()),
             static_cast<std::streamsize>(data.size() * 4));
}

}  // namespace

void save_checkpoint(const std::string& path, const std::vector<NamedTensor>& tensors) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError(path + ": cannot open for writing");
    os.write(kMagic, 4);
    write_u32(os, kCheckpointVersion);
    for (const auto& nt : tensors) {
        write_u32(os, static_cast<std::uint32_t>(nt.name.size()));
        os.write(nt.name.data(), static_cast<std::streamsize>(nt.name.size()));
        write_u32(os, static_cast<std::uint32_t>(nt.tensor.rank()));
        for (int d : nt.tensor.shape()) write_u32(os, static_cast<std::uint32_t>(d));
        write_f32_le(os, nt.tensor.data());
    }
    if (!os) throw IoError(path + ": write failed");
}

std::vector<NamedTensor> load_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError(path + ": cannot open");
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0)
        throw IoError(path + ": not a MIMW checkpoint (bad magic)");
    std::uint32_t version = read_u32(is, path, "version");
    if (version != kCheckpointVersion)
        throw IoError(path + ": unsupported checkpoint version " + std::to_string(version));

    std::vector<NamedTensor> out;
    while (true) {
        is.peek();
        if (is.eof()) break;
        std::uint32_t name_len = read_u32(is, path, "name length");
        std::string name(name_len, '\0');
        is.read(name.data(), name_len);
        if (!is) throw IoError(path + ": truncated reading tensor name");
        std::uint32_t rank = read_u32(is, path, "rank");
        if (rank == 0 || rank > 8) throw IoError(path + ": implausible tensor rank");
        Shape shape(rank);
        std::size_t numel = 1;
        for (auto& d : shape) {
            d = static_cast<int>(read_u32(is, path, "dimension"));
            if (d <= 0) throw IoError(path + ": non-positive dimension");
            numel *= static_cast<std::size_t>(d);
        }
        std::vector<float> data(numel);
        is.read(reinterpret_cast<char*>(data.data()),
                static_cast<std::streamsize>(numel * 4));
        if (!is) throw IoError(path + ": truncated reading data of '" + name + "'");
        out.push_back({std::move(name), Tensor::from(std::move(shape), std::move(data))});
    }
    return out;
}

void restore_parameters(const std::vector<NamedTensor>& loaded,
                        std::vector<NamedTensor>& params, const std::string& origin) {
    for (auto& p : params) {
        const NamedTensor* found = nullptr;
        for (const auto& nt : loaded)
            if (nt.name == p.name) {
                found = &nt;
                break;
            }
        if (!found) throw IoError(origin + ": missing tensor '" + p.name + "'");
        if (found->tensor.shape() != p.tensor.shape())
            throw IoError(origin + ": shape mismatch for '" + p.name + "': file has " +
                          shape_str(found->tensor.shape()) + ", model expects " +
                          shape_str(p.tensor.shape()));
        std::copy(found->tensor.data().begin(), found->tensor.data().end(),
                  p.tensor.data().begin());
    }
}

}  // namespace mimic::core
