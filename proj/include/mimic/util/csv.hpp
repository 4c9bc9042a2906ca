#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "mimic/core/tensor.hpp"

namespace mimic::util {

/// Fixed-format float so CSV bytes are reproducible across runs.
inline std::string fmt(double v, int decimals = 6) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

class CsvWriter {
public:
    explicit CsvWriter(const std::string& path) : path_(path), os_(path, std::ios::trunc) {
        if (!os_) throw core::IoError(path + ": cannot open for writing");
    }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) os_ << ',';
            os_ << cells[i];
        }
        os_ << '\n';
        if (!os_) throw core::IoError(path_ + ": write failed");
    }

private:
    std::string path_;
    std::ofstream os_;
};

}  // namespace mimic::util
