#pragma once

#include <filesystem>

#include "bike/numerics.hpp"

namespace bike {

// BEMB file layout, all little-endian:
//   bytes 0-3   magic "BEMB"
//   bytes 4-7   version, u32 = 1
//   bytes 8-11  rows, u32
//   bytes 12-15 cols, u32
//   then rows*cols IEEE-754 binary32 values, row-major, nothing after.
void write_bemb(const std::filesystem::path& path, const Mat& m);
Mat read_bemb(const std::filesystem::path& path);

}  // namespace bike
